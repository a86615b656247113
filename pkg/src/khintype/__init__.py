"""khintype: exact counting of rational points near polynomial graph manifolds,
nondegeneracy certification of Hessian pencils, oscillatory-sum majorants,
Monte Carlo typicality scans, and exact series convergence classification."""

__version__ = "0.1.0"

from .manifold import ManifoldSpec, PolyMap, Rectangle, builtin, eval_all, lipschitz_c1, parse_map
from .symspace import (Signature, SymMatrix, SymPencil, contract, middle_eigenvalue, minor,
                       rank_eps, signature)
from .counting import (CountQuery, CountResult, bound_sweep, brute_force_points,
                       critical_scale, enumerate_points, hc_partial_sum, rationalize)
from .nondegen import (RankReport, check_det1, check_det2, check_drv, check_rank_k,
                       check_surjective)
from .expsum import (MajorantParams, OutOfRegimeError, compare_sweep, kernel_check,
                     majorant, product_integral)
from .series import (ApproxFunction, DimensionFunction, SeriesSpec, applicability,
                     classify_gseries, partial_sum_probe)
from .typicality import (OperatorSample, PhaseReport, annihilator_zero_search, construct,
                         dim_S_check, find_zero_middle_eig, membership_U,
                         membership_Utilde, phase_scan, sample_operator)

__all__ = [name for name in dir() if not name.startswith("_")]
