"""Convergence classification for power-law gauge and rate series.

The exact classifier compares rational numbers only; the numeric probe sums
actual terms and is explicitly a NON-RIGOROUS heuristic cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

CONVERGES = "CONVERGES"
DIVERGES = "DIVERGES"


@dataclass(frozen=True)
class DimensionFunction:
    """Gauge g(rho) = rho^s, optionally times Log(1/rho)^log_power (numeric only)."""

    s: Fraction
    log_power: int = 0

    def __post_init__(self):
        s = Fraction(self.s)
        if s <= 0:
            raise ValueError("exponent s must be positive")
        object.__setattr__(self, "s", s)

    def gauge(self, rho: float) -> float:
        if rho < 0:
            raise ValueError("rho must be >= 0")
        if rho == 0.0:
            return 0.0
        val = rho ** float(self.s)
        if self.log_power:
            val *= max(1.0, math.log(1.0 / rho)) ** self.log_power
        return val

    def quotient_gauge(self, rho: float, m: int) -> float:
        """g(rho) / rho^m, the codimension-m quotient gauge."""
        if rho == 0.0:
            return 0.0
        return self.gauge(rho) / rho**m


@dataclass(frozen=True)
class ApproxFunction:
    """Rate function psi(q) = c * q^(-tau); c = 0 gives the zero function."""

    c: Fraction
    tau: Fraction

    def __post_init__(self):
        c, tau = Fraction(self.c), Fraction(self.tau)
        if c < 0 or tau <= 0:
            raise ValueError("need c >= 0 and tau > 0")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "tau", tau)

    def value(self, q: int):
        """Exact Fraction when tau is an integer, float otherwise."""
        if self.tau.denominator == 1:
            return self.c / Fraction(q) ** int(self.tau)
        return float(self.c) * float(q) ** (-float(self.tau))

    def __call__(self, q: int) -> float:
        return float(self.value(q))


@dataclass(frozen=True)
class SeriesVerdict:
    converges: bool
    critical: bool
    lhs: Fraction
    rhs: Fraction

    @property
    def verdict(self) -> str:
        return CONVERGES if self.converges else DIVERGES

    def __str__(self):
        tag = " (CRITICAL)" if self.critical else ""
        return self.verdict + tag


def classify_gseries(s, n: int, m: int, k: int) -> SeriesVerdict:
    """Exact verdict for the gauge series sum_q q^n g(q^-1 (q^-1 log^2 q)^(k/(2m+k)))
    with g(rho) = rho^s.

    Converges iff s * (1 + k/(2m+k)) > n + 1. At exact equality the surviving
    tail is sum_q q^-1 (log q)^(2sk/(2m+k)), which diverges, so equality is
    classified DIVERGES and flagged critical.
    """
    s = Fraction(s)
    if s <= 0 or n < 1 or m < 1 or k < 1:
        raise ValueError("need s > 0 and positive integers n, m, k")
    lhs = s * (1 + Fraction(k, 2 * m + k))
    rhs = Fraction(n + 1)
    return SeriesVerdict(converges=lhs > rhs, critical=lhs == rhs, lhs=lhs, rhs=rhs)


@dataclass
class ApplicabilityReport:
    d: int
    m: int
    k: int
    s: Fraction
    n: int
    case1_applies: bool            # k = 1 route: m < d - 1
    case2_applies: bool            # k = 2 route: m < C(d+1, 2)
    series: SeriesVerdict
    typical_rank2: bool            # m <= C(d, 2): rank-2 holds for a.e. operator

    def render_text(self) -> str:
        if self.case1_applies and self.k == 1:
            case = "Case 1 applies"
        elif self.case2_applies and self.k == 2:
            case = "Case 2 applies"
        elif self.case1_applies or self.case2_applies:
            case = "a case applies for a different k"
        else:
            case = "no case applies"
        lines = [
            f"d={self.d} m={self.m} k={self.k} s={self.s} (n={self.n}): {case}; {self.series}",
            f"  numeric hypotheses: case1 (m < d-1): {self.case1_applies}; "
            f"case2 (m < C(d+1,2)): {self.case2_applies}",
            f"  rank-2 condition holds for almost every operator iff m <= C(d,2): "
            f"{self.typical_rank2}",
        ]
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "d": self.d, "m": self.m, "k": self.k, "s": str(self.s), "n": self.n,
            "case1_applies": self.case1_applies, "case2_applies": self.case2_applies,
            "series": self.series.verdict, "series_critical": self.series.critical,
            "typical_rank2": self.typical_rank2,
        }


def applicability(d: int, m: int, k: int, s) -> ApplicabilityReport:
    """Which convergence route (if any) covers (d, m, k), and the series verdict."""
    if d < 1 or m < 1 or k < 1:
        raise ValueError("need positive d, m, k")
    n = d + m
    return ApplicabilityReport(
        d=d, m=m, k=k, s=Fraction(s), n=n,
        case1_applies=m < d - 1,
        case2_applies=m < comb(d + 1, 2),
        series=classify_gseries(s, n, m, k),
        typical_rank2=m <= comb(d, 2),
    )


# ----------------------------------------------------------------------
# numeric probe

@dataclass(frozen=True)
class SeriesSpec:
    """Which concrete series to sum numerically.

    kind "khinchin": sum psi(q)^n.
    kind "jarnik":   sum q^n g(psi(q)/q).
    kind "gauge":    sum q^n g(q^-1 (q^-1 log^2 q)^(k/(2m+k))).
    """

    kind: str
    n: int
    psi: ApproxFunction | None = None
    g: DimensionFunction | None = None
    m: int = 1
    k: int = 1

    def known_log_power(self) -> float:
        """Exponent of the polylog factor of the q^-p tail, used by the probe."""
        if self.kind == "gauge" and self.g is not None:
            return 2.0 * float(self.g.s) * self.k / (2 * self.m + self.k) + self.g.log_power
        if self.kind == "jarnik" and self.g is not None:
            return float(self.g.log_power)
        return 0.0

    def terms(self, qs: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=float)
        if self.kind == "khinchin":
            return (float(self.psi.c) * qs ** (-float(self.psi.tau))) ** self.n
        if self.kind == "jarnik":
            rho = float(self.psi.c) * qs ** (-float(self.psi.tau) - 1.0)
            return qs**self.n * _gauge_array(self.g, rho)
        if self.kind == "gauge":
            expo = self.k / (2.0 * self.m + self.k)
            logs = np.log(np.maximum(qs, 1.0))
            rho = (logs**2 / qs) ** expo / qs
            return qs**self.n * _gauge_array(self.g, rho)
        raise ValueError(f"unknown series kind {self.kind!r}")


def _gauge_array(g: DimensionFunction, rho: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rho)
    pos = rho > 0
    out[pos] = rho[pos] ** float(g.s)
    if g.log_power:
        out[pos] *= np.maximum(1.0, np.log(1.0 / rho[pos])) ** g.log_power
    return out


@dataclass
class ProbeResult:
    partials: dict           # {Q//4: S, Q//2: S, Q: S}
    increment_ratio: float
    adjusted_ratio: float
    verdict: str
    rigorous: bool = field(default=False)

    def __str__(self):
        return f"{self.verdict} (NON-RIGOROUS probe, adjusted tail ratio {self.adjusted_ratio:.3f})"


def partial_sum_probe(spec: SeriesSpec, Q: int) -> ProbeResult:
    """Tail-ratio heuristic: compare increments over (Q/4, Q/2] and (Q/2, Q].

    The known polylog factor of the term is divided out before comparing, so
    the ratio estimates 2^(1-p) for a q^-p tail; >= 0.95 reads as divergent.
    Explicitly NON-RIGOROUS; near the critical exponent it can disagree with
    the exact classifier.
    """
    if Q < 100:
        raise ValueError("Q must be >= 100")
    qs = np.arange(1, Q + 1)
    terms = spec.terms(qs)
    csum = np.cumsum(terms)
    q1, q2 = Q // 4, Q // 2
    partials = {q1: float(csum[q1 - 1]), q2: float(csum[q2 - 1]), Q: float(csum[Q - 1])}
    inc1 = partials[q2] - partials[q1]
    inc2 = partials[Q] - partials[q2]
    if inc2 <= 0.0 or inc1 <= 0.0:
        return ProbeResult(partials, 0.0, 0.0, CONVERGES)
    beta = spec.known_log_power()
    log_adjust = (math.log(0.75 * Q) / math.log(0.375 * Q)) ** beta
    ratio = inc2 / inc1
    adjusted = ratio / log_adjust
    verdict = DIVERGES if adjusted >= 0.95 else CONVERGES
    return ProbeResult(partials, ratio, adjusted, verdict)
