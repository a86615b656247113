"""Config-driven command line front end.

Subcommands: count, expsum, nondegen, typicality, series, catalog. Options
may come from an INI config file ([run] section) with flags overriding it.
Outputs are CSV (count, expsum) or JSON (nondegen, typicality, series); every
output file embeds the tool version and a hash of the resolved configuration,
and identical (config, seed) pairs produce byte-identical files, parallel
runs included. KHINTYPE_THREADS caps the worker pool.

Exit status: 0 success, 2 when more than half of a run's verdicts are
INCONCLUSIVE, 1 on errors.
"""
from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .counting import CountQuery, bound_sweep, critical_scale, enumerate_points, rationalize
from .expsum import MajorantParams, compare_sweep
from .manifold import BUILTIN_VERDICTS, ManifoldSpec, builtin, builtin_names, resolve
from .nondegen import (FAIL, INCONCLUSIVE, PASS, check_det1, check_det2, check_drv,
                       check_rank_k, check_surjective)
from .series import SeriesSpec, ApproxFunction, DimensionFunction, applicability, partial_sum_probe
from .typicality import construct, phase_scan

_CONSTRUCTION_NOTES = (
    ("posdef-pad", "annihilator with a definite leading form; no common zero"),
    ("shear", "annihilator tuple with fewer forms than variables; common zero exists"),
    ("diag-squares", "coordinate squares; no common zero, even complex"),
    ("tracefree-basis", "basis of trace-free symmetric matrices; rank2=yes drv=no"),
)


@dataclass
class RunConfig:
    command: str
    manifold: str = "tracefree2"
    d: int | None = None
    m: int | None = None
    map_source: str | None = None
    k: int = 2
    q: str = "64..256x2"
    kappa: str = "phi"
    theta: str = "0"
    s: str = "4"
    delta: float = 0.01
    grid: int = 32
    seed: int = 0
    budget: int | None = None
    samples: int = 20
    n: int = 1000
    dmax: int = 3
    probe: int = 0
    output: str | None = None
    threads: int = 0  # 0 = auto

    def resolved_threads(self) -> int:
        t = self.threads if self.threads > 0 else (os.cpu_count() or 1)
        cap = os.environ.get("KHINTYPE_THREADS")
        if cap:
            t = min(t, max(1, int(cap)))
        return max(1, t)

    def canonical(self) -> str:
        # threads and output are execution details: results must not depend on
        # them, so they stay out of the hash (tested via parallel reruns).
        pairs = sorted((k, v) for k, v in self.__dict__.items()
                       if k not in ("threads", "output"))
        return "\n".join(f"{k}={v}" for k, v in pairs)

    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def _parse_q_list(text: str) -> list:
    """"64..1024x2" (geometric), "64,128" (list), or a single integer."""
    text = text.strip()
    if ".." in text:
        head, _, rest = text.partition("..")
        stop, _, factor = rest.partition("x")
        factor = int(factor) if factor else 2
        q, out = int(head), []
        while q <= int(stop):
            out.append(q)
            q *= factor
        return out
    if "," in text:
        return [int(x) for x in text.split(",")]
    return [int(text)]


def _kappa_rule(text: str, m: int, k: int):
    """"phi", "scaled-phi:c", or a comma list of rationals; returns q -> list."""
    text = text.strip()
    if text == "phi":
        return lambda q: [rationalize(critical_scale(q, m, k))]
    if text.startswith("scaled-phi:"):
        c = Fraction(text.split(":", 1)[1])
        return lambda q: [rationalize(float(c) * critical_scale(q, m, k))]
    fixed = [Fraction(x) for x in text.split(",")]
    return lambda q: fixed


def _parse_thetas(text: str) -> list:
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        out.append(tuple(Fraction(x) for x in chunk.split(",")))
    return out


def _resolve_manifold(cfg: RunConfig) -> ManifoldSpec:
    if cfg.map_source:
        if cfg.d is None or cfg.m is None:
            raise ValueError("--map requires --d and --m")
        return resolve(cfg.map_source, cfg.d, cfg.m)
    return builtin(cfg.manifold)


def _meta(cfg: RunConfig) -> dict:
    return {"tool": "khintype", "version": __version__, "config_hash": cfg.hash()}


def _write_json(path: str | None, payload: dict, cfg: RunConfig):
    payload = {"meta": _meta(cfg), **payload}
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: str | None, header: str, lines: list, cfg: RunConfig):
    meta = _meta(cfg)
    text = (f"# khintype={meta['version']} config_hash={meta['config_hash']}\n"
            + header + "\n" + "".join(line + "\n" for line in lines))
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# ----------------------------------------------------------------------
# subcommand bodies

def _run_count(cfg: RunConfig) -> int:
    spec = _resolve_manifold(cfg)
    qs = _parse_q_list(cfg.q)
    kappas = _kappa_rule(cfg.kappa, spec.m, cfg.k)
    thetas = _parse_thetas(cfg.theta)
    sweep = bound_sweep(spec, cfg.k, qs, kappas, thetas,
                        workers=cfg.resolved_threads())
    lines = [
        f"{r.q},{r.kappa.numerator},{r.kappa.denominator},{r.theta_id},"
        f"{r.count},{r.envelope!r},{r.ratio!r}"
        for r in sweep.rows
    ]
    _write_csv(cfg.output, "q,kappa_num,kappa_den,theta_id,A,envelope,ratio", lines, cfg)
    summary = sweep.block_summary()
    print(f"count sweep on {spec.name}: {len(sweep.rows)} rows, k={cfg.k}")
    for q in sorted(summary):
        print(f"  q={q:>6}  max A/envelope = {summary[q]:.4f}")
    print(f"  overall max ratio = {sweep.max_ratio():.4f}")
    return 0


def _run_expsum(cfg: RunConfig) -> int:
    spec = _resolve_manifold(cfg)
    qs = _parse_q_list(cfg.q)
    kappas = _kappa_rule(cfg.kappa, spec.m, cfg.k)
    thetas = _parse_thetas(cfg.theta)
    from .counting import _as_theta
    queries, tids = [], []
    for q in qs:
        for kappa in kappas(q):
            for tid, theta in enumerate(thetas):
                lam, gam = _as_theta(theta, spec.d, spec.m)
                queries.append(CountQuery(q, kappa, lam, gam))
                tids.append(tid)
    table = compare_sweep(spec, queries, delta=cfg.delta, grid=cfg.grid,
                          workers=cfg.resolved_threads(), theta_ids=tids)
    lines = [
        f"{r.q},{r.kappa.numerator},{r.kappa.denominator},{r.theta_id},"
        f"{r.count},{r.majorant!r},{r.ratio!r},{r.H},{r.r},{r.delta!r}"
        for r in table.rows
    ]
    _write_csv(cfg.output, "q,kappa_num,kappa_den,theta_id,A,majorant,ratio,H,r,delta",
               lines, cfg)
    print(f"majorant sweep on {spec.name}: {len(table.rows)} rows in regime, "
          f"{len(table.skipped)} skipped, max A/majorant = {table.max_ratio():.4f}")
    return 0


def _run_nondegen(cfg: RunConfig) -> int:
    spec = _resolve_manifold(cfg)
    rng = np.random.default_rng(cfg.seed)
    lo = np.array([float(x) for x in spec.rect.lo])
    hi = np.array([float(x) for x in spec.rect.hi])
    records, inconclusive, total_verdicts = [], 0, 0
    for _ in range(cfg.samples):
        alpha = lo + rng.random(spec.d) * (hi - lo)
        pencil = spec.map.hessian_pencil(alpha)
        rec: dict = {"alpha": [repr(float(x)) for x in alpha]}
        if spec.m <= spec.d:
            ok, det = check_det1(pencil)
            rec["det1"] = {"passes": ok, "det": repr(det)}
        if spec.m == 1:
            ok, det = check_det2(pencil)
            rec["det2"] = {"passes": ok, "det": repr(det)}
        ok, sigma = check_surjective(pencil)
        rec["surjective"] = {"passes": ok, "sigma_min": repr(sigma)}
        verdicts = []
        if cfg.k <= spec.d:
            rep = check_rank_k(pencil, cfg.k, budget=cfg.budget)
            rec[f"rank{cfg.k}"] = {"verdict": rep.verdict, "margin": repr(rep.margin),
                                   "witness_t": [repr(x) for x in rep.witness_t]}
            verdicts.append(rep.verdict)
        if spec.d >= 2:
            rep = check_drv(pencil, budget=cfg.budget)
            rec["drv"] = {"verdict": rep.verdict, "margin": repr(rep.margin)}
            verdicts.append(rep.verdict)
        inconclusive += sum(v == INCONCLUSIVE for v in verdicts)
        total_verdicts += len(verdicts)
        rec["n_inconclusive"] = sum(v == INCONCLUSIVE for v in verdicts)
        records.append(rec)
    _write_json(cfg.output, {"manifold": spec.name, "samples": records,
                             "n_inconclusive": inconclusive}, cfg)
    print(f"nondegen on {spec.name}: {cfg.samples} sampled points, "
          f"{inconclusive} inconclusive verdicts")
    return 2 if inconclusive * 2 > total_verdicts else 0


def _run_typicality(cfg: RunConfig) -> int:
    reports = phase_scan(cfg.dmax, cfg.n, budget=cfg.budget, seed=cfg.seed)
    _write_json(cfg.output, {"cells": [r.to_json() for r in reports]}, cfg)
    inc = sum(r.n_inconclusive for r in reports)
    total = sum(r.n_samples for r in reports)
    print(f"typicality: {len(reports)} cells x {cfg.n} samples, "
          f"{sum(r.agree for r in reports)}/{len(reports)} agree, {inc} inconclusive")
    for r in reports:
        print(f"  d={r.d} m={r.m}: U {r.freq_U:.3f} ({r.predicted_U}), "
              f"U~ {r.freq_Utilde:.3f} ({r.predicted_Utilde}), agree={r.agree}")
    return 2 if inc * 2 > total else 0


def _run_series(cfg: RunConfig) -> int:
    if cfg.d is None or cfg.m is None:
        raise ValueError("series needs --d and --m")
    rep = applicability(cfg.d, cfg.m, cfg.k, Fraction(cfg.s))
    payload = rep.to_json()
    print(rep.render_text())
    if cfg.probe:
        spec = SeriesSpec(kind="gauge", n=cfg.d + cfg.m,
                          g=DimensionFunction(Fraction(cfg.s)), m=cfg.m, k=cfg.k)
        probe = partial_sum_probe(spec, cfg.probe)
        payload["probe"] = {"verdict": probe.verdict, "rigorous": probe.rigorous,
                            "partials": {str(k): repr(v) for k, v in probe.partials.items()}}
        print(f"  probe to Q={cfg.probe}: {probe}")
    _write_json(cfg.output, payload, cfg)
    return 0


def _run_catalog(cfg: RunConfig) -> int:
    print("builtin manifolds (documented condition verdicts):")
    for name in builtin_names():
        spec = builtin(name)
        verdicts = BUILTIN_VERDICTS.get(name, {})
        tags = " ".join(f"{k}={'yes' if v else 'no'}" for k, v in verdicts.items())
        print(f"  {name}: {tags}")
        print(f"      d={spec.d} m={spec.m} f = {spec.map.source()}")
    print("constructions (typicality witnesses):")
    for name, note in _CONSTRUCTION_NOTES:
        print(f"  {name}: {note}")
    return 0


_RUNNERS = {
    "count": _run_count,
    "expsum": _run_expsum,
    "nondegen": _run_nondegen,
    "typicality": _run_typicality,
    "series": _run_series,
    "catalog": _run_catalog,
}


def run(cfg: RunConfig) -> int:
    """Dispatch a validated config; returns the process exit status."""
    if cfg.command not in _RUNNERS:
        raise ValueError(f"unknown command {cfg.command!r}")
    return _RUNNERS[cfg.command](cfg)


# ----------------------------------------------------------------------
# argument handling

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="khintype",
        description="counting, majorant, nondegeneracy, typicality and series experiments",
    )
    p.add_argument("--config", help="INI file with a [run] section", default=None)
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--config", default=None, help="INI file with a [run] section")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--output", default=None)
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--budget", type=int, default=None)

    sp = sub.add_parser("count", help="exact counts vs the counting envelope")
    common(sp)
    sp.add_argument("--manifold", default=None)
    sp.add_argument("--map", dest="map_source", default=None)
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--q", default=None)
    sp.add_argument("--kappa", default=None)
    sp.add_argument("--theta", default=None)

    sp = sub.add_parser("expsum", help="exact counts vs the oscillatory majorant")
    common(sp)
    for flag in ("--manifold", "--q", "--kappa", "--theta"):
        sp.add_argument(flag, default=None)
    sp.add_argument("--map", dest="map_source", default=None)
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--delta", type=float, default=None)
    sp.add_argument("--grid", type=int, default=None)

    sp = sub.add_parser("nondegen", help="pencil conditions at sampled points")
    common(sp)
    sp.add_argument("--manifold", default=None)
    sp.add_argument("--map", dest="map_source", default=None)
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--samples", type=int, default=None)

    sp = sub.add_parser("typicality", help="Monte Carlo phase diagram")
    common(sp)
    sp.add_argument("--dmax", type=int, default=None)
    sp.add_argument("--n", type=int, default=None)

    sp = sub.add_parser("series", help="convergence classification")
    common(sp)
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--s", default=None)
    sp.add_argument("--probe", type=int, default=None)

    sp = sub.add_parser("catalog", help="builtins and their documented verdicts")
    common(sp)
    return p


def build_config(argv=None) -> RunConfig | None:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return None
    values: dict = {}
    if args.config:
        ini = configparser.ConfigParser()
        if not ini.read(args.config):
            raise ValueError(f"cannot read config file {args.config!r}")
        if "run" not in ini:
            raise ValueError("config file must contain a [run] section")
        for key, raw in ini["run"].items():
            values[key] = raw
    for key, val in vars(args).items():
        if key in ("config",) or val is None:
            continue
        values[key] = val
    values["command"] = args.command if args.command else values.get("command")
    cfg = RunConfig(command=values.pop("command"))
    for key, val in values.items():
        if not hasattr(cfg, key):
            raise ValueError(f"unknown config key {key!r}")
        current = getattr(cfg, key)
        if isinstance(current, bool):
            val = str(val).lower() in ("1", "true", "yes")
        elif isinstance(current, int) and not isinstance(val, int):
            val = int(val)
        elif isinstance(current, float) and not isinstance(val, float):
            val = float(val)
        setattr(cfg, key, val)
    return cfg


def main(argv=None) -> int:
    try:
        cfg = build_config(argv)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    if cfg is None:
        return 0
    try:
        return run(cfg)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
