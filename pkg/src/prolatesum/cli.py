"""Command-line front end: compute bases, run the verification battery,
sweep convergence, tabulate kernels, and print exponent tables.

Exit codes: 0 all good, 1 usage or invalid configuration, 2 a verification
check failed, 3 an internal numerical routine failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import analysis, riesz, transforms
from .prolate import Family, ProlateSpec, check_bounds, solve
from .riesz import ExponentTable, RieszConfig, delta_threshold, dual_exponent
from .specfun import NumericsError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK = 2
EXIT_NUMERICS = 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Fully resolved run parameters; embedded in every output file so a run
    can be reproduced bit-for-bit from its artifact."""

    command: str
    family: str = "gpswf"
    alpha: float = 0.0
    c: float = 1.0
    N: int = 128
    keep_fraction: float = 0.5
    quad_size: int = 512
    p: float = 2.0
    delta: float = 1.0
    r_start: float | None = None
    r_stop: float | None = None
    r_count: int = 8
    fn: str = "exp"
    R: float | None = None
    grid_points: int = 16
    p_value: float | None = None
    p_start: float = 1.05
    p_stop: float = 64.0
    p_count: int = 12
    eps_choice: float = 0.01
    seed: int = 0
    output: str | None = None
    fmt: str = "json"

    def validate(self):
        if self.family not in ("gpswf", "cpswf"):
            raise UsageError("family must be gpswf or cpswf")
        if self.fmt not in ("json", "csv"):
            raise UsageError("format must be json or csv")
        if self.quad_size < 8:
            raise UsageError("quadrature size must be >= 8")
        if self.p < 1:
            raise UsageError("p must be >= 1")
        if self.r_count < 2:
            raise UsageError("R grid needs at least 2 points")


def _spec(cfg: RunConfig) -> ProlateSpec:
    try:
        return ProlateSpec(family=Family(cfg.family), alpha=cfg.alpha, c=cfg.c,
                           N=cfg.N, keep_fraction=cfg.keep_fraction)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _fn_values(name: str, x: np.ndarray) -> np.ndarray:
    if name == "exp":
        return np.exp(x)
    if name == "sin":
        return np.sin(3.0 * x)
    if name == "runge":
        return 1.0 / (1.0 + 25.0 * x * x)
    raise UsageError(f"unknown probe function {name!r}")


def _emit(cfg: RunConfig, results, checks: list[dict]) -> None:
    if cfg.fmt == "json":
        payload = {"config": asdict(cfg), "results": results, "checks": checks}
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        header = "# config: " + json.dumps(asdict(cfg), sort_keys=True) + "\n"
        body = results if isinstance(results, str) else json.dumps(results, sort_keys=True)
        text = header + body
        if checks:
            text += "# checks: " + json.dumps(checks, sort_keys=True) + "\n"
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# verification battery
# ---------------------------------------------------------------------------

def _check(name: str, value: float, tolerance: float, larger_ok: bool = False) -> dict:
    ok = value >= tolerance if larger_ok else value <= tolerance
    return {"name": name, "pass": bool(ok), "value": float(value), "tolerance": float(tolerance)}


def _verify_checks(cfg: RunConfig) -> list[dict]:
    spec = _spec(cfg)
    es = solve(spec)
    rule = es.default_rule(cfg.quad_size)
    rng = np.random.default_rng(cfg.seed)
    checks = []

    gaps = np.diff(es.chi)
    checks.append(_check("eigenvalues_strictly_increasing", float(np.min(gaps)), 0.0, larger_ok=True))

    slack = 1e-8 * (1.0 + spec.c**2)
    lo, hi = es.lower_bounds(), es.upper_bounds()
    violation = float(np.max(np.maximum(lo - es.chi, es.chi - hi)))
    checks.append(_check("eigenvalue_sandwich", violation, slack))
    checks.append({"name": "eigenvalue_sandwich_all_true", "pass": bool(np.all(check_bounds(es))),
                   "value": float(np.sum(check_bounds(es))), "tolerance": float(es.n_retained)})

    modes = es.mode_matrix(rule.nodes)
    gram = (modes * rule.weights) @ modes.T
    checks.append(_check("orthonormality_gram", float(np.max(np.abs(gram - np.eye(es.n_retained)))), 1e-8))

    es2 = solve(ProlateSpec(family=spec.family, alpha=spec.alpha, c=spec.c,
                            N=2 * spec.N, keep_fraction=spec.keep_fraction / 2))
    drift = float(np.max(np.abs(es.chi - es2.chi[: es.n_retained])))
    checks.append(_check("truncation_refinement", drift, 1e-10))

    if spec.family is Family.GPSWF:
        wrong = [np.max(np.abs(es.coeffs[(1 - par) :: 2, j])) if es.coeffs[(1 - par)::2, j].size else 0.0
                 for j, par in enumerate(es.parity)]
        checks.append(_check("parity_support", float(np.max(wrong)), 0.0))

    checks.append(_check("condition_b1_counting", analysis.calibrate_b1(es), 1.0))

    n = np.arange(es.n_retained, dtype=float)
    if spec.family is Family.GPSWF and spec.alpha >= 0:
        ratios = es.chi[1:] / n[1:] ** 2
        checks.append(_check("condition_b2_chi_ge_n2", float(np.min(ratios)), 1.0 - 1e-12, larger_ok=True))
    if spec.family is Family.CPSWF and spec.alpha >= 0.5:
        ratios = es.chi[1:] / (4 * n[1:] ** 2)
        checks.append(_check("condition_b2_chi_ge_4n2", float(np.min(ratios)), 1.0 - 1e-12, larger_ok=True))

    if es.n_retained > 40:
        hi_n = min(100, es.n_retained - 1)
        slope = analysis.norm_growth_fit(es, math.inf, (20, hi_n))
        checks.append(_check("condition_a_sup_growth", slope, spec.alpha + 1.0 + 0.1))

    t = rng.uniform(1e-6, 1.0, size=10_000)
    part = np.zeros_like(t)
    for k in range(-40, 41):
        part += riesz.bump(np.ldexp(t, k))
    checks.append(_check("dyadic_partition_of_unity", float(np.max(np.abs(part - 1.0))), 1e-13))

    worst_gap = 0.0
    for _ in range(5):
        R = float(rng.uniform(es.chi[2], es.certified_max))
        delta = float(rng.uniform(0.1, 3.0))
        rc = RieszConfig(R=R, delta=delta)
        total = riesz.bump_zero_piece(es.chi, rc)
        for k in range(1, riesz.dyadic_cutoff(rc) + 1):
            total = total + riesz.dyadic_piece(es.chi, rc, k)
        total = total + riesz.dyadic_tail(es.chi, rc)
        worst_gap = max(worst_gap, float(np.max(np.abs(total - riesz.riesz_weight(es.chi, rc)))))
    checks.append(_check("dyadic_decomposition_identity", worst_gap, 1e-12))

    rc = RieszConfig(R=float(es.certified_max), delta=cfg.delta)
    grid = np.linspace(0.0, es.certified_max * 1.05, 100_001)
    worst_rel = 0.0
    support_leak = 0.0
    for k in range(1, riesz.dyadic_cutoff(rc) + 1):
        vals = riesz.dyadic_piece(grid, rc, k)
        worst_rel = max(worst_rel, float(np.max(np.abs(vals)) / 2.0 ** (rc.delta - k * rc.delta)))
        lo_k, hi_k = rc.R * (1 - 2.0 ** (-k + 1)), rc.R * (1 - 2.0 ** (-k - 1))
        outside = (grid <= lo_k) | (grid >= hi_k)
        support_leak = max(support_leak, float(np.max(np.abs(vals[outside]))))
    checks.append(_check("dyadic_piece_sup_bound", worst_rel, 1.0))
    checks.append(_check("dyadic_piece_support", support_leak, 0.0))

    if spec.c > 0:
        noise_floor = 1e-8
        worst_resid = 0.0
        worst_qc = 0.0
        for nn in range(min(9, es.n_retained)):
            mu = transforms.estimate_mu(spec.alpha, spec.c, es, nn, size=cfg.quad_size)
            if abs(mu) < noise_floor:
                continue
            f = transforms.sample_mode(es, nn, rule=rule)
            if spec.family is Family.GPSWF:
                g = transforms.finite_fourier(spec.alpha, spec.c, f)
            else:
                g = transforms.finite_hankel(spec.alpha, spec.c, f)
            resid = np.sqrt(np.sum(rule.weights * np.abs(g.values - mu * f.values) ** 2))
            worst_resid = max(worst_resid, float(resid / abs(mu)))
            if spec.family is Family.GPSWF and nn <= 4:
                q = transforms.apply_Qc(spec.alpha, spec.c, f)
                lam = float(np.real(np.sum(rule.weights * q.values * f.values)))
                worst_qc = max(worst_qc, abs(lam - spec.c / (2 * math.pi) * abs(mu) ** 2))
        checks.append(_check("transform_eigenrelation_residual", worst_resid, 1e-4))
        if spec.family is Family.GPSWF:
            checks.append(_check("qc_eigenvalue_consistency", worst_qc, 1e-8))

    return checks


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_basis(cfg: RunConfig) -> int:
    es = solve(_spec(cfg))
    if cfg.fmt == "json":
        _emit(cfg, es.to_dict(), [])
    else:
        _emit(cfg, es.to_csv(), [])
    return EXIT_OK


def _cmd_verify(cfg: RunConfig) -> int:
    checks = _verify_checks(cfg)
    n_pass = sum(1 for c in checks if c["pass"])
    _emit(cfg, {"n_checks": len(checks), "n_pass": n_pass}, checks)
    return EXIT_OK if n_pass == len(checks) else EXIT_CHECK


def _cmd_sweep(cfg: RunConfig) -> int:
    es = solve(_spec(cfg))
    if cfg.r_start is None or cfg.r_stop is None:
        r_start, r_stop = float(es.chi[4]), float(es.certified_max)
    else:
        r_start, r_stop = cfg.r_start, cfg.r_stop
    if r_stop > es.certified_max:
        raise UsageError(
            f"R exceeds certified spectrum (max R {r_stop} > {es.certified_max:.6g})"
        )
    if not 0 < r_start < r_stop:
        raise UsageError("need 0 < r_start < r_stop")
    R_grid = np.geomspace(r_start, r_stop, cfg.r_count)
    rule = es.default_rule(cfg.quad_size)
    f = transforms.SampledFunction(rule=rule, values=_fn_values(cfg.fn, rule.nodes))
    report = analysis.convergence_sweep(f, es, cfg.p, cfg.delta, R_grid)
    probes = analysis.boundary_probes(es, rule, seed=cfg.seed)
    sups = analysis.operator_norm_probe(es, cfg.p, cfg.delta, R_grid, probes)
    report.probe_growth = float(sups[-1] / sups[0])
    if cfg.fmt == "json":
        _emit(cfg, report.to_dict(), [])
    else:
        _emit(cfg, report.to_csv(), [])
    return EXIT_OK


def _cmd_kernel(cfg: RunConfig) -> int:
    es = solve(_spec(cfg))
    R = cfg.R if cfg.R is not None else float(es.certified_max)
    if R > es.certified_max:
        raise UsageError(f"R exceeds certified spectrum ({R} > {es.certified_max:.6g})")
    rc = RieszConfig(R=R, delta=cfg.delta)
    lo, hi = (-1.0, 1.0) if es.spec.family is Family.GPSWF else (0.0, 1.0)
    pts = lo + (hi - lo) * (np.arange(cfg.grid_points) + 0.5) / cfg.grid_points
    w = riesz.riesz_weight(es.chi, rc)
    modes = es.mode_matrix(pts)
    K = (modes * w[:, None]).T @ modes
    K = np.triu(K) + np.triu(K, 1).T  # exactly symmetric tabulation
    if cfg.fmt == "json":
        _emit(cfg, {"R": R, "delta": cfg.delta, "points": pts.tolist(), "kernel": K.tolist()}, [])
    else:
        lines = ["x,y,value"]
        for i, xi in enumerate(pts):
            for j, yj in enumerate(pts):
                lines.append(f"{xi:.17g},{yj:.17g},{K[i, j]:.17g}")
        _emit(cfg, "\n".join(lines) + "\n", [])
    return EXIT_OK


def _cmd_exponents(cfg: RunConfig) -> int:
    table = ExponentTable(Family(cfg.family), cfg.alpha, eps_choice=cfg.eps_choice)
    if cfg.p_value is not None:
        ps = [cfg.p_value]
    else:
        ps = list(np.geomspace(cfg.p_start, cfg.p_stop, cfg.p_count))
    rows = []
    for p in ps:
        thr = delta_threshold(table, p)
        rows.append({
            "p": p,
            "gamma_p": table.gamma(p),
            "p_dual": dual_exponent(p),
            "gamma_p_dual": table.gamma(dual_exponent(p)),
            "delta_threshold": thr.value,
            "critical": thr.critical,
        })
    for r in rows:
        sys.stdout.write(
            f"p={r['p']:.6g} gamma={r['gamma_p']:.6g} p'={r['p_dual']:.6g} "
            f"gamma(p')={r['gamma_p_dual']:.6g} delta_threshold={r['delta_threshold']:.6g}"
            + (" (critical line p=p_0)" if r["critical"] else "") + "\n"
        )
    if cfg.output:
        if cfg.fmt == "json":
            _emit(cfg, {"p0": table.p0, "p0_dual": table.p0_dual, "rows": rows}, [])
        else:
            lines = ["p,gamma_p,p_dual,gamma_p_dual,delta_threshold,critical"]
            for r in rows:
                lines.append(
                    f"{r['p']:.17g},{r['gamma_p']:.17g},{r['p_dual']:.17g},"
                    f"{r['gamma_p_dual']:.17g},{r['delta_threshold']:.17g},{int(r['critical'])}"
                )
            _emit(cfg, "\n".join(lines) + "\n", [])
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="prolatesum",
                     description="prolate eigenbases and spectral summation diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_family_args(sp):
        sp.add_argument("--family", default="gpswf", choices=["gpswf", "cpswf"])
        sp.add_argument("--alpha", type=float, default=0.0)
        sp.add_argument("--c", type=float, default=1.0)
        sp.add_argument("--n", type=int, default=128, dest="N")
        sp.add_argument("--keep-fraction", type=float, default=0.5)
        sp.add_argument("--quad-size", type=int, default=512)

    def add_io_args(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--output", default=None)
        sp.add_argument("--format", default="json", choices=["json", "csv"], dest="fmt")

    sp = sub.add_parser("basis", help="solve the eigenproblem and export it")
    add_family_args(sp); add_io_args(sp)

    sp = sub.add_parser("verify", help="run the aggregated verification battery")
    add_family_args(sp); add_io_args(sp)
    sp.add_argument("--delta", type=float, default=1.0)

    sp = sub.add_parser("sweep", help="convergence sweep over a geometric R grid")
    add_family_args(sp); add_io_args(sp)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--delta", type=float, default=1.0)
    sp.add_argument("--r-start", type=float, default=None)
    sp.add_argument("--r-stop", type=float, default=None)
    sp.add_argument("--r-count", type=int, default=8)
    sp.add_argument("--fn", default="exp", choices=["exp", "sin", "runge"])

    sp = sub.add_parser("kernel", help="tabulate the summation kernel on a grid")
    add_family_args(sp); add_io_args(sp)
    sp.add_argument("--R", type=float, default=None)
    sp.add_argument("--delta", type=float, default=1.0)
    sp.add_argument("--grid-points", type=int, default=16)

    sp = sub.add_parser("exponents", help="print the exponent and threshold tables")
    sp.add_argument("--family", default="gpswf", choices=["gpswf", "cpswf"])
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--p", type=float, default=None, dest="p_value")
    sp.add_argument("--p-start", type=float, default=1.05)
    sp.add_argument("--p-stop", type=float, default=64.0)
    sp.add_argument("--p-count", type=int, default=12)
    sp.add_argument("--eps-choice", type=float, default=0.01)
    add_io_args(sp)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    for name in vars(args):
        if hasattr(cfg, name):
            value = getattr(args, name)
            if value is not None or name in ("r_start", "r_stop", "R", "p_value", "output"):
                setattr(cfg, name, value)
    cfg.validate()
    return cfg


_COMMANDS = {
    "basis": _cmd_basis,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "kernel": _cmd_kernel,
    "exponents": _cmd_exponents,
}


def run(config: RunConfig) -> int:
    """Execute one resolved configuration; returns the process exit code."""
    try:
        return _COMMANDS[config.command](config)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except NumericsError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICS
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = config_from_args(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
