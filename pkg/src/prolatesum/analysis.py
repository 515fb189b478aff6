"""Empirical verification harness: norm growth, eigenvalue counting, spectral
clusters, and convergence sweeps of the summation operator."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .prolate import EigenSystem, Family
from .riesz import (
    ExponentTable,
    RieszConfig,
    delta_threshold,
    dual_exponent,
    expansion_coeffs,
    riesz_mean,
    riesz_weight,
)
from .specfun import QuadratureRule, jacobi_poly_orthonormal
from .transforms import SampledFunction


def lp_norm(f: SampledFunction, p: float) -> float:
    """Weighted L^p norm on the sample grid: (sum w_j |f_j|^p)^(1/p),
    max |f_j| for p = inf."""
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.abs(f.values)
    if p == math.inf:
        return float(np.max(a))
    return float(np.sum(f.rule.weights * a**p) ** (1.0 / p))


def _dense_interior_grid(es: EigenSystem, size: int = 4096) -> np.ndarray:
    # endpoint-resolving interior grid (uniform in the angle variable)
    theta = (np.arange(size) + 0.5) * np.pi / size
    if es.spec.family is Family.GPSWF:
        return np.cos(theta)
    return np.cos(theta / 2.0)


def norm_growth_fit(es: EigenSystem, p: float, n_range: tuple[int, int],
                    rule_size: int = 512) -> float:
    """Least-squares slope of log ||phi_n||_p against log n over n_range.

    For p = inf the sup is taken on a dense interior grid that resolves the
    endpoint growth; finite p uses the family quadrature.
    """
    lo, hi = n_range
    if not (0 < lo < hi < es.n_retained):
        raise ValueError("n_range must lie inside the retained indices")
    if hi - lo + 1 < 10:
        raise ValueError("need at least 10 modes for a slope fit")
    ns = np.arange(lo, hi + 1)
    if p == math.inf:
        grid = _dense_interior_grid(es)
        vals = np.max(np.abs(es.mode_matrix(grid)[ns]), axis=1)
    else:
        rule = es.default_rule(rule_size)
        modes = es.mode_matrix(rule.nodes)[ns]
        vals = np.sum(rule.weights * np.abs(modes) ** p, axis=1) ** (1.0 / p)
    return float(np.polyfit(np.log(ns), np.log(vals), 1)[0])


def eigenvalue_count(es: EigenSystem, m: float, M: float) -> int:
    """Number of retained eigenvalues in the open window (m, M)."""
    if not 0 <= m < M:
        raise ValueError("need 0 <= m < M")
    if M > es.certified_max * (1 + 1e-12):
        raise ValueError("window exceeds the certified spectral range")
    return int(np.sum((es.chi > m) & (es.chi < M)))


def calibrate_b1(es: EigenSystem, min_width: float = 2.0) -> float:
    """Sharp window-counting constant: max over eigenvalue runs of
    count / max(min_width, span).  <= 1 certifies count <= (M - m) for every
    window of width >= min_width."""
    chi = es.chi
    best = 0.0
    for i in range(chi.size):
        for j in range(i, chi.size):
            best = max(best, (j - i + 1) / max(min_width, chi[j] - chi[i]))
    return best


def cluster_ratio(f: SampledFunction, es: EigenSystem, m: float, M: float,
                  p: float, table: ExponentTable) -> float:
    """||sum_{chi_n in (m,M)} a_n phi_n||_2 normalized by
    M^(gamma(p')/2) (M-m)^(1/2) ||f||_p; zero for an empty window."""
    if not 1 < p <= 2:
        raise ValueError("cluster bound applies for p in (1, 2]")
    a = expansion_coeffs(f, es)
    mask = (es.chi > m) & (es.chi < M)
    if not np.any(mask):
        return 0.0
    num = float(np.sqrt(np.sum(np.abs(a[mask]) ** 2)))
    g = table.gamma(dual_exponent(p))
    return num / (M ** (g / 2.0) * (M - m) ** 0.5 * lp_norm(f, p))


def calibrate_lemma1(es: EigenSystem, p: float, table: ExponentTable,
                     n_probes: int = 50, max_degree: int = 20, seed: int = 0,
                     rule_size: int = 512) -> tuple[float, np.ndarray]:
    """Cluster-bound constant over random polynomial probes and sliding
    windows.

    Returns (C, per_probe) where per_probe[i] is probe i's largest ratio over
    all windows and C = max(per_probe) is the calibrated constant.
    """
    rule = es.default_rule(rule_size)
    rng = np.random.default_rng(seed)
    x = rule.nodes
    probes = np.empty((n_probes, x.size))
    for i in range(n_probes):
        deg = int(rng.integers(1, max_degree + 1))
        probes[i] = np.polynomial.polynomial.polyval(x, rng.standard_normal(deg + 1))
    modes = es.mode_matrix(x)
    coeffs = modes @ (rule.weights[:, None] * probes.T)  # (m, n_probes)
    pnorms = np.sum(rule.weights[None, :] * np.abs(probes) ** p, axis=1) ** (1.0 / p)
    g = table.gamma(dual_exponent(p))
    windows = []
    chi_max = es.certified_max
    w = 2.0
    while w < chi_max:
        starts = np.linspace(0.0, chi_max - w, 8)
        windows.extend((s, s + w) for s in starts)
        w *= 2.0
    per_probe = np.zeros(n_probes)
    for m, M in windows:
        mask = (es.chi > m) & (es.chi < M)
        if not np.any(mask):
            continue
        nums = np.sqrt(np.sum(coeffs[mask] ** 2, axis=0))
        per_probe = np.maximum(per_probe, nums / (M ** (g / 2.0) * (M - m) ** 0.5 * pnorms))
    return float(np.max(per_probe)), per_probe


class JacobiApproxResult(NamedTuple):
    residual: float
    amplitude: float


def jacobi_approx_residual(es: EigenSystem, n: int, grid_size: int = 4096) -> JacobiApproxResult:
    """Sup-norm distance of eigenfunction n from its single-Jacobi-mode
    approximation A_n J~_n, with A_n the exact basis projection (the n-th
    coefficient of column n).  At c = 0 the residual is identically zero."""
    if es.spec.family is not Family.GPSWF:
        raise ValueError("the Jacobi approximation diagnostic applies to the weighted family")
    if not 0.0 <= es.spec.alpha < 1.5:
        raise ValueError("diagnostic valid for 0 <= alpha < 3/2")
    if not 0 <= n < es.n_retained:
        raise ValueError(f"mode {n} is not retained")
    theta = (np.arange(grid_size) + 0.5) * np.pi / grid_size
    x = np.cos(theta)
    amp = float(es.coeffs[n, n])
    diff = es.eval(n, x) - amp * jacobi_poly_orthonormal(n, es.spec.alpha, es.spec.alpha, x)
    return JacobiApproxResult(residual=float(np.max(np.abs(diff))), amplitude=amp)


# ---------------------------------------------------------------------------
# convergence sweeps
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    """Per-radius errors of the summation operator plus fitted decay slope,
    counting/cluster calibration constants, and the pass flag."""

    family: str
    alpha: float
    c: float
    p: float
    delta: float
    R_grid: np.ndarray
    errors: np.ndarray            # L^p norms ||f - Psi_R f||_p
    error_integrals: np.ndarray | None  # int |f - Psi_R f|^p w dx (finite p)
    weight_counts: np.ndarray
    slope: float
    slope_so_far: np.ndarray
    threshold: float
    threshold_critical: bool
    passed: bool | None
    parseval_gap: float | None = None
    b1_constant: float | None = None
    lemma1_constant: float | None = None
    probe_growth: float | None = None

    def to_dict(self) -> dict:
        def clean(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            return v

        return {k: clean(v) for k, v in self.__dict__.items()}

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def to_csv(self) -> str:
        lines = ["R,error,weight_count,slope_so_far"]
        for i in range(len(self.R_grid)):
            lines.append(
                f"{self.R_grid[i]:.17g},{self.errors[i]:.17g},"
                f"{self.weight_counts[i]},{self.slope_so_far[i]:.17g}"
            )
        return "\n".join(lines) + "\n"


def convergence_sweep(f: SampledFunction, es: EigenSystem, p: float, delta: float,
                      R_grid) -> ConvergenceReport:
    """Errors ||f - Psi_R^delta f||_p over an ascending R grid.

    Also records the convergence functional int |f - Psi_R f|^p w dx (whose
    decay is the theorems' convergence statement), the per-R active-mode
    count, prefix slopes, and for p = 2 the gap between the quadrature
    pipeline and the exact coefficient-space (Parseval) expression.
    """
    R_grid = np.asarray(R_grid, dtype=float)
    if R_grid.ndim != 1 or R_grid.size < 2 or np.any(np.diff(R_grid) <= 0):
        raise ValueError("R_grid must be an ascending sequence of >= 2 radii")
    spec = es.spec
    table = ExponentTable(spec.family, spec.alpha, allow_extended_range=True)
    thr = delta_threshold(table, p)
    errors = np.empty(R_grid.size)
    counts = np.empty(R_grid.size, dtype=int)
    parseval_gap = None
    if p == 2:
        a2 = np.abs(expansion_coeffs(f, es)) ** 2
        f2 = np.sum(f.rule.weights * np.abs(f.values) ** 2)
    for i, R in enumerate(R_grid):
        cfg = RieszConfig(R=R, delta=delta)
        g = riesz_mean(f, es, cfg)
        diff = SampledFunction(rule=f.rule, values=f.values - g.values)
        errors[i] = lp_norm(diff, p)
        counts[i] = int(np.sum(es.chi < R))
        if p == 2:
            w = riesz_weight(es.chi, cfg)
            oracle_sq = f2 - 2 * np.sum(w * a2) + np.sum(w**2 * a2)
            gap = abs(errors[i] ** 2 - oracle_sq)
            parseval_gap = gap if parseval_gap is None else max(parseval_gap, gap)
    integrals = errors**p if p != math.inf else None
    pos = errors > 0
    slope = float(np.polyfit(np.log(R_grid[pos]), np.log(errors[pos]), 1)[0]) if np.sum(pos) >= 2 else float("nan")
    slope_so_far = np.full(R_grid.size, np.nan)
    for i in range(1, R_grid.size):
        seg = errors[: i + 1]
        if np.all(seg > 0):
            slope_so_far[i] = np.polyfit(np.log(R_grid[: i + 1]), np.log(seg), 1)[0]
    passed = bool(errors[0] / errors[-1] >= 10.0) if delta > thr.value else None
    lemma1 = None
    if 1 < p <= 2:
        lemma1 = calibrate_lemma1(es, p, table)[0]
    return ConvergenceReport(
        family=spec.family.value,
        alpha=spec.alpha,
        c=spec.c,
        p=p,
        delta=delta,
        R_grid=R_grid,
        errors=errors,
        error_integrals=integrals,
        weight_counts=counts,
        slope=slope,
        slope_so_far=slope_so_far,
        threshold=thr.value,
        threshold_critical=thr.critical,
        passed=passed,
        parseval_gap=parseval_gap,
        b1_constant=calibrate_b1(es),
        lemma1_constant=lemma1,
    )


def boundary_probes(es: EigenSystem, rule: QuadratureRule, n_bumps: int = 4,
                    n_deltas: int = 4, n_random: int = 4, seed: int = 0) -> list[SampledFunction]:
    """Probe family for operator-norm estimates: truncated-kernel bumps
    centered near the right endpoint, discrete point masses at the outermost
    quadrature nodes, and random coefficient vectors.  All normalized in the
    grid L^2 norm."""
    lo, hi = rule.interval
    modes = es.mode_matrix(rule.nodes)
    probes = []
    if n_bumps > 0:
        x0 = hi - (hi - lo) * np.geomspace(1e-6, 0.25, n_bumps)
        kernel_cols = es.mode_matrix(x0)
        for j in range(n_bumps):
            probes.append(kernel_cols[:, j] @ modes)
    for j in range(1, n_deltas + 1):
        v = np.zeros(rule.size)
        v[-j] = 1.0 / rule.weights[-j]
        probes.append(v)
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        probes.append(rng.standard_normal(es.n_retained) @ modes)
    out = []
    for v in probes:
        scale = np.sqrt(np.sum(rule.weights * np.abs(v) ** 2))
        out.append(SampledFunction(rule=rule, values=v / scale))
    return out


def operator_norm_probe(es: EigenSystem, p: float, delta: float, R_grid,
                        probes: list[SampledFunction]) -> np.ndarray:
    """Per-R empirical lower bound sup_probes ||Psi_R^delta f||_p / ||f||_p."""
    if not probes:
        raise ValueError("need at least one probe")
    R_grid = np.asarray(R_grid, dtype=float)
    out = np.empty(R_grid.size)
    for i, R in enumerate(R_grid):
        cfg = RieszConfig(R=R, delta=delta)
        best = 0.0
        for f in probes:
            denom = lp_norm(f, p)
            if denom == 0:
                raise ValueError("probes must be nonzero")
            best = max(best, lp_norm(riesz_mean(f, es, cfg), p) / denom)
        out[i] = best
    return out
