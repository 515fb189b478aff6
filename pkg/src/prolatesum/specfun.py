"""Special functions and small linear-algebra kernels used by the rest of the package.

Everything here is self-contained numerics: orthonormal Jacobi polynomials by
three-term recurrence, Gauss-Jacobi rules by Golub-Welsch, a symmetric
tridiagonal eigensolver, Bessel J of real order, and one auxiliary
elliptic-type integral.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log, pi

import numpy as np
from scipy.integrate import quad
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.special import betaln


class NumericsError(RuntimeError):
    """An internal numerical routine failed to converge or lost accuracy."""


# ---------------------------------------------------------------------------
# quadrature rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights exact for polynomials against a Jacobi weight.

    The weight is (1-x)^a (1+x)^b on interval=(-1, 1).  Rules mapped to other
    intervals (e.g. Gauss-Legendre on (0, 1)) keep a/b of the generating
    weight and record the mapped interval.
    """

    a: float
    b: float
    interval: tuple[float, float]
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.nodes.size

    def matches(self, other: "QuadratureRule") -> bool:
        """Same weight family, interval and resolution."""
        return (
            self.a == other.a
            and self.b == other.b
            and self.interval == other.interval
            and self.size == other.size
        )


def jacobi_recurrence(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """First n recurrence coefficients (alpha_k, beta_k) for monic Jacobi
    polynomials with weight (1-x)^a (1+x)^b on (-1, 1).

    beta_0 is the total mass of the weight.  The orthonormal family satisfies
    sqrt(beta_{k+1}) p_{k+1} = (x - alpha_k) p_k - sqrt(beta_k) p_{k-1}.
    """
    if a <= -1 or b <= -1:
        raise ValueError("Jacobi weight exponents must be > -1")
    k = np.arange(n, dtype=float)
    ab = a + b
    alpha = np.empty(n)
    beta = np.empty(n)
    alpha[0] = (b - a) / (ab + 2)
    beta[0] = np.exp((ab + 1) * log(2.0) + betaln(a + 1, b + 1))
    if n > 1:
        kk = k[1:]
        alpha[1:] = (b * b - a * a) / ((2 * kk + ab) * (2 * kk + ab + 2))
        s = 2 * kk + ab
        beta[1:] = 4 * kk * (kk + a) * (kk + b) * (kk + ab) / (s * s * (s * s - 1))
    return alpha, beta


def jacobi_poly_orthonormal(n: int, a: float, b: float, x):
    """Evaluate the degree-n Jacobi polynomial orthonormal w.r.t.
    (1-x)^a (1+x)^b on (-1, 1).

    Runs the three-term recurrence on the orthonormal family directly, which
    stays well scaled up to n ~ 2000; no Gamma ratios are formed.
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    alpha, beta = jacobi_recurrence(n + 2, a, b)
    x = np.asarray(x, dtype=float)
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1.0 / np.sqrt(beta[0]))
    for k in range(n):
        p, p_prev = ((x - alpha[k]) * p - np.sqrt(beta[k]) * p_prev) / np.sqrt(beta[k + 1]), p
    return p if p.ndim else float(p)


def jacobi_orthonormal_table(nmax: int, a: float, b: float, x) -> np.ndarray:
    """Table p_k(x) for k = 0..nmax-1, shape (nmax, len(x))."""
    alpha, beta = jacobi_recurrence(nmax + 1, a, b)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    table = np.empty((nmax, x.size))
    table[0] = 1.0 / np.sqrt(beta[0])
    if nmax > 1:
        table[1] = (x - alpha[0]) * table[0] / np.sqrt(beta[1])
    for k in range(2, nmax):
        table[k] = ((x - alpha[k - 1]) * table[k - 1]
                    - np.sqrt(beta[k - 1]) * table[k - 2]) / np.sqrt(beta[k])
    return table


def gauss_jacobi(size: int, a: float, b: float) -> QuadratureRule:
    """Gauss-Jacobi rule by Golub-Welsch: nodes are eigenvalues of the
    symmetric recurrence matrix, weights come from first eigenvector rows."""
    if size < 1:
        raise ValueError("size must be >= 1")
    if size > 100_000:
        raise ValueError("size larger than 1e5 not supported")
    alpha, beta = jacobi_recurrence(size, a, b)
    nodes, vecs = symtridiag_eigen(alpha, np.sqrt(beta[1:]))
    weights = beta[0] * vecs[0] ** 2
    if np.any(weights <= 0) or np.any(np.diff(nodes) <= 0):
        raise NumericsError("Golub-Welsch produced an invalid rule")
    if nodes[0] <= -1 or nodes[-1] >= 1:
        raise NumericsError("quadrature nodes escaped the open interval")
    return QuadratureRule(a=a, b=b, interval=(-1.0, 1.0), nodes=nodes, weights=weights)


def gauss_legendre_01(size: int) -> QuadratureRule:
    """Gauss-Legendre rule mapped to (0, 1) with Lebesgue weight."""
    base = gauss_jacobi(size, 0.0, 0.0)
    return QuadratureRule(
        a=0.0,
        b=0.0,
        interval=(0.0, 1.0),
        nodes=(base.nodes + 1.0) / 2.0,
        weights=base.weights / 2.0,
    )


# ---------------------------------------------------------------------------
# symmetric tridiagonal eigensolver
# ---------------------------------------------------------------------------

def symtridiag_eigen(diag, offdiag) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a symmetric tridiagonal matrix.

    Returns ascending eigenvalues and the orthonormal eigenvector matrix
    (columns).  Backed by LAPACK *stev*, i.e. implicit-shift QL/QR with
    Wilkinson shifts; deterministic for a given input.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    if diag.ndim != 1 or diag.size < 1:
        raise ValueError("diag must be a nonempty 1-d sequence")
    if offdiag.size != diag.size - 1:
        raise ValueError("offdiag must have length n-1")
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(offdiag))):
        raise ValueError("matrix entries must be finite")
    if diag.size == 1:
        return diag.copy(), np.ones((1, 1))
    try:
        w, v = eigh_tridiagonal(diag, offdiag, lapack_driver="stev")
    except LinAlgError as exc:
        raise NumericsError(f"tridiagonal eigensolver did not converge: {exc}") from exc
    return w, v


# ---------------------------------------------------------------------------
# Bessel function of the first kind, real order >= -1/2
# ---------------------------------------------------------------------------

_SERIES_CUT = 9.0
_ASYM_CUT = 18.5


def _bessel_series(order: float, x: np.ndarray) -> np.ndarray:
    # ascending series, summed until terms vanish relative to the partial sum
    q = 0.25 * x * x
    with np.errstate(divide="ignore"):
        lead = np.where(
            x > 0,
            np.exp(order * np.log(np.where(x > 0, 0.5 * x, 1.0)) - lgamma(order + 1)),
            1.0 if order == 0 else (0.0 if order > 0 else np.inf),
        )
    term = np.ones_like(x)
    acc = np.ones_like(x)
    for m in range(1, 200):
        term = term * (-q) / (m * (m + order))
        acc = acc + term
        if np.all(np.abs(term) <= 1e-18 * np.abs(acc) + 1e-300):
            break
    return lead * acc


def _bessel_asymptotic(order: float, x: np.ndarray) -> np.ndarray:
    # Hankel expansion; caller guarantees x >= max(18.5, order^2).  The series
    # is asymptotic, so each element stops at its smallest term.
    mu = 4.0 * order * order
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    prev_mag = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 200):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(term)
        active &= mag < prev_mag
        if not np.any(active):
            break
        contrib = np.where(active, term, 0.0)
        if k % 2 == 1:
            q = q + ((-1.0) ** ((k - 1) // 2)) * contrib
        else:
            p = p + ((-1.0) ** (k // 2)) * contrib
        prev_mag = mag
        if np.all(mag[active] < 1e-17):
            break
    w = x - (0.5 * order + 0.25) * pi
    return np.sqrt(2.0 / (pi * x)) * (p * np.cos(w) - q * np.sin(w))


def _bessel_miller(order: float, x: np.ndarray) -> np.ndarray:
    """Downward recurrence normalized by the Neumann series
    (x/2)^f = sum_k (f+2k) Gamma(f+k)/k! J_{f+2k}(x), f = frac(order)."""
    neg = order < 0.0
    nint = 0 if neg else int(np.floor(order))
    frac = order - np.floor(order)
    top = int(np.max(x) + abs(order)) + 40 + int(6.0 * (np.max(x) + abs(order)) ** (1.0 / 3.0))
    jp = np.zeros_like(x)
    jc = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    target = np.zeros_like(x)
    t0 = np.zeros_like(x)
    t1 = np.zeros_like(x)
    for m in range(top, 0, -1):
        jp, jc = jc, 2.0 * (frac + m) / x * jc - jp
        if m - 1 == nint:
            target = jc.copy()
        if m - 1 == 0:
            t0 = jc.copy()
        if m - 1 == 1:
            t1 = jc.copy()
        if (m - 1) % 2 == 0:
            k = (m - 1) // 2
            if frac == 0.0:
                norm = norm + (2.0 if k > 0 else 1.0) * jc
            else:
                norm = norm + (frac + 2 * k) * np.exp(lgamma(frac + k) - lgamma(k + 1.0)) * jc
        big = np.abs(jc) > 1e250
        if np.any(big):
            for arr in (jp, jc, norm, target, t0, t1):
                arr[big] *= 1e-250
    scale = (np.exp(frac * np.log(0.5 * x)) if frac != 0.0 else 1.0) / norm
    if neg:
        return (2.0 * frac / x * t0 - t1) * scale
    return target * scale


def bessel_j(order: float, x):
    """J_order(x) for real order >= -1/2 and 0 <= x <= 1e6.

    Three regimes: ascending series for small x, Miller downward recurrence
    through the transition zone, Hankel asymptotics for large x.  Absolute
    error stays below 1e-12 for x <= 100 and order <= 50.
    """
    order = float(order)
    if not np.isfinite(order) or order < -0.5:
        raise ValueError("order must be finite and >= -1/2")
    scalar = np.isscalar(x) or np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    if np.any(x < 0):
        raise ValueError("negative x rejected")
    if np.any(x > 1e6):
        raise ValueError("x larger than 1e6 not supported")

    out = np.empty_like(x)
    if order == 0.5:
        # exact closed form sqrt(2/(pi x)) sin x;  J_{1/2}(0) = 0
        nz = x > 0
        out[~nz] = 0.0
        out[nz] = np.sqrt(2.0 / (pi * x[nz])) * np.sin(x[nz])
        return float(out[0]) if scalar else out

    series = x <= max(_SERIES_CUT, 0.5 * order)
    asym = ~series & (x >= max(_ASYM_CUT, order * order))
    middle = ~series & ~asym
    if np.any(series):
        out[series] = _bessel_series(order, x[series])
    if np.any(asym):
        out[asym] = _bessel_asymptotic(order, x[asym])
    if np.any(middle):
        out[middle] = _bessel_miller(order, x[middle])
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# S(x) = int_x^1 sqrt((1 - q t^2)/(1 - t^2)) dt
# ---------------------------------------------------------------------------

def elliptic_S(x: float, q: float) -> float:
    """Auxiliary phase integral with the t=1 endpoint singularity removed
    by t = cos(u), giving int_0^{arccos x} sqrt(1 - q cos^2 u) du."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    if x == 1.0:
        return 0.0
    upper = float(np.arccos(x))
    val, _err = quad(lambda u: np.sqrt(1.0 - q * np.cos(u) ** 2), 0.0, upper,
                     epsabs=1e-12, epsrel=1e-12, limit=200)
    return val
