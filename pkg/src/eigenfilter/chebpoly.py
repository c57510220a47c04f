"""Minimax filter polynomial R_ell, its reflection variant, and oracles.

R_ell(x; gap) is the ratio of shifted Chebyshev polynomials that is 1 at x=0
and uniformly small on D_gap = [-1, -gap] ∪ [gap, 1]. It is evaluated in the
log domain: the denominator grows like exp(sqrt(2)·ell·gap), so the naive
ratio overflows long before ell reaches the regimes the solvers need.

An independent linear-programming oracle (discretized minimax over even
polynomials) is provided so optimality is tested against something that knows
nothing about the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.fft import dct
from scipy.optimize import linprog

# Above this gap the exponential bound 2·exp(-sqrt(2)·ell·gap) no longer
# holds; bound and degree computations clamp to it.
BOUND_GAP_CAP = 1.0 / math.sqrt(12.0)


def cheb_eval(ell: int, x: float) -> float:
    """Chebyshev polynomial T_ell(x), valid inside and outside [-1, 1]."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    if abs(x) <= 1.0:
        return float(math.cos(ell * math.acos(x)))
    sign = 1.0 if (x > 0.0 or ell % 2 == 0) else -1.0
    return sign * float(math.cosh(ell * math.acosh(abs(x))))


def _log_cosh(t: float) -> float:
    # log(cosh t) without overflow for large t
    return t + math.log1p(math.exp(-2.0 * t)) - math.log(2.0)


@dataclass(frozen=True)
class FilterSpec:
    """Half-degree ell (total degree 2·ell) and gap of a filter polynomial."""

    ell: int
    gap: float
    kind: str = "filter"

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError("ell must be a positive integer")
        if not 0.0 < self.gap < 1.0:
            raise ValueError("gap must lie in (0, 1)")
        if self.kind not in ("filter", "reflection"):
            raise ValueError(f"unknown kind {self.kind!r}")

    @property
    def bound_gap(self) -> float:
        return min(self.gap, BOUND_GAP_CAP)

    @property
    def error_bound(self) -> float:
        """2·exp(-sqrt(2)·ell·gap) with the gap capped for validity."""
        return 2.0 * math.exp(-math.sqrt(2.0) * self.ell * self.bound_gap)


def filter_eval(spec: FilterSpec, x: float) -> float:
    """R_ell(x; gap), exactly 1 at x = 0."""
    if spec.kind != "filter":
        raise ValueError("filter_eval needs kind='filter'")
    ell, gap = spec.ell, spec.gap
    g2 = gap * gap
    y = -1.0 + 2.0 * (x * x - g2) / (1.0 - g2)
    y0 = -1.0 - 2.0 * g2 / (1.0 - g2)
    t0 = math.acosh(-y0)
    log_den = _log_cosh(ell * t0)  # |T_ell(y0)|, sign (-1)^ell
    par = 1.0 if ell % 2 == 0 else -1.0
    if y < -1.0:
        # |x| < gap: both numerator and denominator carry (-1)^ell
        t = math.acosh(-y)
        return math.exp(_log_cosh(ell * t) - log_den)
    if y <= 1.0:
        return par * math.cos(ell * math.acos(y)) * math.exp(-log_den)
    return par * math.exp(_log_cosh(ell * math.acosh(y)) - log_den)


@lru_cache(maxsize=256)
def _reflection_norm(ell: int, gap: float) -> float:
    """max over [-1,1] of |2·R_ell - 1|: dense grid then golden-section."""
    spec = FilterSpec(ell, gap, "filter")

    def g(x: float) -> float:
        return abs(2.0 * filter_eval(spec, x) - 1.0)

    xs = np.linspace(-1.0, 1.0, 10_001)
    vals = np.array([g(x) for x in xs])
    i = int(np.argmax(vals))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, xs.size - 1)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = g(c), g(d)
    while b - a > 1e-12:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = g(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = g(d)
    return max(vals[i], fc, fd)


def reflection_eval(spec: FilterSpec, x: float) -> float:
    """S_ell(x; gap) = (2·R_ell - 1) normalized to sup-norm 1 on [-1, 1]."""
    if spec.kind != "reflection":
        raise ValueError("reflection_eval needs kind='reflection'")
    base = FilterSpec(spec.ell, spec.gap, "filter")
    return (2.0 * filter_eval(base, x) - 1.0) / _reflection_norm(spec.ell, spec.gap)


def degree_for_accuracy(gap: float, eps: float) -> int:
    """Smallest ell with 2·exp(-sqrt(2)·ell·gap) <= eps (gap capped)."""
    if eps >= 2.0:
        return 0
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if gap <= 0.0:
        raise ValueError("gap must be positive")
    g = min(gap, BOUND_GAP_CAP)
    return int(math.ceil(math.log(2.0 / eps) / (math.sqrt(2.0) * g)))


@dataclass(frozen=True)
class ChebSeries:
    """Coefficients in the T_k basis with a declared parity."""

    coefficients: np.ndarray
    parity: str = "none"

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise ValueError("invalid coefficient vector")
        if self.parity == "even" and np.any(c[1::2] != 0.0):
            raise ValueError("even series has nonzero odd coefficients")
        if self.parity == "odd" and np.any(c[0::2] != 0.0):
            raise ValueError("odd series has nonzero even coefficients")
        if self.parity not in ("even", "odd", "none"):
            raise ValueError(f"unknown parity {self.parity!r}")
        c = np.array(c, copy=True)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def __call__(self, x):
        return np.polynomial.chebyshev.chebval(x, self.coefficients)


def cheb_interp_coeffs(fn, degree: int) -> np.ndarray:
    """Coefficients of the degree-`degree` interpolant at Chebyshev extrema.

    Uses the type-I DCT of the samples at x_k = cos(pi k / degree); exact for
    polynomials of degree <= `degree`.
    """
    if degree < 1:
        return np.array([float(fn(1.0))])
    k = np.arange(degree + 1)
    xs = np.cos(np.pi * k / degree)
    vals = np.array([float(fn(x)) for x in xs])
    c = dct(vals, type=1) / degree
    c[0] /= 2.0
    c[-1] /= 2.0
    return c


def filter_cheb_coeffs(spec: FilterSpec) -> ChebSeries:
    """Exact expansion of R_ell into the first 2·ell+1 Chebyshev polynomials."""
    base = FilterSpec(spec.ell, spec.gap, "filter")
    c = cheb_interp_coeffs(lambda x: filter_eval(base, x), 2 * spec.ell)
    c[1::2] = 0.0  # R_ell is even; interpolation residue is pure roundoff
    return ChebSeries(c, parity="even")


def reflection_cheb_coeffs(spec: FilterSpec) -> ChebSeries:
    """Expansion of the normalized reflection polynomial S_ell."""
    rspec = FilterSpec(spec.ell, spec.gap, "reflection")
    c = cheb_interp_coeffs(lambda x: reflection_eval(rspec, x), 2 * spec.ell)
    c[1::2] = 0.0
    return ChebSeries(c, parity="even")


def _lp_minimax(ell: int, gap: float, grid_size: int) -> float:
    # Even polynomial p = sum_j a_j T_{2j}, j = 0..ell, with p(0) = 1.
    # Minimize t subject to |p(x_i)| <= t on a grid over [gap, 1] (evenness
    # makes the negative half redundant).
    xs = np.linspace(gap, 1.0, grid_size)
    theta = np.arccos(xs)
    j = np.arange(ell + 1)
    basis = np.cos(2.0 * np.outer(theta, j))  # T_{2j}(x_i)
    ncoef = ell + 1
    # variables: a_0..a_ell, t
    a_ub = np.zeros((2 * grid_size, ncoef + 1))
    a_ub[:grid_size, :ncoef] = basis
    a_ub[grid_size:, :ncoef] = -basis
    a_ub[:, ncoef] = -1.0
    b_ub = np.zeros(2 * grid_size)
    a_eq = np.zeros((1, ncoef + 1))
    a_eq[0, :ncoef] = (-1.0) ** j  # T_{2j}(0)
    b_eq = np.array([1.0])
    cost = np.zeros(ncoef + 1)
    cost[ncoef] = 1.0
    bounds = [(None, None)] * ncoef + [(0.0, None)]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                  bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(
            f"minimax LP failed (status {res.status}, {res.nit} iterations): "
            f"{res.message}"
        )
    return float(res.fun)


def minimax_oracle(ell: int, gap: float, grid_size: int | None = None) -> float:
    """Discretized-LP minimax value over even degree-2ell polynomials p(0)=1.

    The grid doubles until the optimum moves by less than 1e-8, so the value
    is an independent reference for the closed-form filter's optimality.
    """
    if ell < 1:
        raise ValueError("ell must be positive")
    if not 0.0 < gap < 1.0:
        raise ValueError("gap must lie in (0, 1)")
    n = max(grid_size or 0, 64 * ell, 256)
    t_prev = _lp_minimax(ell, gap, n)
    for _ in range(8):
        n *= 2
        t = _lp_minimax(ell, gap, n)
        if abs(t - t_prev) < 1e-8:
            return t
        t_prev = t
    return t_prev
