"""Univariate adaptive quadrature, grid-based root finding and scalar minimization.

The integrator is a vectorized adaptive Gauss-Kronrod (G7/K15) scheme. All
active subintervals are evaluated in one call of the integrand, so ``f`` must
accept a 1-D array of abscissae. It may return either an array of the same
shape (scalar integrand) or an array with extra trailing dimensions (a vector
of integrands sharing one subdivision).

Infinite endpoints are removed by monotone changes of variable:

* ``[a, inf)``     x = a + t / (1 - t),      t in [0, 1)
* ``(-inf, b]``    x = b - (1 - t) / t,      t in (0, 1]
* ``(-inf, inf)``  x = t / (1 - t**2),       t in (-1, 1)

Gauss-Kronrod nodes are interior, so the singular endpoints of the maps are
never evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NonConvergence, NonFiniteIntegrand, NonFiniteObjective

__all__ = [
    "Interval",
    "QuadSettings",
    "integrate",
    "minimize_scalar",
    "find_roots",
]

# Kronrod 15-point abscissae (non-negative half) and weights; every other
# abscissa starting at index 1 is a Gauss 7-point node.
_XK_HALF = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK_HALF = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG_HALF = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_XK = np.concatenate([-_XK_HALF[:-1], _XK_HALF[::-1]])
_WK = np.concatenate([_WK_HALF[:-1], _WK_HALF[::-1]])
_WG = np.zeros(15)
_WG[1::2] = np.concatenate([_WG_HALF[:-1], _WG_HALF[::-1]])


@dataclass(frozen=True)
class Interval:
    """Closed real interval; either endpoint may be infinite."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or not lo < hi:
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def clip(self, x):
        return np.clip(x, self.lo, self.hi)


@dataclass(frozen=True)
class QuadSettings:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_SETTINGS = QuadSettings()


def _variable_map(domain: Interval):
    """Return (t_lo, t_hi, x_of_t, dx_dt, t_of_x) for the domain."""
    lo, hi = domain.lo, domain.hi
    if math.isfinite(lo) and math.isfinite(hi):
        ident = lambda t: t  # noqa: E731
        return lo, hi, ident, np.ones_like, ident
    if math.isfinite(lo):
        def x_of_t(t):
            return lo + t / (1.0 - t)

        def dx_dt(t):
            return 1.0 / (1.0 - t) ** 2

        def t_of_x(x):
            u = x - lo
            return u / (1.0 + u)

        return 0.0, 1.0, x_of_t, dx_dt, t_of_x
    if math.isfinite(hi):
        def x_of_t(t):
            return hi - (1.0 - t) / t

        def dx_dt(t):
            return 1.0 / t ** 2

        def t_of_x(x):
            return 1.0 / (1.0 + (hi - x))

        return 0.0, 1.0, x_of_t, dx_dt, t_of_x

    def x_of_t(t):
        return t / (1.0 - t * t)

    def dx_dt(t):
        return (1.0 + t * t) / (1.0 - t * t) ** 2

    def t_of_x(x):
        x = np.asarray(x, dtype=float)
        safe = np.where(x == 0.0, 1.0, x)
        return np.where(x == 0.0, 0.0, (-1.0 + np.sqrt(1.0 + 4.0 * safe * safe)) / (2.0 * safe))

    return -1.0, 1.0, x_of_t, dx_dt, t_of_x


def _gk15(g, a: np.ndarray, b: np.ndarray):
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    t = center[:, None] + half[:, None] * _XK[None, :]
    vals = np.asarray(g(t.ravel()), dtype=float)
    vals = vals.reshape((a.size, 15) + vals.shape[1:])
    if not np.all(np.isfinite(vals)):
        bad = t.reshape(-1)[np.flatnonzero(~np.isfinite(vals.reshape(a.size * 15, -1)).any(axis=1))[:1]]
        raise NonFiniteIntegrand(f"integrand not finite at transformed node(s) {bad}")
    extra = (slice(None),) + (None,) * (vals.ndim - 2)
    kron = np.tensordot(vals, _WK, axes=([1], [0])) * half[extra]
    gauss = np.tensordot(vals, _WG, axes=([1], [0])) * half[extra]
    return kron, np.abs(kron - gauss)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    domain: Interval,
    settings: QuadSettings = DEFAULT_SETTINGS,
    *,
    breakpoints: Sequence[float] = (),
):
    """Integrate ``f`` over ``domain``.

    ``breakpoints`` are interior points where the integrand has kinks or
    jumps (policy boundaries, thresholds); they seed the initial partition.
    A narrow peak far from every node of that partition can be missed
    entirely, so pass its location as a breakpoint.
    Returns a float, or an array for vector-valued integrands.

    Raises NonConvergence when the estimated error cannot be brought below
    ``max(abs_tol, rel_tol * |I|)`` (componentwise) within
    ``settings.max_subdivisions`` subintervals.
    """
    t_lo, t_hi, x_of_t, dx_dt, t_of_x = _variable_map(domain)

    def g(t):
        x = x_of_t(t)
        fx = np.asarray(f(x), dtype=float)
        jac = dx_dt(t)
        return fx * jac.reshape(jac.shape + (1,) * (fx.ndim - 1))

    cuts = sorted({float(p) for p in breakpoints if domain.lo < p < domain.hi})
    edges = np.concatenate([[t_lo], np.asarray(t_of_x(np.array(cuts)), dtype=float).ravel(), [t_hi]])
    edges = np.unique(edges)
    a, b = edges[:-1], edges[1:]

    with np.errstate(over="ignore", invalid="ignore", divide="ignore", under="ignore"):
        est, err = _gk15(g, a, b)
        while True:
            total = est.sum(axis=0)
            tol = np.maximum(settings.abs_tol, settings.rel_tol * np.abs(total))
            err_total = err.sum(axis=0)
            if np.all(err_total <= tol):
                return float(total) if np.ndim(total) == 0 else total
            n = a.size
            if n >= settings.max_subdivisions:
                raise NonConvergence(
                    f"error {np.max(err_total):.3g} above tolerance after {n} subintervals"
                )
            score = err / tol
            if score.ndim > 1:
                score = score.reshape(n, -1).max(axis=1)
            split = score > 1.0 / n
            split[np.argmax(score)] = True
            budget = settings.max_subdivisions - n
            if split.sum() > budget:
                keep = np.argsort(score)[::-1][:budget]
                split[:] = False
                split[keep] = True
            mid = 0.5 * (a[split] + b[split])
            na = np.concatenate([a[split], mid])
            nb = np.concatenate([mid, b[split]])
            if np.any(na >= nb) or np.any(mid <= a[split]) or np.any(mid >= b[split]):
                raise NonConvergence("subintervals collapsed below machine resolution")
            new_est, new_err = _gk15(g, na, nb)
            a = np.concatenate([a[~split], na])
            b = np.concatenate([b[~split], nb])
            est = np.concatenate([est[~split], new_est])
            err = np.concatenate([err[~split], new_err])


def _grid(bracket: Interval, n: int, scale: str) -> np.ndarray:
    if not bracket.is_finite:
        raise ValueError("bracket must be finite")
    if scale == "linear":
        return np.linspace(bracket.lo, bracket.hi, n)
    if scale == "log":
        if bracket.lo <= 0:
            raise ValueError("log-scale bracket must be positive")
        return np.geomspace(bracket.lo, bracket.hi, n)
    raise ValueError(f"unknown scale {scale!r}")


def _eval_many(f, xs: np.ndarray, vectorized: bool) -> np.ndarray:
    if vectorized:
        return np.asarray(f(xs), dtype=float).reshape(xs.shape)
    return np.array([float(f(x)) for x in xs])


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def minimize_scalar(
    f: Callable[[float], float],
    bracket: Interval,
    grid_points: int = 101,
    *,
    scale: str = "linear",
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-12,
    vectorized: bool = False,
) -> tuple[float, float]:
    """Grid scan followed by golden-section refinement around the best node.

    The refinement runs in the grid's coordinate (``log`` scale refines in
    log x) between the neighbours of the best grid point, until the bracket
    width drops below ``rel_tol * |argmin| + abs_tol``. The returned value is
    never worse than the best grid value. Ties on the grid go to the
    smallest abscissa.
    """
    if grid_points < 3:
        raise ValueError("grid_points must be >= 3")
    xs = _grid(bracket, grid_points, scale)
    ys = _eval_many(f, xs, vectorized)
    if not np.all(np.isfinite(ys)):
        raise NonFiniteObjective(f"objective not finite at x={xs[~np.isfinite(ys)][0]}")
    i = int(np.argmin(ys))
    best_x, best_y = float(xs[i]), float(ys[i])

    fwd = np.log if scale == "log" else (lambda v: v)
    inv = np.exp if scale == "log" else (lambda v: v)

    def obj(u):
        y = float(f(float(inv(u)))) if not vectorized else float(np.asarray(f(np.array([inv(u)])))[0])
        if not math.isfinite(y):
            raise NonFiniteObjective(f"objective not finite at x={inv(u)}")
        return y

    lo = fwd(xs[max(i - 1, 0)])
    hi = fwd(xs[min(i + 1, xs.size - 1)])
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = obj(c), obj(d)
    for _ in range(200):
        if abs(inv(hi) - inv(lo)) < rel_tol * abs(best_x) + abs_tol:
            break
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = obj(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = obj(d)
    for u, y in ((c, fc), (d, fd)):
        if y < best_y:
            best_x, best_y = float(inv(u)), y
    return best_x, best_y


def find_roots(
    f: Callable[[float], float],
    bracket: Interval,
    grid_points: int = 201,
    *,
    scale: str = "linear",
    xtol: float = 1e-12,
    vectorized: bool = False,
) -> list[float]:
    """All sign changes of ``f`` detectable on a grid, refined by bisection.

    Completeness is not guaranteed: two roots closer together than the grid
    spacing (or a double root) produce no sign change and are missed. NaN
    grid values are treated as unknown and never bracket a root.
    """
    xs = _grid(bracket, grid_points, scale)
    ys = _eval_many(f, xs, vectorized)
    sgn = np.sign(ys)
    roots: list[float] = []
    for k in np.flatnonzero(sgn == 0):
        roots.append(float(xs[k]))
    valid = np.isfinite(ys)
    pairs = np.flatnonzero(valid[:-1] & valid[1:] & (sgn[:-1] * sgn[1:] < 0))
    for k in pairs:
        lo, hi = float(xs[k]), float(xs[k + 1])
        flo = ys[k]
        for _ in range(200):
            if hi - lo <= xtol * max(1.0, abs(lo)):
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            fm = float(_eval_many(f, np.array([mid]), vectorized)[0])
            if fm == 0.0:
                lo = hi = mid
                break
            if np.sign(fm) == np.sign(flo):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return sorted(roots)
