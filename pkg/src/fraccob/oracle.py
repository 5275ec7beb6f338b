r"""Numerical fractional operators used to check closed-form solutions.

Functions are sampled on a uniform grid :math:`t_j = t_0 + jh`. The
Riemann-Liouville integral over the grid part uses product trapezoidal
integration: the singular kernel :math:`(t_k - s)^{\alpha-1}` is integrated
exactly against the piecewise-linear interpolant, which gives :math:`O(h^2)`
for smooth data.

Solutions of the cobweb equations behave like :math:`t^{\gamma-1}` near the
origin, so the grid starts at :math:`t_0 > 0` and the part :math:`(0, t_0]`
is supplied as a callable (``GridFunction.history``). That part is
integrated with a fixed tanh-sinh rule, which clusters nodes doubly
exponentially at both ends and so absorbs the endpoint singularity.

The Hilfer derivative is composed as :math:`I^{b} D I^{a}` with
:math:`a = (1-\nu)(1-\mu)` and :math:`b = \nu(1-\mu)`; ``D`` is a central
difference on the grid and a five-point stencil on the history nodes.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import signal
from scipy.special import rgamma

from fraccob._quadrature import TanhSinhRule, tanh_sinh
from fraccob.errors import DomainError

__all__ = [
    "GridFunction",
    "ResidualReport",
    "hilfer_derivative",
    "hilfer_derivative_grid",
    "residual",
    "rl_integral",
]

History = Callable[[np.ndarray], np.ndarray]

#: relative step of the five-point derivative stencil on history nodes
_STENCIL_STEP = 2.0e-3
#: above this grid size the weight convolution goes through FFT
_DIRECT_CONV_MAX = 4096
#: smallest abscissa handed to a history callable
_TINY = 1e-280


@dataclass(frozen=True)
class GridFunction:
    """Samples ``values[j] = f(t0 + j*h)``.

    If ``t0 > 0``, ``history`` must evaluate ``f`` on ``(0, t0]`` (vectorized)
    so that integrals can start at the origin.
    """

    t0: float
    h: float
    values: np.ndarray
    history: History | None = None

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise DomainError("values must be a non-empty 1d array")
        if not self.h > 0:
            raise DomainError(f"step must be positive: h = {self.h}")
        if not self.t0 >= 0:
            raise DomainError(f"grid start must be non-negative: t0 = {self.t0}")
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, f: History, t0: float, h: float, n: int) -> GridFunction:
        """Sample ``f`` on ``n`` grid points and keep it as the history."""
        times = t0 + h * np.arange(n)
        return cls(t0=t0, h=h, values=f(times), history=f if t0 > 0 else None)

    @property
    def n(self) -> int:
        return self.values.size

    @cached_property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.n)

    def check_history(self) -> None:
        if self.t0 > 0 and self.history is None:
            raise DomainError(
                f"grid starts at t0 = {self.t0} > 0 but no history on (0, t0] was given"
            )


# {{{ product trapezoidal weights


def _binomial_tail(p: float, x: np.ndarray, even_only: bool) -> np.ndarray:
    """Sum of ``C(p, j) x**j`` for ``j >= 2`` (doubled even terms if ``even_only``)."""
    total = np.zeros_like(x)
    coeff = p * (p - 1) / 2
    power = x * x
    for j in range(2, 40):
        if even_only:
            if j % 2 == 0:
                total += 2 * coeff * power
        else:
            total += coeff * power
        coeff *= (p - j) / (j + 1)
        power = power * x
        if np.all(np.abs(coeff * power) < 1e-18 * np.abs(total)):
            break
    return total


def _trapezoid_weights(order: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Weights of the product trapezoidal rule, without the ``h**order`` factor.

    Returns ``(start, inner)``: ``start[k]`` multiplies ``f_0`` at ``t_k`` and
    ``inner[m]`` multiplies ``f_{k-m}``. Both are the large-``m`` stable forms
    of the usual second differences of ``m**(order + 1)``.
    """
    p = order + 1.0
    scale = rgamma(order + 2.0)
    m = np.arange(n, dtype=np.float64)

    inner = np.empty(n)
    inner[0] = 1.0
    small = (m >= 1) & (m < 10)
    ms = m[small]
    inner[small] = (ms + 1) ** p - 2 * ms**p + (ms - 1) ** p
    large = m >= 10
    ml = m[large]
    inner[large] = ml**p * _binomial_tail(p, 1.0 / ml, even_only=True)

    start = np.zeros(n)
    small = (m >= 1) & (m < 10)
    ks = m[small]
    start[small] = (ks - 1) ** p - (ks - 1 - order) * ks**order
    kl = m[large]
    start[large] = kl**p * _binomial_tail(p, -1.0 / kl, even_only=False)

    return scale * start, scale * inner


def _grid_integral(values: np.ndarray, order: float, h: float) -> np.ndarray:
    """Product trapezoidal :math:`I^{order}` from ``t_0`` at every grid point."""
    n = values.size
    start, inner = _trapezoid_weights(order, n)
    out = np.zeros(n)
    if n > 1:
        method = "direct" if n <= _DIRECT_CONV_MAX else "fft"
        conv = signal.convolve(values[1:], inner[: n - 1], mode="full", method=method)
        out[1:] = conv[: n - 1] + start[1:] * values[0]
    return h**order * out


# }}}


# {{{ history on (0, t0]

_RULE_STEP = 1.0 / 16.0


def _unit_rule() -> TanhSinhRule:
    return tanh_sinh(0.0, 1.0, step=_RULE_STEP)


def _history_integral(
    order: float,
    t0: float,
    node_values: np.ndarray,
    end_value: float,
    rule: TanhSinhRule,
    targets: np.ndarray,
) -> np.ndarray:
    r"""Kernel integral :math:`\frac{1}{\Gamma(a)}\int_0^{t_0}(t-s)^{a-1}\phi(s)\,ds`.

    ``node_values`` holds :math:`\phi` on ``rule`` (scaled to ``[0, t0]``).
    The constant :math:`\phi(t_0)` is integrated exactly so the remaining
    integrand stays bounded when ``t`` approaches ``t0``.
    """
    gap = targets - t0
    dist = gap[:, None] + rule.right[None, :]
    kernel = dist ** (order - 1.0)
    smooth = kernel @ (rule.weights * (node_values - end_value))
    exact = end_value * (targets**order - gap**order) / order
    return rgamma(order) * (smooth + exact)


def _integral_at(history: History, order: float, sigma: np.ndarray) -> np.ndarray:
    r""":math:`I^{a}\phi(\sigma)` with the integral taken over the whole ``(0, sigma]``."""
    if order == 0:
        return history(sigma)
    unit = _unit_rule()
    pts = np.outer(sigma, unit.left)
    # products that underflow sit where the integrand has no weight left
    live = pts > _TINY
    inner = np.zeros_like(pts)
    inner[live] = history(pts[live])
    at_sigma = history(sigma)
    diff = np.where(live, inner - at_sigma[:, None], 0.0)
    body = diff @ (unit.weights * unit.right ** (order - 1.0))
    return sigma**order * rgamma(order) * (body + at_sigma / order)


def _stencil_derivative(g: Callable[[np.ndarray], np.ndarray], s: np.ndarray) -> np.ndarray:
    """Fourth-order central difference with a step proportional to ``s``."""
    d = _STENCIL_STEP * s
    offsets = np.array([-2.0, -1.0, 1.0, 2.0])
    coeffs = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
    pts = s[:, None] + offsets[None, :] * d[:, None]
    vals = g(pts.ravel()).reshape(pts.shape)
    return (vals @ coeffs) / d


@dataclass(frozen=True)
class _HistoryTerms:
    """Contributions of ``(0, t0]`` needed by the Hilfer composition."""

    inner_at_grid: np.ndarray
    outer_at_grid: np.ndarray
    slope_at_t0: float


def _history_terms(
    history: History, t0: float, a: float, b: float, times: np.ndarray
) -> _HistoryTerms:
    rule = tanh_sinh(0.0, t0, step=_RULE_STEP)

    def g(sigma: np.ndarray) -> np.ndarray:
        return _integral_at(history, a, sigma)

    if a == 0:
        inner = np.zeros(times.size)
    else:
        phi_nodes = history(rule.left)
        phi_end = float(history(np.array([t0]))[0])
        inner = _history_integral(a, t0, phi_nodes, phi_end, rule, times)

    slopes = _stencil_derivative(g, np.append(rule.left, t0))
    slope_nodes, slope_t0 = slopes[:-1], float(slopes[-1])
    if b == 0:
        outer = np.zeros(times.size)
    else:
        outer = _history_integral(b, t0, slope_nodes, slope_t0, rule, times)
    return _HistoryTerms(inner_at_grid=inner, outer_at_grid=outer, slope_at_t0=slope_t0)


# }}}


# {{{ public operators


def _check_order(order: float) -> None:
    if not 0 < order < 1:
        raise DomainError(f"integral order must lie in (0, 1): order = {order}")


def _check_index(f: GridFunction, k: int) -> None:
    if not 0 <= k < f.n:
        raise DomainError(f"index {k} outside grid of {f.n} points")


def rl_integral(f: GridFunction, order: float, k: int) -> float:
    r"""Riemann-Liouville integral :math:`I^{order} f(t_k)` taken from ``t = 0``."""
    _check_order(order)
    _check_index(f, k)
    f.check_history()

    local = _grid_integral(f.values[: k + 1], order, f.h)[k]
    if f.t0 == 0:
        return float(local)

    rule = tanh_sinh(0.0, f.t0, step=_RULE_STEP)
    hist = _history_integral(
        order,
        f.t0,
        f.history(rule.left),
        float(f.values[0]),
        rule,
        np.array([f.times[k]]),
    )
    return float(local + hist[0])


def _check_orders(mu: float, nu: float) -> tuple[float, float]:
    if not 0 < mu <= 1:
        raise DomainError(f"fractional order must satisfy 0 < mu <= 1: mu = {mu}")
    if not 0 <= nu <= 1:
        raise DomainError(f"Hilfer type must satisfy 0 <= nu <= 1: nu = {nu}")
    return (1.0 - nu) * (1.0 - mu), nu * (1.0 - mu)


def _valid_range(f: GridFunction) -> tuple[int, int]:
    first = 0 if f.t0 > 0 else 2
    return first, f.n - 2


def hilfer_derivative_grid(
    f: GridFunction, mu: float, nu: float
) -> tuple[np.ndarray, np.ndarray]:
    r"""Hilfer derivative :math:`D^{\mu,\nu} f` at every admissible grid index.

    Returns ``(indices, values)``. Admissible indices leave one point to the
    right for the central difference; without history the first two points are
    also excluded.
    """
    a, b = _check_orders(mu, nu)
    f.check_history()
    first, last = _valid_range(f)
    if last < first:
        raise DomainError(f"grid of {f.n} points is too short")
    h = f.h

    terms = None
    if f.t0 > 0:
        terms = _history_terms(f.history, f.t0, a, b, f.times)

    g = f.values.copy() if a == 0 else _grid_integral(f.values, a, h)
    if terms is not None:
        g += terms.inner_at_grid

    slope = np.empty(f.n - 1)
    slope[1:] = (g[2:] - g[:-2]) / (2 * h)
    if terms is not None:
        slope[0] = terms.slope_at_t0
    else:
        slope[0] = (-3 * g[0] + 4 * g[1] - g[2]) / (2 * h)

    if b == 0:
        out = slope
    else:
        out = _grid_integral(slope, b, h)
        if terms is not None:
            out += terms.outer_at_grid[: f.n - 1]

    idx = np.arange(first, last + 1)
    return idx, out[idx]


def hilfer_derivative(f: GridFunction, mu: float, nu: float, k: int) -> float:
    r"""Hilfer derivative :math:`I^{\nu(1-\mu)} D I^{(1-\nu)(1-\mu)} f` at ``t_k``.

    ``mu = 1`` is accepted and reduces to the first derivative.

    :raises DomainError: if ``k`` leaves no room for the central difference.
    """
    _check_orders(mu, nu)
    first, last = _valid_range(f)
    if not first <= k <= last:
        raise DomainError(f"index {k} outside the admissible range [{first}, {last}]")
    prefix = GridFunction(f.t0, f.h, f.values[: k + 2], f.history)
    _, values = hilfer_derivative_grid(prefix, mu, nu)
    return float(values[-1])


# }}}


# {{{ residual of the cobweb equation


@dataclass(frozen=True)
class ResidualReport:
    times: np.ndarray
    residuals: np.ndarray
    max_residual: float
    grid_h: float


def residual(d, c: float, t_range: tuple[float, float], h: float) -> ResidualReport:
    r"""Pointwise :math:`|D^{\mu,\nu}p - (\lambda p + \xi)|` for the closed form.

    ``d`` is a :class:`fraccob.cobweb.DerivedParams`. The sampled grid
    starts about half way to ``t_range[0]`` and reaches one step past
    ``t_range[1]``; the solution before the grid enters through the history
    quadrature. Product integration carries an error of the form
    :math:`h^2 (t - t_0)^{a}` whose derivative is not uniformly
    :math:`O(h^2)` next to the grid start, so residuals are reported only
    from ``t_range[0]`` on, a fixed distance away from it.
    """
    from fraccob.cobweb import price

    start, end = map(float, t_range)
    if not 0 < start < end:
        raise DomainError(f"need 0 < start < end: {t_range}")
    if not h > 0:
        raise DomainError(f"step must be positive: h = {h}")
    lead = int(start / (2 * h))
    if lead < 1:
        raise DomainError(f"step {h} does not fit before t = {start}")
    span = int(np.ceil((end - start) / h - 1e-9))
    if span < 16:
        raise DomainError(f"step {h} leaves fewer than 16 interior points")
    n = lead + span + 2

    def p(t: np.ndarray) -> np.ndarray:
        return price(d, c, t)

    f = GridFunction.sample(p, start - lead * h, h, n)
    idx, lhs = hilfer_derivative_grid(f, d.mu, d.nu)
    lhs, idx = lhs[idx >= lead], idx[idx >= lead]
    rhs = d.lam * f.values[idx] + d.xi
    res = np.abs(lhs - rhs)
    return ResidualReport(
        times=f.times[idx],
        residuals=res,
        max_residual=float(res.max()),
        grid_h=h,
    )


# }}}
