r"""Linear cobweb models with a Hilfer fractional derivative.

Demand-side model::

    D(t) = alpha + beta * (p(t) + D^{mu,nu} p(t))
    S(t) = alpha1 + beta1 * p(t)

Supply-side model::

    D(t) = alpha + beta * p(t)
    S(t) = alpha1 + beta1 * (p(t) + delta * D^{mu,nu} p(t))

Market clearing ``D = S`` reduces either model to the fractional relaxation
equation :math:`D^{\mu,\nu} p = \lambda p + \xi`, whose solution is

.. math::

    p(t) = C t^{\gamma-1} E_{\mu,\gamma}(\lambda t^\mu)
        - \frac{\xi}{\lambda} + \frac{\xi}{\lambda} E_\mu(\lambda t^\mu),
    \qquad \gamma = \mu + \nu - \mu\nu,

with :math:`C = (I^{(1-\nu)(1-\mu)} p)(0^+)`. The initial constant ``c`` is
always an explicit input; the usual convention is to pass the initial price
:math:`p_0`, which is exact for the Caputo case :math:`\nu = 1`.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from fraccob.errors import DegenerateModel, DomainError
from fraccob.mlf import DEFAULT_CONFIG, MLConfig, mittag_leffler

__all__ = [
    "DemandModel",
    "DerivedParams",
    "StabilityReport",
    "SupplyModel",
    "TimeGrid",
    "Trajectory",
    "caputo_price",
    "classify",
    "derive",
    "derive_demand",
    "derive_supply",
    "gamma_param",
    "price",
    "price_at",
    "rl_price",
    "trajectory",
]

ModelTag = Literal["demand", "supply"]


def _check_orders(mu: float, nu: float) -> None:
    if not 0 < mu <= 1:
        raise DomainError(f"fractional order must satisfy 0 < mu <= 1: mu = {mu}")
    if not 0 <= nu <= 1:
        raise DomainError(f"Hilfer type must satisfy 0 <= nu <= 1: nu = {nu}")


def gamma_param(mu: float, nu: float) -> float:
    """Composite order :math:`\\gamma = \\mu + \\nu - \\mu\\nu` in ``(0, 1]``.

    The endpoints ``nu = 0`` and ``nu = 1`` return ``mu`` and ``1`` exactly.
    """
    _check_orders(mu, nu)
    if nu == 1:
        return 1.0
    if nu == 0:
        return float(mu)
    # rounding can push the sum just outside [mu, 1]
    return min(1.0, max(float(mu), mu + nu - mu * nu))


# {{{ models


@dataclass(frozen=True)
class DemandModel:
    """Cobweb model with the fractional derivative in the demand function."""

    alpha: float
    beta: float
    alpha1: float
    beta1: float
    mu: float
    nu: float
    #: Hilfer initial constant :math:`(I^{(1-\nu)(1-\mu)} p)(0^+)`
    c: float

    def __post_init__(self) -> None:
        if self.beta == 0:
            raise DegenerateModel("demand slope beta must be nonzero")
        if self.beta == self.beta1:
            raise DegenerateModel(f"beta == beta1 == {self.beta} leaves no price dynamics")
        _check_orders(self.mu, self.nu)


@dataclass(frozen=True)
class SupplyModel(DemandModel):
    """Cobweb model with the fractional derivative in the supply function."""

    #: weight of the fractional term in the supply function
    delta: float = 1.0

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.delta == 0:
            raise DegenerateModel("supply weight delta must be nonzero")
        if self.beta1 == 0:
            raise DegenerateModel("supply slope beta1 must be nonzero")


@dataclass(frozen=True)
class DerivedParams:
    """Coefficients of the reduced equation :math:`D^{\\mu,\\nu}p = \\lambda p + \\xi`."""

    lam: float
    xi: float
    mu: float
    nu: float
    gamma: float
    #: equilibrium price :math:`(\alpha_1 - \alpha) / (\beta - \beta_1)`
    p_e: float
    #: the criterion :math:`\beta_1 / \beta < 1`
    stable: bool
    model: ModelTag = "demand"


def _equilibrium(m: DemandModel) -> tuple[float, bool]:
    return (m.alpha1 - m.alpha) / (m.beta - m.beta1), m.beta1 / m.beta < 1


def derive_demand(m: DemandModel) -> DerivedParams:
    r"""Reduce the demand-side model.

    Here :math:`\lambda = (\beta_1 - \beta)/\beta` and
    :math:`\xi = (\alpha_1 - \alpha)/\beta`.
    """
    p_e, stable = _equilibrium(m)
    return DerivedParams(
        lam=(m.beta1 - m.beta) / m.beta,
        xi=(m.alpha1 - m.alpha) / m.beta,
        mu=m.mu,
        nu=m.nu,
        gamma=gamma_param(m.mu, m.nu),
        p_e=p_e,
        stable=stable,
        model="demand",
    )


def derive_supply(m: SupplyModel) -> DerivedParams:
    r"""Reduce the supply-side model.

    Clearing :math:`\alpha + \beta p = \alpha_1 + \beta_1 (p + \delta D^{\mu,\nu}p)`
    gives :math:`\varrho = (\beta - \beta_1)/(\delta\beta_1)` and
    :math:`\eta = (\alpha - \alpha_1)/(\delta\beta_1)`. The equilibrium
    :math:`-\eta/\varrho` does not depend on :math:`\delta`.
    """
    p_e, stable = _equilibrium(m)
    scale = m.delta * m.beta1
    return DerivedParams(
        lam=(m.beta - m.beta1) / scale,
        xi=(m.alpha - m.alpha1) / scale,
        mu=m.mu,
        nu=m.nu,
        gamma=gamma_param(m.mu, m.nu),
        p_e=p_e,
        stable=stable,
        model="supply",
    )


def derive(m: DemandModel) -> DerivedParams:
    """Dispatch to :func:`derive_supply` or :func:`derive_demand`."""
    if isinstance(m, SupplyModel):
        return derive_supply(m)
    return derive_demand(m)


# }}}


# {{{ closed-form solutions


def _check_lam(d: DerivedParams) -> None:
    if d.lam == 0:
        raise DegenerateModel("lambda = 0: the closed-form solution divides by lambda")


def _times(t: np.ndarray | float, gamma: float) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise DomainError("times must be finite and non-negative")
    if gamma < 1 and np.any(t == 0):
        raise DomainError(f"t = 0 is singular for gamma = {gamma} < 1")
    return t


def _solution(
    lam: float,
    xi: float,
    mu: float,
    gamma: float,
    c: float,
    t: np.ndarray,
    cfg: MLConfig,
) -> np.ndarray:
    z = lam * t**mu
    ratio = xi / lam
    e_mu = mittag_leffler(mu, 1.0, z, cfg)
    e_gamma = e_mu if gamma == 1.0 else mittag_leffler(mu, gamma, z, cfg)
    return c * t ** (gamma - 1.0) * e_gamma - ratio + ratio * e_mu


def price(
    d: DerivedParams,
    c: float,
    t: np.ndarray | float,
    cfg: MLConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Vectorized closed-form price :math:`p(t)`; see :func:`price_at`."""
    _check_lam(d)
    t = _times(t, d.gamma)
    return _solution(d.lam, d.xi, d.mu, d.gamma, c, t, cfg)


def price_at(
    d: DerivedParams, c: float, t: float, cfg: MLConfig = DEFAULT_CONFIG
) -> float:
    r"""Price at time ``t`` from the Hilfer closed form.

    :raises DegenerateModel: if :math:`\lambda = 0`.
    :raises DomainError: if ``t <= 0`` and :math:`\gamma < 1`.
    """
    return float(price(d, c, np.array([t]), cfg)[0])


def caputo_price(
    d: DerivedParams, c0: float, t: float, cfg: MLConfig = DEFAULT_CONFIG
) -> float:
    r"""Caputo solution :math:`(C_0 + \xi/\lambda) E_\mu(\lambda t^\mu) - \xi/\lambda`.

    ``c0`` is the initial price; the form is regular at ``t = 0``.
    """
    _check_lam(d)
    t = _times(np.array([t]), 1.0)
    ratio = d.xi / d.lam
    e = mittag_leffler(d.mu, 1.0, d.lam * t**d.mu, cfg)
    return float(((c0 + ratio) * e - ratio)[0])


def rl_price(
    d: DerivedParams, c1: float, t: float, cfg: MLConfig = DEFAULT_CONFIG
) -> float:
    r"""Riemann-Liouville solution, the :math:`\gamma = \mu` case of :func:`price_at`.

    ``c1`` is :math:`(I^{1-\mu} p)(0^+)`.
    """
    _check_lam(d)
    t = _times(np.array([t]), d.mu)
    return float(_solution(d.lam, d.xi, d.mu, d.mu, c1, t, cfg)[0])


# }}}


# {{{ trajectories


@dataclass(frozen=True)
class TimeGrid:
    """Sampling times on ``[start, end]``, logarithmic by default."""

    start: float
    end: float
    points: int = 400
    log: bool = True

    def __post_init__(self) -> None:
        if not 0 < self.start:
            raise DomainError(f"grid must start after t = 0: start = {self.start}")
        if self.points < 1:
            raise DomainError(f"need at least one point: points = {self.points}")
        if self.points > 1 and not self.end > self.start:
            raise DomainError(f"empty grid [{self.start}, {self.end}]")

    def times(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.start])
        if self.log:
            return np.geomspace(self.start, self.end, self.points)
        return np.linspace(self.start, self.end, self.points)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    prices: np.ndarray
    model_tag: ModelTag
    params: DerivedParams
    c: float = 0.0
    meta: dict[str, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)


def trajectory(
    d: DerivedParams,
    c: float,
    grid: TimeGrid | Sequence[float] | np.ndarray,
    cfg: MLConfig = DEFAULT_CONFIG,
) -> Trajectory:
    """Sample :func:`price` on a time grid."""
    times = grid.times() if isinstance(grid, TimeGrid) else np.asarray(grid, dtype=np.float64)
    times = np.atleast_1d(times)
    if times.size == 0 or np.any(times <= 0):
        raise DomainError("trajectory times must be non-empty and positive")
    if np.any(np.diff(times) <= 0):
        raise DomainError("trajectory times must be strictly increasing")

    return Trajectory(
        times=times,
        prices=price(d, c, times, cfg),
        model_tag=d.model,
        params=d,
        c=c,
        meta={"mu": d.mu, "nu": d.nu, "gamma": d.gamma},
    )


# }}}


# {{{ stability


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    p_e: float
    #: predicted :math:`\lim_{t\to\infty} p(t)`, ``None`` when not convergent
    limit: float | None
    lam_negative: bool
    warning: str | None = None


def classify(d: DerivedParams) -> StabilityReport:
    r"""Apply the stability criterion :math:`\beta_1/\beta < 1`.

    Convergence to :math:`p_e = -\xi/\lambda` actually requires
    :math:`\lambda < 0`, which the criterion implies only under sign
    conditions on the slopes. Both facts are reported; a mismatch is flagged
    in ``warning`` instead of being resolved.
    """
    lam_negative = d.lam < 0
    warning = None
    if d.stable and not lam_negative:
        warning = (
            f"beta1/beta < 1 holds but lambda = {d.lam:g} >= 0; "
            "the trajectory does not settle at p_e"
        )
    elif not d.stable:
        warning = "beta1/beta >= 1: trajectory is not expected to converge"
    elif not math.isfinite(d.p_e):
        warning = "equilibrium price is not finite"

    converges = d.stable and lam_negative
    return StabilityReport(
        stable=d.stable,
        p_e=d.p_e,
        limit=d.p_e if converges else None,
        lam_negative=lam_negative,
        warning=warning,
    )


# }}}
