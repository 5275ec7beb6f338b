r"""Mittag-Leffler functions on the real line.

.. math::

    E_{\mu,\gamma}(z) = \sum_{k=0}^\infty \frac{z^k}{\Gamma(\mu k + \gamma)},
    \qquad E_\mu(z) = E_{\mu,1}(z).

Evaluation on the negative axis picks one of four regimes per argument, keyed
on :math:`X = |z|^{1/\mu}`, which controls both the cancellation in the Taylor
series (terms peak near :math:`e^{X}`) and the best accuracy the algebraic
asymptotic expansion can reach (about :math:`e^{-X}`):

* ``"series"``: compensated Taylor summation, used while :math:`X` is small.
* ``"asymptotic"``: :math:`-\sum_{k=1}^{h} z^{-k} / \Gamma(\gamma - \mu k)`,
  used for :math:`|z|` beyond the switch point once its truncation estimate
  is below ``series_tol``.
* ``"spectral"``: the real-axis Laplace representation of
  :math:`t^{\gamma-1} E_{\mu,\gamma}(-t^\mu)` for :math:`\mu \ne 1`, which fills
  the band where neither of the above is accurate in double precision.
* ``"kummer"``: for :math:`\mu = 1`, the Kummer-transformed series
  :math:`E_{1,\gamma}(-x) = e^{-x} {}_1F_1(\gamma-1; \gamma; x) / \Gamma(\gamma)`
  whose terms share one sign.

Positive arguments always use the series. Large positive arguments are
best-effort only: the function grows like :math:`\exp(z^{1/\mu})` and overflows
quickly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import exp1, gammaln, rgamma

from fraccob._quadrature import tanh_sinh
from fraccob.errors import DomainError, NonConvergence

__all__ = [
    "DEFAULT_CONFIG",
    "MLArgument",
    "MLConfig",
    "asymptotic_error_estimate",
    "asymptotic_switch",
    "mittag_leffler",
    "ml_asymptotic",
    "ml_eval",
    "ml_regime",
    "ml_series",
    "recip_gamma",
]

#: Largest :math:`|z|^{1/\mu}` for which the Taylor series is used on the
#: negative axis; cancellation costs roughly ``exp(X)`` ulps.
SERIES_MAX_X = 5.0
#: Term budget multiplier for positive arguments beyond the switch point.
POSITIVE_BUDGET_FACTOR = 20
#: Tail of the spectral integral past ``r = 1`` is cut at ``exp(-45)``.
_SPECTRAL_TAIL = 45.0
_SPECTRAL_BLOCK = 4096
_POLE_BAND = (0.8, 1.25)
_POLE_T_MAX = 600.0
#: exp(X) / mu is beyond the double range past this X on the positive axis
_OVERFLOW_X = 720.0


@dataclass(frozen=True)
class MLArgument:
    """Parameters and argument of :math:`E_{\\mu,\\gamma}(z)`."""

    mu: float
    gamma: float
    z: float

    def __post_init__(self) -> None:
        _check_parameters(self.mu, self.gamma)
        if not math.isfinite(self.z):
            raise DomainError(f"argument must be finite: z = {self.z}")


@dataclass(frozen=True)
class MLConfig:
    """Evaluation policy for Mittag-Leffler values."""

    #: Absolute truncation tolerance for the series (and target accuracy).
    series_tol: float = 1.0e-12
    #: Term cap for the Taylor series.
    max_terms: int = 500
    #: :math:`|z|` above which the asymptotic expansion may be used.
    asym_switch: float = 15.0
    #: Number of terms ``h`` kept in the asymptotic expansion.
    asym_terms: int = 6

    def __post_init__(self) -> None:
        if not self.series_tol > 0:
            raise DomainError(f"series_tol must be positive: {self.series_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1: {self.max_terms}")
        if not self.asym_switch > 0:
            raise DomainError(f"asym_switch must be positive: {self.asym_switch}")
        if self.asym_terms < 1:
            raise DomainError(f"asym_terms must be >= 1: {self.asym_terms}")


DEFAULT_CONFIG = MLConfig()


def _check_parameters(mu: float, gamma: float) -> None:
    if not 0 < mu < 2:
        raise DomainError(f"order must satisfy 0 < mu < 2: mu = {mu}")
    if not gamma > 0:
        raise DomainError(f"second parameter must be positive: gamma = {gamma}")


def recip_gamma(x: float) -> float:
    """Reciprocal gamma function, exactly zero at the poles of :math:`\\Gamma`."""
    return float(rgamma(x))


def asymptotic_switch(mu: float, cfg: MLConfig = DEFAULT_CONFIG) -> float:
    """Threshold on :math:`|z|` past which the asymptotic sum is considered.

    Small orders reach the asymptotic regime much earlier, so the switch is
    lowered to 5 for ``mu < 0.25``.
    """
    return min(cfg.asym_switch, 5.0) if mu < 0.25 else cfg.asym_switch


# {{{ regimes


def _series(
    mu: float, gamma: float, z: np.ndarray, tol: float, max_terms: int
) -> tuple[np.ndarray, np.ndarray]:
    """Neumaier-compensated Taylor sums; returns ``(values, converged)``."""
    z = np.asarray(z, dtype=np.float64)
    total = np.full(z.shape, recip_gamma(gamma))
    comp = np.zeros(z.shape)
    done = z == 0.0
    if done.all():
        return total, done

    out = total.ravel().copy()
    # iterate on the points still summing only; converged ones are written out
    active = np.flatnonzero(~done)
    with np.errstate(divide="ignore"):
        logz = np.log(np.abs(z.ravel()[active]))
    negative = z.ravel()[active] < 0
    total = total.ravel()[active]
    comp = comp.ravel()[active]
    prev = np.full(active.shape, -gammaln(gamma))
    done = done.ravel().copy()
    for k in range(1, max_terms):
        logterm = k * logz - gammaln(mu * k + gamma)
        term = np.exp(logterm)
        if k % 2:
            term = np.where(negative, -term, term)

        t = total + term
        comp += np.where(
            np.abs(total) >= np.abs(term), (total - t) + term, (term - t) + total
        )
        total = t

        # stop only once past the peak so tiny leading terms do not end the sum
        finished = (np.abs(term) < tol) & (logterm < prev)
        prev = logterm
        if finished.any():
            out[active[finished]] = total[finished] + comp[finished]
            done[active[finished]] = True
            keep = ~finished
            active, logz, negative = active[keep], logz[keep], negative[keep]
            total, comp, prev = total[keep], comp[keep], prev[keep]
            if active.size == 0:
                break

    out[active] = total + comp
    return out.reshape(z.shape), done.reshape(z.shape)


def _asymptotic(mu: float, gamma: float, z: np.ndarray, h: int) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    total = np.zeros(z.shape)
    inv = 1.0 / z
    power = np.ones(z.shape)
    for k in range(1, h + 1):
        power = power * inv
        total -= power * rgamma(gamma - mu * k)
    return total


def asymptotic_error_estimate(
    mu: float, gamma: float, z: np.ndarray | float, h: int
) -> np.ndarray:
    r"""Estimate the error of the ``h``-term asymptotic sum on the negative axis.

    The estimate is four times the largest of the next three omitted terms (one
    may vanish at a pole of :math:`\Gamma`) plus the exponentially small part
    that no algebraic expansion captures: :math:`e^{-X}` for
    :math:`\mu \le 1`, and the slower decaying pole contribution
    :math:`e^{X \cos(\pi/\mu)}` for :math:`1 < \mu < 2`.
    """
    x = np.abs(np.asarray(z, dtype=np.float64))
    big_x = x ** (1.0 / mu)
    omitted = np.zeros(x.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(h + 1, h + 4):
            omitted = np.maximum(omitted, np.abs(rgamma(gamma - mu * j)) * x ** -float(j))
    omitted = np.where(x == 0, np.inf, omitted)
    rate = 1.0 if mu <= 1 else -math.cos(math.pi / mu)
    floor = 2.0 / mu * np.exp(-rate * big_x) * np.maximum(1.0, big_x ** (1.0 - gamma))
    return 4.0 * omitted + floor


def series_error_estimate(
    mu: float, gamma: float, z: np.ndarray | float, cfg: MLConfig = DEFAULT_CONFIG
) -> np.ndarray:
    r"""Rounding plus truncation error expected from :func:`ml_series`.

    Each term carries a relative error of about :math:`\epsilon \log|t_k|`
    from the log-space evaluation, so the sum loses roughly
    :math:`2\epsilon \max(1, X) E_{\mu,\gamma}(|z|)`; on the negative axis
    that is the cancellation :math:`e^{X}` that rules the series out there.
    """
    x = np.abs(np.asarray(z, dtype=np.float64))
    big_x = x ** (1.0 / mu)
    absolute_sum = np.abs(mittag_leffler(mu, gamma, x, cfg))
    return cfg.series_tol + 2.0 * np.finfo(float).eps * np.maximum(1.0, big_x) * absolute_sum


def _kummer(gamma: float, x: np.ndarray, tol: float) -> np.ndarray:
    r"""Evaluate :math:`E_{1,\gamma}(-x)` for ``0 <= x <~ 700``.

    Uses :math:`e^{-x}[1 + (\gamma - 1)\sum_{k\ge1} x^k / (k! (\gamma-1+k))]`,
    with the exponential folded into every term to avoid overflow.
    """
    x = np.asarray(x, dtype=np.float64)
    a = gamma - 1.0
    total = np.exp(-x)
    if a == 0.0:
        return total * recip_gamma(gamma)

    with np.errstate(divide="ignore"):
        logx = np.log(x)
    kmax = int(np.max(x, initial=0.0) + 40.0 * math.sqrt(np.max(x, initial=0.0) + 1.0)) + 40
    terms = []
    for k in range(1, kmax):
        terms.append(np.exp(k * logx - gammaln(k + 1.0) - x) / (a + k))
    if terms:
        tail = np.asarray(terms)
        # positive terms: sort-free pairwise summation is accurate enough
        total = total + a * np.sum(tail, axis=0)
    return total * recip_gamma(gamma)


def _spectral_base(mu: float, gamma: float, x: np.ndarray) -> np.ndarray:
    r"""Real-axis Laplace representation of :math:`E_{\mu,\gamma}(-x)`.

    With :math:`t = x^{1/\mu}`,

    .. math::

        t^{\gamma-1} E_{\mu,\gamma}(-t^\mu) = \int_0^\infty e^{-rt} K(r) \,dr
            + [\mu > 1] \frac{2}{\mu}\Re\left(e^{s_+ t} s_+^{1-\gamma}\right),

    where :math:`s_+ = e^{i\pi/\mu}` and

    .. math::

        K(r) = \frac{r^{\mu-\gamma}}{\pi}
            \frac{r^\mu \sin(\pi\gamma) + \sin(\pi(\gamma-\mu))}
                 {r^{2\mu} + 2 r^\mu \cos(\pi\mu) + 1}.

    Valid for :math:`\gamma < 1 + \mu`; the caller keeps
    :math:`\gamma \le \mu + 1/2` so the integrable singularity at 0 stays mild.
    """
    sin_g = math.sin(math.pi * gamma)
    sin_gm = math.sin(math.pi * (gamma - mu))
    cos_m = math.cos(math.pi * mu)

    def kernel(r: np.ndarray) -> np.ndarray:
        rm = r**mu
        return (
            r ** (mu - gamma)
            * (rm * sin_g + sin_gm)
            / (rm * rm + 2.0 * rm * cos_m + 1.0)
            / math.pi
        )

    # near mu = 1 a conjugate pole pair of K approaches r = 1; subtract it
    pole = None
    if _POLE_BAND[0] < mu < _POLE_BAND[1]:
        p = np.exp(1j * math.pi * (1.0 - mu) / mu)
        pm = p**mu
        numer = p ** (mu - gamma) * (pm * sin_g + sin_gm) / math.pi
        dprime = 2.0 * mu * p ** (2.0 * mu - 1.0) + 2.0 * mu * p ** (mu - 1.0) * cos_m
        pole = (p, numer / dprime)

    def smooth_kernel(r: np.ndarray) -> np.ndarray:
        k = kernel(r)
        if pole is not None:
            k = k - 2.0 * np.real(pole[1] / (r - pole[0]))
        return k

    head = tanh_sinh(0.0, 1.0)
    tail = tanh_sinh(0.0, _SPECTRAL_TAIL)

    out = np.empty(x.shape)
    for start in range(0, x.size, _SPECTRAL_BLOCK):
        t = x[start : start + _SPECTRAL_BLOCK] ** (1.0 / mu)
        t2 = t[:, None]
        # head on [0, L] with L = min(1, 45 / t): e^{-rt} is negligible past L
        span = np.minimum(1.0, _SPECTRAL_TAIL / t)[:, None]
        r_head = span * head.left
        # nodes that underflow to r = 0 carry no weight but hit r**(mu - gamma)
        live = r_head > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            integrand = np.exp(-t2 * r_head) * smooth_kernel(r_head)
        part0 = np.where(live, integrand, 0.0) @ head.weights
        part0 *= span[:, 0]
        # r = 1 + u / t on the tail, u in [0, 45]
        part1 = (
            np.exp(-t)
            / t
            * (
                (np.exp(-tail.left)[None, :] * smooth_kernel(1.0 + tail.left / t2))
                @ tail.weights
            )
        )
        f = part0 + part1
        if pole is not None:
            # int_0^inf e^{-rt} / (r - p) dr = e^{-pt} E1(-pt)
            p, c = pole
            w = -p * np.minimum(t, _POLE_T_MAX)
            f = f + 2.0 * np.real(c * np.exp(w) * exp1(w))
        if mu > 1:
            s_plus = np.exp(1j * math.pi / mu)
            f = f + 2.0 / mu * np.real(np.exp(s_plus * t) * s_plus ** (1.0 - gamma))
        out[start : start + _SPECTRAL_BLOCK] = t ** (1.0 - gamma) * f
    return out


def _spectral(mu: float, gamma: float, x: np.ndarray) -> np.ndarray:
    # lower gamma by the index shift E_{mu,g} = (E_{mu,g-mu}(z) - 1/Gamma(g-mu)) / z
    x = np.asarray(x, dtype=np.float64)
    ladder = []
    g = gamma
    while g > mu + 0.5:
        g -= mu
        ladder.append(g)

    value = _spectral_base(mu, g, x)
    for g in reversed(ladder):
        value = (value - recip_gamma(g)) / -x
    return value


# }}}


# {{{ public interface


def ml_series(arg: MLArgument, cfg: MLConfig = DEFAULT_CONFIG) -> float:
    """Truncated Taylor series of :math:`E_{\\mu,\\gamma}(z)`.

    Summation stops once a term past the peak drops below ``cfg.series_tol``.

    :raises NonConvergence: if ``cfg.max_terms`` terms are not enough.
    """
    value, done = _series(arg.mu, arg.gamma, np.array([arg.z]), cfg.series_tol, cfg.max_terms)
    if not done[0]:
        raise NonConvergence(
            f"series for E_{{{arg.mu}, {arg.gamma}}}({arg.z}) did not converge "
            f"in {cfg.max_terms} terms"
        )
    return float(value[0])


def ml_asymptotic(arg: MLArgument, cfg: MLConfig = DEFAULT_CONFIG) -> float:
    """The ``cfg.asym_terms``-term asymptotic sum on the negative axis.

    The result carries an error of order :math:`|z|^{-1-h}`; see
    :func:`asymptotic_error_estimate`.

    :raises DomainError: if ``z >= 0``.
    """
    if not arg.z < 0:
        raise DomainError(f"asymptotic expansion is only used for z < 0: z = {arg.z}")
    return float(_asymptotic(arg.mu, arg.gamma, np.array([arg.z]), cfg.asym_terms)[0])


def _classify(
    mu: float, gamma: float, z: np.ndarray, cfg: MLConfig
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Masks for the (asymptotic, series, fallback) regimes of ``z < 0``."""
    negative = z < 0
    x = -z
    with np.errstate(divide="ignore", over="ignore"):
        big_x = np.where(negative, x, 0.0) ** (1.0 / mu)
        estimate = np.where(
            negative & (x >= asymptotic_switch(mu, cfg)),
            asymptotic_error_estimate(mu, gamma, np.where(negative, x, 1.0), cfg.asym_terms),
            np.inf,
        )
    asym = negative & (estimate <= cfg.series_tol)
    series = negative & ~asym & (big_x <= SERIES_MAX_X)
    return asym, series, negative & ~asym & ~series


def ml_regime(arg: MLArgument, cfg: MLConfig = DEFAULT_CONFIG) -> str:
    """Name of the regime :func:`ml_eval` uses for ``arg``."""
    if arg.z >= 0:
        return "series"
    asym, series, _ = _classify(arg.mu, arg.gamma, np.array([arg.z]), cfg)
    if asym[0]:
        return "asymptotic"
    if series[0]:
        return "series"
    if arg.mu == 1.0:
        return "kummer" if -arg.z <= 700.0 else "asymptotic"
    return "spectral"


def _positive_terms(mu: float, z: float) -> int:
    """Terms needed past the peak of the series at ``z > 0``.

    Terms peak near ``k = X / mu``; the absolute stopping rule needs a few
    times that. Past ``X ~ 710`` the value overflows anyway.
    """
    big_x = min(z ** (1.0 / mu), _OVERFLOW_X)
    return int(math.ceil((4.0 * big_x + 80.0) / mu))


def mittag_leffler(
    mu: float,
    gamma: float,
    z: np.ndarray | float,
    cfg: MLConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Vectorized :math:`E_{\\mu,\\gamma}(z)` for real ``z``.

    All arguments share ``mu`` and ``gamma``, so coefficient work is done once
    per call. Returns an array with the shape of ``z``.

    :raises NonConvergence: for positive arguments the series cannot sum.
    """
    _check_parameters(mu, gamma)
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise DomainError("arguments must be finite")

    flat = z.ravel()
    out = np.empty(flat.shape)

    positive = flat >= 0
    if positive.any():
        zp = flat[positive]
        # E grows like exp(X) / mu: past the double range return inf outright
        huge = zp ** (1.0 / mu) > _OVERFLOW_X
        zp = np.where(huge, 0.0, zp)
        far = zp >= cfg.asym_switch
        values = np.empty(zp.shape)
        for mask, base in ((~far, cfg.max_terms), (far, POSITIVE_BUDGET_FACTOR * cfg.max_terms)):
            if mask.any():
                budget = max(base, _positive_terms(mu, float(zp[mask].max())))
                with np.errstate(over="ignore", invalid="ignore"):
                    v, done = _series(mu, gamma, zp[mask], cfg.series_tol, budget)
                if not done.all():
                    bad = zp[mask][~done][0]
                    raise NonConvergence(
                        f"series for E_{{{mu}, {gamma}}}({bad}) did not converge "
                        f"in {budget} terms"
                    )
                values[mask] = v
        values[huge] = np.inf
        out[positive] = values

    asym, series, rest = _classify(mu, gamma, flat, cfg)
    if asym.any():
        out[asym] = _asymptotic(mu, gamma, flat[asym], cfg.asym_terms)
    if series.any():
        v, done = _series(mu, gamma, flat[series], cfg.series_tol, cfg.max_terms)
        idx = np.flatnonzero(series)
        out[idx[done]] = v[done]
        # rare: small X but too slow for the term budget (tiny mu)
        rest[idx[~done]] = True
    if rest.any():
        x = -flat[rest]
        if mu == 1.0:
            values = np.empty(x.shape)
            near = x <= 700.0
            values[near] = _kummer(gamma, x[near], cfg.series_tol)
            values[~near] = _asymptotic(mu, gamma, -x[~near], cfg.asym_terms)
        else:
            values = _spectral(mu, gamma, x)
        out[rest] = values

    return out.reshape(z.shape)


def ml_eval(arg: MLArgument, cfg: MLConfig = DEFAULT_CONFIG) -> float:
    """Evaluate :math:`E_{\\mu,\\gamma}(z)` with automatic regime selection."""
    return float(mittag_leffler(arg.mu, arg.gamma, np.array([arg.z]), cfg)[0])


# }}}
