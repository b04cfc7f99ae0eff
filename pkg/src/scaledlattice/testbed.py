"""Test integrand families on R^d with closed-form integrals.

``f1`` is a product of logistic densities times a non-smooth polynomial-like
factor whose smoothness is set by ``sigma``; ``f2`` is a product of normal
densities times ``1 + |x_j|^sigma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from numpy.polynomial import hermite_e, polynomial
from scipy.special import expit

from .decay import DecayCondition
from .errors import CapabilityError, DomainError
from .integrator import IntegrandSpec
from .projection import MixedPartialOracle

#: Order cap for the partials of factors that are smooth (polynomial in x).
SMOOTH_ORDER_CAP = 8

FAMILIES = ("f1", "f2")


def alpha_from_sigma(sigma: float) -> int:
    """Mixed smoothness ``floor(sigma + 1/2)`` implied by the ``|x|^sigma`` factor."""
    return int(math.floor(sigma + 0.5))


def _vector(v, name: str) -> tuple:
    out = tuple(float(t) for t in np.atleast_1d(np.asarray(v, dtype=float)))
    if not out or not all(math.isfinite(t) for t in out):
        raise DomainError(f"{name} must be a non-empty vector of finite reals")
    return out


@dataclass(frozen=True)
class LogisticFamilyParams:
    mu: tuple
    s: tuple
    sigma: float

    def __post_init__(self):
        mu, s = _vector(self.mu, "mu"), _vector(self.s, "s")
        if len(mu) != len(s):
            raise DomainError(f"mu has {len(mu)} entries, s has {len(s)}")
        if min(s) <= 0:
            raise DomainError("scales s must be positive")
        if not (self.sigma > 0 and math.isfinite(self.sigma)) or float(self.sigma).is_integer():
            raise DomainError(f"sigma must be a positive non-integer, got {self.sigma}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "sigma", float(self.sigma))

    @property
    def d(self) -> int:
        return len(self.mu)

    @property
    def alpha(self) -> int:
        return alpha_from_sigma(self.sigma)


@dataclass(frozen=True)
class NormalFamilyParams:
    sigma: float
    d: int = 1

    def __post_init__(self):
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be finite and >= 0, got {self.sigma}")
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"d must be a positive integer, got {self.d!r}")
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "d", int(self.d))

    @property
    def alpha(self) -> int:
        return max(alpha_from_sigma(self.sigma), 1)


Params = Union[LogisticFamilyParams, NormalFamilyParams]


def _columns(x, d: Optional[int]) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.ndim <= 1:
        pts = pts.reshape(1, -1)
    if d is not None and pts.shape[-1] != d:
        raise DomainError(f"points have dimension {pts.shape[-1]}, expected {d}")
    return pts


def _maybe_scalar(x, vals: np.ndarray):
    return float(vals[0]) if np.asarray(x).ndim <= 1 else vals


def _signed_power_derivative(u: np.ndarray, sigma: float, k: int) -> np.ndarray:
    """k-th derivative of ``sign(u)|u|^sigma / Gamma(sigma+1)``."""
    sgn = np.sign(u)
    return sgn ** (k + 1) * np.abs(u) ** (sigma - k) / math.gamma(sigma + 1 - k)


def _abs_power_derivative(x: np.ndarray, sigma: float, k: int) -> np.ndarray:
    """k-th derivative of ``|x|^sigma``."""
    if k == 0:
        return np.abs(x) ** sigma
    falling = math.prod(sigma - i for i in range(k))
    if falling == 0.0:
        return np.zeros_like(x)
    if sigma.is_integer() and int(sigma) % 2 == 0:
        return falling * x ** int(sigma - k)
    return falling * np.sign(x) ** k * np.abs(x) ** (sigma - k)


@lru_cache(maxsize=None)
def _logistic_poly(k: int) -> np.ndarray:
    # d^k/dv^k [F(1-F)] as a polynomial in F, using dF/dv = F(1-F)
    q = np.array([0.0, 1.0, -1.0])
    logistic = q.copy()
    for _ in range(k):
        q = polynomial.polymul(polynomial.polyder(q), logistic)
    return q


def _logistic_density_derivative(t: np.ndarray, mu: float, s: float, k: int) -> np.ndarray:
    v = (t - mu) / s
    # evaluate on the left tail where F is small, then reflect (density is even in v)
    F = expit(-np.abs(v))
    sign = np.where(v > 0, (-1.0) ** k, 1.0)
    return sign * polynomial.polyval(F, _logistic_poly(k)) / s ** (k + 1)


def _f1_poly_derivative(t: np.ndarray, mu: float, sigma: float, k: int) -> np.ndarray:
    trig = 5.0 * 2.0 ** k * np.cos(2.0 * t + k * math.pi / 2)
    if k == 0:
        base = 1.0 + 4.0 * t + 5.0 + trig
    else:
        base = (4.0 if k == 1 else 0.0) + trig
    return base + _signed_power_derivative(t - mu, sigma, k)


def _f1_factor(t: np.ndarray, mu: float, s: float, sigma: float, k: int = 0) -> np.ndarray:
    return sum(math.comb(k, i) * _f1_poly_derivative(t, mu, sigma, i)
               * _logistic_density_derivative(t, mu, s, k - i) for i in range(k + 1))


def _normal_density_derivative(x: np.ndarray, k: int) -> np.ndarray:
    coef = np.zeros(k + 1)
    coef[k] = 1.0
    return (-1.0) ** k * hermite_e.hermeval(x, coef) * np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


def _f2_factor(x: np.ndarray, sigma: float, k: int = 0) -> np.ndarray:
    total = 0.0
    for i in range(k + 1):
        a = (1.0 + _abs_power_derivative(x, sigma, 0)) if i == 0 else _abs_power_derivative(x, sigma, i)
        total = total + math.comb(k, i) * a * _normal_density_derivative(x, k - i)
    return total


def factor_1d(family: str, params: Params, j: int, t, k: int = 0) -> np.ndarray:
    """``k``-th derivative of the ``j``-th one-dimensional factor."""
    t = np.asarray(t, dtype=float)
    if family == "f1":
        return _f1_factor(t, params.mu[j], params.s[j], params.sigma, k)
    if family == "f2":
        return _f2_factor(t, params.sigma, k)
    raise DomainError(f"unknown family {family!r}; expected one of {FAMILIES}")


def f1_eval(params: LogisticFamilyParams, x):
    pts = _columns(x, params.d)
    vals = np.ones(pts.shape[0])
    for j in range(params.d):
        vals = vals * _f1_factor(pts[:, j], params.mu[j], params.s[j], params.sigma)
    return _maybe_scalar(x, vals)


def f1_exact_integral(params: LogisticFamilyParams, d: Optional[int] = None) -> float:
    d = params.d if d is None else d
    if d != params.d:
        raise DomainError(f"parameters describe d = {params.d}, requested d = {d}")
    return math.prod(
        6.0 + 4.0 * mu + 10.0 * math.pi * s * math.cos(2.0 * mu) / math.sinh(2.0 * math.pi * s)
        for mu, s in zip(params.mu, params.s))


def f2_eval(params: NormalFamilyParams, x):
    pts = _columns(x, None)
    vals = np.prod(_f2_factor(pts, params.sigma), axis=1)
    return _maybe_scalar(x, vals)


def f2_exact_integral(params: NormalFamilyParams, d: Optional[int] = None) -> float:
    d = params.d if d is None else d
    moment = 2.0 ** (params.sigma / 2) * math.gamma((params.sigma + 1) / 2) / math.sqrt(math.pi)
    return (1.0 + moment) ** d


def decay_metadata(family: str, params: Params) -> DecayCondition:
    if family == "f1":
        return DecayCondition.exponential(1.0 / max(params.s), p=math.inf, q=1.0)
    if family == "f2":
        return DecayCondition.exponential(0.5, p=2.0, q=2.0)
    raise DomainError(f"unknown family {family!r}; expected one of {FAMILIES}")


def _classical_order(sigma: float, smooth_at_integers: str) -> int:
    # highest k such that the |.|^sigma factor is k times continuously differentiable
    if sigma.is_integer():
        n = int(sigma)
        if n == 0 or n % 2 == (0 if smooth_at_integers == "even" else 1):
            return SMOOTH_ORDER_CAP
        return max(n - 1, 0)
    return int(math.floor(sigma))


def classical_order(family: str, params: Params) -> int:
    if family == "f1":
        return _classical_order(params.sigma, "odd")
    if family == "f2":
        return _classical_order(params.sigma, "even")
    raise DomainError(f"unknown family {family!r}; expected one of {FAMILIES}")


def _dimension(family: str, params: Params, d: Optional[int]) -> int:
    if family == "f1":
        if d is not None and d != params.d:
            raise DomainError(f"parameters describe d = {params.d}, requested d = {d}")
        return params.d
    return params.d if d is None else int(d)


def partials_oracle(family: str, params: Params, tau_max: Optional[int] = None,
                    d: Optional[int] = None) -> MixedPartialOracle:
    """Analytic mixed partials up to ``tau_max`` per axis (product rule per factor)."""
    d = _dimension(family, params, d)
    limit = classical_order(family, params)
    tau_max = limit if tau_max is None else int(tau_max)
    if tau_max < 0:
        raise DomainError(f"tau_max must be >= 0, got {tau_max}")
    if tau_max > limit:
        raise CapabilityError(f"{family} with sigma = {params.sigma} has only {limit} classical derivatives")

    def partial(tau, pts):
        vals = np.ones(pts.shape[0])
        for j, k in enumerate(tau):
            vals = vals * factor_1d(family, params, j, pts[:, j], k)
        return vals

    return MixedPartialOracle(d, partial, tau_max)


def decay_norm_estimate(family: str, params: Params, alpha: int, decay: DecayCondition,
                        d: Optional[int] = None, radius: float = 40.0, samples: int = 40001) -> float:
    """Sampled estimate of ``sup_x sup_tau exp(beta |x|_p^q) |f^(tau)(x)|``, ``tau`` in ``{0..alpha-1}^d``.

    The weight is bounded by a product over axes: exactly when ``p == q``,
    otherwise through ``|x|_p <= |x|_1`` and ``(sum |x_j|)^q <= d^(q-1) sum |x_j|^q``.
    Polynomial decay uses ``|x|_p <= d max_j |x_j|`` per axis.
    """
    d = _dimension(family, params, d)
    if alpha - 1 > classical_order(family, params):
        raise CapabilityError(f"decay norm needs partials up to order {alpha - 1}")
    t = np.linspace(-radius, radius, samples)
    if decay.is_exponential:
        beta = decay.beta if decay.p == decay.q else decay.beta * d ** (decay.q - 1)
        log_weight = beta * np.abs(t) ** decay.q
    else:
        log_weight = decay.beta * np.log(np.maximum(d * np.abs(t), 1.0)) / d
    per_axis = []
    for j in range(d):
        sups = []
        for k in range(alpha):
            mag = np.abs(factor_1d(family, params, j, t, k))
            live = mag > 0
            # weight and factor combined in log space; the weight alone overflows
            sups.append(float(np.max(np.exp(log_weight[live] + np.log(mag[live])), initial=0.0)))
        per_axis.append(max(sups))
    return math.prod(per_axis)


@dataclass(frozen=True)
class TestbedSpec:
    """Contents of a ``key=value`` spec file."""

    family: str
    params: Params
    d: int
    alpha: int
    decompose: bool = False
    extra: dict = field(default_factory=dict)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise DomainError(f"expected a boolean, got {text!r}")


def parse_spec_text(text: str) -> TestbedSpec:
    """Parse ``family=f1|f2``, ``sigma=``, ``mu=``, ``s=`` (comma lists), ``d=``,
    ``alpha=`` and ``decompose=``.  ``#`` starts a comment."""
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"spec line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        kv[key.lower()] = value
    try:
        family = kv.pop("family")
        sigma = float(kv.pop("sigma"))
    except KeyError as exc:
        raise DomainError(f"spec is missing required key {exc.args[0]!r}") from None
    except ValueError as exc:
        raise DomainError(f"bad sigma: {exc}") from None
    try:
        d = int(kv.pop("d")) if "d" in kv else None
        alpha = int(kv.pop("alpha")) if "alpha" in kv else None
        decompose = _parse_bool(kv.pop("decompose", "false"))
        if family == "f1":
            mu = [float(v) for v in kv.pop("mu").split(",")]
            s = [float(v) for v in kv.pop("s").split(",")]
            if d is not None:
                mu, s = mu[:d], s[:d]
            params: Params = LogisticFamilyParams(tuple(mu), tuple(s), sigma)
        elif family == "f2":
            params = NormalFamilyParams(sigma, d if d is not None else 1)
        else:
            raise DomainError(f"unknown family {family!r}; expected one of {FAMILIES}")
    except KeyError as exc:
        raise DomainError(f"family {family} needs key {exc.args[0]!r}") from None
    except ValueError as exc:
        raise DomainError(f"bad numeric value in spec: {exc}") from None
    dim = params.d
    if d is not None and d != dim:
        raise DomainError(f"d = {d} but mu/s have {dim} entries")
    alpha = params.alpha if alpha is None else alpha
    if alpha < 1:
        raise DomainError(f"alpha must be >= 1, got {alpha}")
    return TestbedSpec(family, params, dim, alpha, decompose, kv)


def parse_spec(path: Union[str, Path]) -> TestbedSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read spec file {path}: {exc}") from exc
    return parse_spec_text(text)


def exact_integral(family: str, params: Params, d: Optional[int] = None) -> float:
    if family == "f1":
        return f1_exact_integral(params, d)
    if family == "f2":
        return f2_exact_integral(params, d)
    raise DomainError(f"unknown family {family!r}; expected one of {FAMILIES}")


def make_integrand(family: str, params: Params, *, alpha: Optional[int] = None,
                   d: Optional[int] = None, decay: Optional[DecayCondition] = None,
                   decay_norm: Optional[float] = None,
                   sobolev_norm: Optional[float] = None) -> IntegrandSpec:
    """Bundle a family member as an :class:`IntegrandSpec` for the integrator."""
    d = _dimension(family, params, d)
    alpha = params.alpha if alpha is None else int(alpha)
    if family == "f1":
        evaluate = lambda pts: f1_eval(params, _columns(pts, d))  # noqa: E731
    elif family == "f2":
        evaluate = lambda pts: f2_eval(params, _columns(pts, d))  # noqa: E731
    else:
        raise DomainError(f"unknown family {family!r}; expected one of {FAMILIES}")
    partials = partials_oracle(family, params, d=d)
    return IntegrandSpec(
        evaluate=evaluate,
        dimension=d,
        smoothness=alpha,
        decay=decay if decay is not None else decay_metadata(family, params),
        exact_integral=exact_integral(family, params, d),
        partials=partials,
        decay_norm=decay_norm,
        sobolev_norm=sobolev_norm,
        name=f"{family}(sigma={params.sigma:g}, d={d})",
    )


def integrand_from_spec(spec: TestbedSpec, **kwargs) -> IntegrandSpec:
    return make_integrand(spec.family, spec.params, alpha=spec.alpha, d=spec.d, **kwargs)


def box_integral_1d(family: str, params: Params, j: int, a: float, b: float) -> float:
    """Adaptive quadrature of one factor over ``[a, b]``, split at its kink."""
    from scipy.integrate import quad

    kink = params.mu[j] if family == "f1" else 0.0
    edges = [a, kink, b] if a < kink < b else [a, b]
    g = lambda t: float(factor_1d(family, params, j, t))  # noqa: E731
    return math.fsum(quad(g, lo, hi, limit=500, epsabs=0.0, epsrel=1e-13)[0]
                     for lo, hi in zip(edges[:-1], edges[1:]))


def box_integral(family: str, params: Params, lower: Sequence[float], upper: Sequence[float]) -> float:
    """``int_box f`` as a product of 1D adaptive integrals."""
    return math.prod(box_integral_1d(family, params, j, lo, hi)
                     for j, (lo, hi) in enumerate(zip(lower, upper)))
