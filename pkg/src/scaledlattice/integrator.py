"""Integration over R^d with a rank-1 lattice rule scaled to a decay-sized box,
and the error-bound calculators that go with it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .decay import DecayCondition, DecayKind
from .errors import ComputationError, DomainError
from .lattice import BoxDomain, GeneratingVector, lattice_points, scale_points, wce_scaled_box_bound
from .projection import MixedPartialOracle, projection_error_bound
from .summation import exact_sum

__all__ = [
    "DecayCondition",
    "DecayKind",
    "ErrorBoundReport",
    "IntegrandSpec",
    "QuadratureResult",
    "integrate",
    "select_box",
    "total_error_bound_report",
    "truncation_bound",
]

_CHUNK = 1 << 15


@dataclass(frozen=True)
class IntegrandSpec:
    """An integrand on ``R^d`` with the metadata the algorithm needs.

    ``evaluate`` maps an ``(m, d)`` array to ``m`` values.  ``decay_norm``
    and ``sobolev_norm`` are caller-supplied estimates used only by the bound
    calculators.
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    dimension: int
    smoothness: int
    decay: DecayCondition
    exact_integral: Optional[float] = None
    partials: Optional[MixedPartialOracle] = None
    decay_norm: Optional[float] = None
    sobolev_norm: Optional[float] = None
    name: str = "integrand"

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.dimension!r}")
        if int(self.smoothness) != self.smoothness or self.smoothness < 1:
            raise DomainError(f"smoothness must be an integer >= 1, got {self.smoothness!r}")


@dataclass(frozen=True)
class QuadratureResult:
    estimate: float
    box: BoxDomain
    n: int
    bound_truncation: Optional[float] = None
    bound_cubature_factor: Optional[float] = None
    bound_projection: Optional[float] = None

    @property
    def half_width(self) -> float:
        return float(self.box.upper.max())


@dataclass(frozen=True)
class ErrorBoundReport:
    """The three summands bounding ``|int_R^d f - Q|``."""

    truncation: float
    cubature: float
    projection: float

    @property
    def total(self) -> float:
        return self.truncation + self.cubature + self.projection


def select_box(decay: DecayCondition, alpha: int, d: int, n: int) -> BoxDomain:
    """Symmetric box ``[-a, a]^d`` for an ``n``-point rule.

    Exponential decay: ``a = (alpha ln n / beta)^(1/q)``.  Polynomial decay:
    ``a = n^(alpha / (beta + t d / 2))`` with ``t = 3`` for ``alpha >= 2`` and
    ``t = 1`` otherwise; needs ``beta > d max(alpha - 1, 1)``.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"box selection needs n >= 2, got {n!r}")
    if int(alpha) != alpha or alpha < 1:
        raise DomainError(f"alpha must be an integer >= 1, got {alpha!r}")
    if decay.is_exponential:
        a = (alpha * math.log(n) / decay.beta) ** (1.0 / decay.q)
    else:
        decay.check_polynomial_hypothesis(alpha, d)
        t = 3 if alpha >= 2 else 1
        a = float(n) ** (alpha / (decay.beta + t * d / 2.0))
    return BoxDomain.cube(-a, a, d)


def _node_sum(f: Callable, gv: GeneratingVector, box: BoxDomain) -> float:
    parts = []
    offset = 0
    for block in lattice_points(gv).chunks(_CHUNK):
        vals = np.asarray(f(scale_points(block, box)), dtype=float).reshape(block.shape[0])
        bad = np.flatnonzero(~np.isfinite(vals))
        if bad.size:
            i = offset + int(bad[0]) + 1
            raise ComputationError(f"integrand is {vals[bad[0]]} at lattice node i = {i}")
        parts.append(vals)
        offset += block.shape[0]
    return exact_sum(parts)


def lattice_rule_on_box(f: Callable, gv: GeneratingVector, box: BoxDomain) -> float:
    """``vol(box) / n * sum_i f(p_i^[a,b])`` with exact summation."""
    if gv.d != box.d:
        raise DomainError(f"generating vector has d = {gv.d}, box has d = {box.d}")
    return box.volume * (_node_sum(f, gv, box) / gv.n)


def integrate(f: IntegrandSpec, gv: GeneratingVector, *, box: Optional[BoxDomain] = None,
              bounds: bool = False) -> QuadratureResult:
    """Scaled lattice rule for ``int_R^d f``; the box defaults to :func:`select_box`."""
    if gv.d != f.dimension:
        raise DomainError(f"generating vector has d = {gv.d}, integrand has d = {f.dimension}")
    if box is None:
        box = select_box(f.decay, f.smoothness, f.dimension, gv.n)
    estimate = lattice_rule_on_box(f.evaluate, gv, box)
    if not bounds:
        return QuadratureResult(estimate, box, gv.n)
    report = total_error_bound_report(f, gv, box)
    return QuadratureResult(
        estimate, box, gv.n,
        bound_truncation=report.truncation if f.decay_norm is not None else None,
        bound_cubature_factor=float(wce_scaled_box_bound(gv, f.smoothness, box)),
        bound_projection=report.projection if f.decay_norm is not None else None,
    )


def truncation_bound(decay: DecayCondition, norm_sup: float, alpha: int, d: int, a: float) -> float:
    """Bound on ``|int_{R^d \\ [-a,a]^d} f|`` from the decay condition.

    Exponential: ``2^d d / (beta^(d/q) q) * ceil(d/q)! * norm * exp(-beta a^q) / (beta a^q) * max(1, (beta a^q)^(d/q))``.
    Polynomial: ``2^d d / (beta - d) * norm * a^(d - beta)``, needs ``beta > d``.
    ``alpha`` does not enter; it is accepted for a uniform calling convention.
    """
    if not a > 0:
        raise DomainError(f"half-width a must be positive, got {a}")
    if norm_sup < 0:
        raise DomainError(f"norm must be non-negative, got {norm_sup}")
    beta = decay.beta
    if decay.is_exponential:
        q = decay.q
        s = beta * a ** q
        lead = 2 ** d * d / (beta ** (d / q) * q) * math.factorial(math.ceil(d / q))
        return lead * norm_sup * math.exp(-s) / s * max(1.0, s ** (d / q))
    if not beta > d:
        raise DomainError(f"polynomial truncation bound needs beta > d = {d}, got beta = {beta}")
    return 2 ** d * d / (beta - d) * norm_sup * a ** (d - beta)


def total_error_bound_report(f: IntegrandSpec, gv: GeneratingVector,
                             box: Optional[BoxDomain] = None) -> ErrorBoundReport:
    """Truncation, cubature and projection bounds for a given rule and box.

    Cubature uses the scaled worst-case error times ``f.sobolev_norm``;
    projection multiplies the pointwise bound by ``vol(box)`` since it
    enters through the equal-weight node sum.  Missing norms count as 0.
    """
    if box is None:
        box = select_box(f.decay, f.smoothness, f.dimension, gv.n)
    decay_norm = f.decay_norm or 0.0
    sob = f.sobolev_norm or 0.0
    # the complement of any box lies outside the largest centered cube inside it
    a = min(min(abs(iv.a), abs(iv.b)) for iv in box.intervals)
    if decay_norm == 0.0:
        trunc = 0.0
    elif a <= 0:
        trunc = math.inf
    else:
        trunc = truncation_bound(f.decay, decay_norm, f.smoothness, f.dimension, a)
    cub = 0.0 if sob == 0.0 else wce_scaled_box_bound(gv, f.smoothness, box) * sob
    proj = projection_error_bound(f.decay, decay_norm, f.smoothness, box) * box.volume
    return ErrorBoundReport(float(trunc), float(cub), float(proj))
