"""Periodization of a function on a box by Bernoulli-polynomial corrections.

The result ``F`` is the orthogonal projection of ``f`` onto the periodic
(Korobov) subspace of the unanchored Sobolev space on the box.  It is a
verification device: the integrator never calls it.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .bernoulli import periodic_scaled_bernoulli_poly, scaled_bernoulli_poly
from .decay import DecayCondition
from .errors import CapabilityError, DomainError, ResourceError
from .kernels import _composite_gauss, sobolev_inner_product
from .lattice import BoxDomain

#: Largest dimension accepted by the periodization routines.
MAX_DIM = 3
#: Largest dimension for the quadrature-based representation check.
REPRESENTATION_MAX_DIM = 2


class MixedPartialOracle:
    """Pointwise mixed partials ``f^(tau)`` of a function on ``R^d``.

    ``partial(tau, pts)`` receives a tuple of ``d`` non-negative orders and a
    ``(m, d)`` array, and returns ``m`` values.  Orders above ``max_order``
    (per axis) raise :class:`CapabilityError`.
    """

    def __init__(self, d: int, partial: Callable[[tuple, np.ndarray], np.ndarray], max_order):
        self.d = int(d)
        self._partial = partial
        mo = (max_order,) * self.d if np.ndim(max_order) == 0 else tuple(max_order)
        if len(mo) != self.d:
            raise DomainError(f"max_order needs {self.d} entries, got {len(mo)}")
        self.max_order = tuple(int(v) for v in mo)

    def supports(self, tau: Sequence[int]) -> bool:
        return len(tau) == self.d and all(0 <= t <= m for t, m in zip(tau, self.max_order))

    def __call__(self, tau, pts) -> np.ndarray:
        tau = tuple(int(t) for t in tau)
        if not self.supports(tau):
            raise CapabilityError(f"partial of order {tau} not available (max {self.max_order})")
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if pts.shape[-1] != self.d:
            raise DomainError(f"points have dimension {pts.shape[-1]}, oracle has {self.d}")
        return np.asarray(self._partial(tau, pts), dtype=float).reshape(pts.shape[0])

    def value(self, pts) -> np.ndarray:
        return self((0,) * self.d, pts)

    def require(self, order: int) -> None:
        """Raise unless every partial with entries up to ``order`` is available."""
        if min(self.max_order) < order:
            raise CapabilityError(f"need partials up to order {order} per axis, oracle offers {self.max_order}")

    def finite_difference_check(self, pts, step: float = 1e-5, rtol: float = 1e-4,
                                atol: float = 1e-8) -> bool:
        """Spot-check each first difference of each available partial."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        for tau in itertools.product(*[range(m) for m in self.max_order]):
            for j in range(self.d):
                up = list(tau)
                up[j] += 1
                e = np.zeros(self.d)
                e[j] = step
                fd = (self(tau, pts + e) - self(tau, pts - e)) / (2 * step)
                exact = self(tuple(up), pts)
                if np.any(np.abs(fd - exact) > rtol * np.abs(exact) + atol):
                    return False
        return True


def _check(f: MixedPartialOracle, alpha: int, box: BoxDomain, limit: int = MAX_DIM) -> int:
    if int(alpha) != alpha or alpha < 1:
        raise DomainError(f"alpha must be an integer >= 1, got {alpha!r}")
    if box.d != f.d:
        raise DomainError(f"box has dimension {box.d}, oracle has {f.d}")
    if box.d > limit:
        raise ResourceError(f"periodization costs (alpha+1)^d 2^d oracle calls; d = {box.d} exceeds {limit}")
    return int(alpha)


def _points(box: BoxDomain, x) -> tuple[np.ndarray, bool]:
    pts = np.asarray(x, dtype=float)
    single = pts.ndim <= 1
    pts = np.atleast_2d(pts).reshape(-1, box.d)
    if np.any(~((pts >= box.lower) & (pts <= box.upper))):
        raise DomainError("points must lie in the box")
    return pts, single


def _bernoulli_factor(iv, tau: int, sigma: int, x: np.ndarray) -> np.ndarray:
    # d^sigma/dx^sigma of B^{[a,b]}_tau(x) / tau!
    if sigma > tau:
        return np.zeros_like(x)
    k = tau - sigma
    return scaled_bernoulli_poly(k, iv, x) / math.factorial(k)


def _projected_partial(f: MixedPartialOracle, alpha: int, box: BoxDomain, sigma: tuple,
                       pts: np.ndarray, form: str, nodes: int) -> np.ndarray:
    d = box.d
    out = f(sigma, pts)
    for tau in itertools.product(range(alpha + 1), repeat=d):
        u = [j for j in range(d) if tau[j] > 0]
        if not u:
            continue
        coef = np.full(pts.shape[0], (-1.0) ** len(u))
        for j in u:
            coef = coef * _bernoulli_factor(box.intervals[j], tau[j], sigma[j], pts[:, j])
        if not np.any(coef):
            continue
        if form == "boundary":
            order = tuple(tau[j] - 1 if j in u else sigma[j] for j in range(d))
            inner = np.zeros(pts.shape[0])
            for mask in itertools.product((0, 1), repeat=len(u)):
                corner = pts.copy()
                for j, at_a in zip(u, mask):
                    corner[:, j] = box.intervals[j].a if at_a else box.intervals[j].b
                inner = inner + (-1.0) ** sum(mask) * f(order, corner)
        else:
            order = tuple(tau[j] if j in u else sigma[j] for j in range(d))
            inner = _integrate_axes(lambda q: f(order, q), box, u, pts, nodes)
        out = out + coef * inner
    return out


def _integrate_axes(g, box: BoxDomain, axes: Sequence[int], pts: np.ndarray, nodes: int,
                    breaks: Optional[dict] = None, weight=None) -> np.ndarray:
    """``int g(x_{-axes}, y_axes) [weight(x, y)] dy_axes`` for every row ``x`` of ``pts``."""
    breaks = breaks or {}
    out = np.zeros(pts.shape[0])
    for r, x in enumerate(pts):
        rules = [_composite_gauss(box.intervals[j].a, box.intervals[j].b, breaks.get(j, []), nodes)
                 for j in axes]
        grid = np.meshgrid(*[rl[0] for rl in rules], indexing="ij")
        w = np.ones_like(grid[0])
        for k, rl in enumerate(rules):
            shape = [1] * len(rules)
            shape[k] = -1
            w = w * rl[1].reshape(shape)
        q = np.repeat(x[None, :], grid[0].size, axis=0)
        for k, j in enumerate(axes):
            q[:, j] = grid[k].ravel()
        vals = g(q)
        if weight is not None:
            vals = vals * weight(x, q)
        out[r] = math.fsum(w.ravel() * vals)
    return out


def periodize_on_box(f: MixedPartialOracle, alpha: int, box: BoxDomain, x,
                     quad_nodes: int = 32, form: str = "boundary"):
    """Value of the periodized function ``F^{[a,b]}`` at ``x`` (a point or ``(m, d)`` array).

    ``form="boundary"`` uses only partials of order ``<= alpha - 1`` at box
    faces; ``form="integral"`` replaces each face difference by the
    Gauss-Legendre integral (``quad_nodes`` per axis) of the next partial.
    """
    alpha = _check(f, alpha, box)
    if form not in ("boundary", "integral"):
        raise DomainError(f"unknown form {form!r}")
    f.require(alpha - 1 if form == "boundary" else alpha)
    pts, single = _points(box, x)
    vals = _projected_partial(f, alpha, box, (0,) * box.d, pts, form, quad_nodes)
    return float(vals[0]) if single else vals


def projected_oracle(f: MixedPartialOracle, alpha: int, box: BoxDomain) -> MixedPartialOracle:
    """Partials of ``F^{[a,b]}`` up to the orders ``f`` itself supplies, on the box."""
    alpha = _check(f, alpha, box)
    f.require(alpha - 1)

    def partial(sigma, pts):
        pts, _ = _points(box, pts)
        return _projected_partial(f, alpha, box, sigma, pts, "boundary", 0)

    # boundary terms use order tau_j - 1 <= alpha - 1 on u and sigma_j elsewhere
    return MixedPartialOracle(f.d, partial, f.max_order)


def projection_error_bound(decay: DecayCondition, norm_est: float, alpha: int, box: BoxDomain) -> float:
    """Pointwise bound on ``|F^{[a,b]}(x) - f(x)|`` on the box.

    ``(alpha+1)^d prod_j max(1, b_j - a_j)^(alpha-1) * norm_est`` times
    ``exp(-beta min_j min(|a_j|^q, |b_j|^q))`` (exponential decay) or
    ``(min_j min(|a_j|, |b_j|))^(-beta)`` (polynomial decay; infinite when a
    face touches 0).
    """
    if norm_est < 0:
        raise DomainError(f"norm estimate must be non-negative, got {norm_est}")
    d = box.d
    prefactor = (alpha + 1) ** d * math.prod(max(1.0, L) ** (alpha - 1) for L in box.lengths)
    dist = min(min(abs(iv.a), abs(iv.b)) for iv in box.intervals)
    if decay.is_exponential:
        decay_factor = math.exp(-decay.beta * dist ** decay.q)
    else:
        decay_factor = math.inf if dist == 0 else dist ** (-decay.beta)
    if norm_est == 0:
        return 0.0
    return prefactor * norm_est * decay_factor


def _periodic_kernel_factor(box: BoxDomain, alpha: int, axes: Iterable[int]):
    axes = list(axes)

    def weight(x, q):
        w = np.ones(q.shape[0])
        for j in axes:
            iv = box.intervals[j]
            w = w * periodic_scaled_bernoulli_poly(alpha, iv, x[j] - q[:, j] + iv.a) / math.factorial(alpha)
        return w

    return weight


def representation_check(f: MixedPartialOracle, alpha: int, box: BoxDomain, x,
                         quad_nodes: int = 48) -> tuple[float, float]:
    """Right-hand sides of the two Bernoulli series representations of ``f(x)``.

    (i) pure-integral terms over every nonempty ``u`` plus the full mixed
    remainder; (ii) mixed remainders for every ``u``.  Both should equal
    ``f(x)``; quadrature panels break at ``x_j`` where the periodic kernels kink.
    """
    alpha = _check(f, alpha, box, REPRESENTATION_MAX_DIM)
    f.require(alpha)
    pts, _ = _points(box, x)
    x = pts[:1]
    d = box.d
    full = list(range(d))

    def bern(u, tau):
        return math.prod(float(scaled_bernoulli_poly(tau[j], box.intervals[j], x[0, j])) / math.factorial(tau[j])
                         for j in u)

    rep_i = []
    for r in range(1, d + 1):
        for u in itertools.combinations(full, r):
            for tau_u in itertools.product(range(alpha + 1), repeat=r):
                tau = [0] * d
                for j, t in zip(u, tau_u):
                    tau[j] = t
                tau = tuple(tau)
                integral = _integrate_axes(lambda q: f(tau, q), box, u, x, quad_nodes)[0]
                rep_i.append((-1) ** (r + 1) * bern(u, tau) * integral)
    remainder = _integrate_axes(lambda q: f((alpha,) * d, q), box, full, x, quad_nodes,
                                breaks={j: [x[0, j]] for j in full}, weight=_periodic_kernel_factor(box, alpha, full))[0]
    rep_i.append((-1) ** d * remainder)

    rep_ii = []
    for r in range(0, d + 1):
        for u in itertools.combinations(full, r):
            rest = [j for j in full if j not in u]
            for tau_u in itertools.product(range(alpha + 1), repeat=r):
                tau = [alpha] * d
                for j, t in zip(u, tau_u):
                    tau[j] = t
                tau = tuple(tau)
                integral = _integrate_axes(lambda q: f(tau, q), box, full, x, quad_nodes,
                                           breaks={j: [x[0, j]] for j in rest},
                                           weight=_periodic_kernel_factor(box, alpha, rest))[0]
                rep_ii.append((-1) ** (d - r) * bern(u, tau) * integral)
    return math.fsum(rep_i), math.fsum(rep_ii)


def sobolev_norm(f: MixedPartialOracle, alpha: int, box: BoxDomain, nodes: int = 64,
                 breakpoints=None) -> float:
    """Unanchored Sobolev norm of ``f`` restricted to the box (quadrature, ``d <= 2``)."""
    f.require(alpha)
    return math.sqrt(max(0.0, sobolev_inner_product(f, f, alpha, box, breakpoints, nodes)))


def sobolev_norm_over_boxes(f: MixedPartialOracle, alpha: int, boxes: Iterable[BoxDomain]) -> float:
    """Largest per-box Sobolev norm over a caller-supplied finite family.

    The norm over all of ``R^d`` is a supremum over every box; it cannot be
    computed in general, so this is only a lower estimate of it.
    """
    vals = [sobolev_norm(f, alpha, b) for b in boxes]
    if not vals:
        raise DomainError("need at least one box")
    return max(vals)
