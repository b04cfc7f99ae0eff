"""Reproducing kernels of the unanchored Sobolev and Korobov spaces, on the unit
cube and on boxes, plus quadrature/Fourier utilities to check them.

Kernels take ``x`` and ``y`` with the dimension on the last axis and broadcast
over leading axes; two plain d-vectors give a float.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .bernoulli import (
    DEGREE_CAP,
    bernoulli_poly,
    periodic_bernoulli_poly,
    periodic_scaled_bernoulli_poly,
    scaled_bernoulli_poly,
)
from .errors import DomainError
from .lattice import BoxDomain

#: Oracle signature for mixed partials: ``(tau, points[m, d]) -> values[m]``.
PartialOracle = Callable[[tuple, np.ndarray], np.ndarray]

QUAD_NODES = 64
QUAD_MAX_DIM = 2


def _check_alpha(alpha) -> int:
    if int(alpha) != alpha or alpha < 1 or 2 * alpha > DEGREE_CAP:
        raise DomainError(f"alpha must be an integer in [1, {DEGREE_CAP // 2}], got {alpha!r}")
    return int(alpha)


def r_alpha(alpha: float, h: int) -> float:
    """Korobov weight: 1 at ``h = 0``, else ``|2 pi h|**alpha``."""
    return 1.0 if h == 0 else abs(2.0 * math.pi * h) ** alpha


def r_alpha_box(alpha: float, iv, h: int) -> float:
    """Box weight: ``sqrt(b - a)`` at ``h = 0``, else ``|2 pi h|**alpha / (b - a)**alpha``."""
    a, b = (iv.a, iv.b) if hasattr(iv, "a") else iv
    L = b - a
    return math.sqrt(L) if h == 0 else (abs(2.0 * math.pi * h) / L) ** alpha


def _pair(x, y, d: Optional[int] = None):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 0:
        x = x[None]
    if y.ndim == 0:
        y = y[None]
    if x.shape[-1] != y.shape[-1] or (d is not None and x.shape[-1] != d):
        raise DomainError(f"dimension mismatch: x has {x.shape[-1]}, y has {y.shape[-1]}"
                          + ("" if d is None else f", box has {d}"))
    return x, y


def _finish(val: np.ndarray, x, y):
    return float(val) if np.ndim(x) <= 1 and np.ndim(y) <= 1 else val


def _check_unit(*pts):
    for p in pts:
        if np.any(~((p >= 0.0) & (p <= 1.0))):
            raise DomainError("points must lie in the unit cube")


def _check_box(box: BoxDomain, *pts):
    for p in pts:
        if np.any(~((p >= box.lower) & (p <= box.upper))):
            raise DomainError("points must lie in the box")


def korobov_kernel_cube(alpha: int, x, y):
    """``prod_j (1 + (-1)**(alpha+1) B~_{2 alpha}(x_j - y_j) / (2 alpha)!)``."""
    alpha = _check_alpha(alpha)
    xa, ya = _pair(x, y)
    _check_unit(xa, ya)
    c = (-1) ** (alpha + 1) / math.factorial(2 * alpha)
    val = np.prod(1.0 + c * periodic_bernoulli_poly(2 * alpha, xa - ya), axis=-1)
    return _finish(val, x, y)


def sobolev_kernel_cube(alpha: int, x, y):
    """Unanchored Sobolev kernel of smoothness ``alpha`` on the unit cube."""
    alpha = _check_alpha(alpha)
    xa, ya = _pair(x, y)
    _check_unit(xa, ya)
    xa, ya = np.broadcast_arrays(xa, ya)
    factor = 1.0 + (-1) ** (alpha + 1) * periodic_bernoulli_poly(2 * alpha, xa - ya) / math.factorial(2 * alpha)
    for tau in range(1, alpha + 1):
        factor = factor + bernoulli_poly(tau, xa) * bernoulli_poly(tau, ya) / math.factorial(tau) ** 2
    return _finish(np.prod(factor, axis=-1), x, y)


def _box_factor(kind: str, alpha: int, iv, sigma: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """One-axis factor of a box kernel, differentiated ``sigma`` times in ``x``."""
    L = iv.length
    # d^s/dx^s of B~_{2a}(x - y + a) / (2a)! is B~_{2a-s}(...) / (2a-s)!
    k = 2 * alpha - sigma
    out = (-1) ** (alpha + 1) * periodic_scaled_bernoulli_poly(k, iv, x - y + iv.a) / math.factorial(k)
    if sigma == 0:
        out = out + 1.0 / L ** 2
    if kind == "sobolev":
        for tau in range(max(sigma, 1), alpha + 1):
            weight = L if tau == alpha else 1.0
            dx = scaled_bernoulli_poly(tau - sigma, iv, x) / math.factorial(tau - sigma)
            out = out + weight * dx * scaled_bernoulli_poly(tau, iv, y) / math.factorial(tau)
    return out


def _box_kernel(kind, alpha, box: BoxDomain, x, y, sigma=None):
    alpha = _check_alpha(alpha)
    xa, ya = _pair(x, y, box.d)
    _check_box(box, xa, ya)
    xa, ya = np.broadcast_arrays(xa, ya)
    sigma = (0,) * box.d if sigma is None else tuple(sigma)
    if len(sigma) != box.d or any(s < 0 or s > alpha for s in sigma):
        raise DomainError(f"derivative order {sigma} outside {{0..{alpha}}}^{box.d}")
    val = np.ones(xa.shape[:-1])
    for j, iv in enumerate(box.intervals):
        val = val * _box_factor(kind, alpha, iv, sigma[j], xa[..., j], ya[..., j])
    return _finish(val, x, y)


def korobov_kernel_box(alpha: int, box: BoxDomain, x, y):
    """``prod_j (1/(b_j-a_j)**2 + (-1)**(alpha+1) B~^{[a_j,b_j]}_{2 alpha}(x_j - y_j + a_j) / (2 alpha)!)``."""
    return _box_kernel("korobov", alpha, box, x, y)


def sobolev_kernel_box(alpha: int, box: BoxDomain, x, y):
    """Unanchored Sobolev kernel on a box (constant, Bernoulli products, periodic term)."""
    return _box_kernel("sobolev", alpha, box, x, y)


def kernel_partial(kind: str, alpha: int, box: BoxDomain, sigma, x, y):
    """Mixed partial ``d^sigma/dx^sigma`` of a box kernel, ``sigma`` in ``{0..alpha}^d``.

    At ``sigma_j = alpha = 1`` the factor contains ``B~_1`` and is undefined on
    the seam ``x_j = y_j (mod b_j - a_j)``.
    """
    if kind not in ("korobov", "sobolev"):
        raise DomainError(f"unknown kernel kind {kind!r}")
    return _box_kernel(kind, alpha, box, x, y, sigma)


def kernel_section(kind: str, alpha: int, box: BoxDomain, y) -> tuple[PartialOracle, list]:
    """Partial oracle for ``x -> K(x, y)`` and per-axis kink locations.

    The breakpoints are where the highest derivative of the section is
    discontinuous; pass them to :func:`sobolev_inner_product`.
    """
    y = np.asarray(y, dtype=float).reshape(box.d)

    def oracle(tau, pts):
        return np.asarray(kernel_partial(kind, alpha, box, tau, np.atleast_2d(pts), y))

    return oracle, [[float(v)] for v in y]


def _composite_gauss(a: float, b: float, breaks: Sequence[float], nodes: int):
    t, w = np.polynomial.legendre.leggauss(nodes)
    edges = [a] + sorted(float(v) for v in breaks if a < v < b) + [b]
    xs, ws = [], []
    for lo, hi in zip(edges, edges[1:]):
        xs.append(0.5 * (hi - lo) * t + 0.5 * (hi + lo))
        ws.append(0.5 * (hi - lo) * w)
    return np.concatenate(xs), np.concatenate(ws)


def sobolev_inner_product(f: PartialOracle, g: PartialOracle, alpha: int, box: BoxDomain,
                          breakpoints: Optional[Sequence[Sequence[float]]] = None,
                          nodes: int = QUAD_NODES) -> float:
    """Unanchored Sobolev inner product on a box by tensor Gauss-Legendre.

    ``sum_tau int_{x_w} (int_{x_-w} f^(tau)) (int_{x_-w} g^(tau))`` with
    ``w = {j : tau_j = alpha}``.  A test utility for ``d <= 2``; breakpoints
    split each axis into panels with ``nodes`` points apiece.
    """
    alpha = _check_alpha(alpha)
    d = box.d
    if d > QUAD_MAX_DIM:
        raise DomainError(f"quadrature inner product supports d <= {QUAD_MAX_DIM}, got {d}")
    breakpoints = breakpoints or [[] for _ in range(d)]
    rules = [_composite_gauss(iv.a, iv.b, breakpoints[j], nodes) for j, iv in enumerate(box.intervals)]
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    pts = np.stack([gr.ravel() for gr in grids], axis=-1)
    shape = grids[0].shape
    weights = [r[1] for r in rules]
    total = []
    for tau in itertools.product(range(alpha + 1), repeat=d):
        fv = np.asarray(f(tau, pts), dtype=float).reshape(shape)
        gv = np.asarray(g(tau, pts), dtype=float).reshape(shape)
        # integrate out the non-maximal axes, highest axis first
        for j in reversed(range(d)):
            if tau[j] != alpha:
                fv = np.tensordot(fv, weights[j], axes=([j], [0]))
                gv = np.tensordot(gv, weights[j], axes=([j], [0]))
        prod = fv * gv
        for j in reversed([j for j in range(d) if tau[j] == alpha]):
            prod = np.tensordot(prod, weights[j], axes=([prod.ndim - 1], [0])) if prod.ndim else prod
        total.append(float(prod))
    return math.fsum(total)


@dataclass(frozen=True)
class FourierNorm:
    """Truncated Fourier-side squared norm and an estimate of the dropped tail."""

    value: float
    tail_estimate: float
    H: int

    @property
    def corrected(self) -> float:
        return self.value + self.tail_estimate


def korobov_norm_squared(coefficients: Callable[[np.ndarray], np.ndarray], alpha: float,
                         box: BoxDomain, H: int = 1000) -> FourierNorm:
    """``sum_{|h|_inf <= H} |f^(h)|^2 r^{[a,b]}_alpha(h)^2`` for ``d <= 2``.

    ``coefficients`` maps an integer array ``h[m, d]`` to the coefficients
    against the normalized box basis.  The tail beyond ``H`` is estimated by
    fitting a power law ``c k^-p`` to the shell sums at ``k = H/2`` and ``H``
    and integrating it from ``H + 1/2``.
    """
    d = box.d
    if d > QUAD_MAX_DIM:
        raise DomainError(f"Fourier norm supports d <= {QUAD_MAX_DIM}, got {d}")
    rng = np.arange(-H, H + 1)
    h = np.stack(np.meshgrid(*([rng] * d), indexing="ij"), -1).reshape(-1, d)
    coef = np.asarray(coefficients(h))
    w = np.ones(h.shape[0])
    for j, iv in enumerate(box.intervals):
        hj = np.abs(h[:, j]).astype(float)
        w = w * np.where(hj == 0, iv.length, (2 * np.pi * hj / iv.length) ** (2 * alpha))
    terms = np.abs(coef) ** 2 * w
    shell = np.abs(h).max(axis=1)
    value = math.fsum(terms)
    tail = 0.0
    if H >= 4:
        s_hi = math.fsum(terms[shell == H])
        s_lo = math.fsum(terms[shell == H // 2])
        if s_hi > 0 and s_lo > s_hi:
            p = math.log(s_lo / s_hi) / math.log(H / (H // 2))
            if p > 1:
                c = s_hi * H ** p
                tail = c * (H + 0.5) ** (1 - p) / (p - 1)
            else:
                tail = math.inf
    return FourierNorm(value, tail, H)
