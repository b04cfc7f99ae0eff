"""Gauss-Hermite tensor and Smolyak sparse-grid rules for integrals against the
standard normal density."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ComputationError, DomainError, ResourceError
from .summation import exact_sum

MAX_NODES = 513
MAX_LEVEL = 10
TENSOR_BUDGET = 10 ** 8


@dataclass(frozen=True)
class QuadratureRule1D:
    """Nodes and weights for the weight function ``exp(-x^2)`` on ``R``."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def count(self) -> int:
        return self.nodes.size

    def normal(self) -> "QuadratureRule1D":
        """Same rule mapped to the standard normal density (``x = sqrt(2) t``)."""
        return QuadratureRule1D(math.sqrt(2.0) * self.nodes, self.weights / math.sqrt(math.pi))


def _scaled_hermite(x: np.ndarray, count: int):
    """Orthonormal Hermite values ``psi_count(x)``, ``psi_{count-1}(x)`` and the
    log of a common scale factor that keeps them in range."""
    prev = np.zeros_like(x)
    cur = np.full_like(x, math.pi ** -0.25)
    log_scale = np.zeros_like(x)
    for k in range(count):
        nxt = math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e100
        if np.any(big):
            cur = np.where(big, cur * 1e-100, cur)
            prev = np.where(big, prev * 1e-100, prev)
            log_scale = log_scale + np.where(big, 100 * math.log(10), 0.0)
    return cur, prev, log_scale


@lru_cache(maxsize=None)
def gauss_hermite_1d(count: int) -> QuadratureRule1D:
    """Golub-Welsch nodes, exact up to degree ``2 count - 1``.

    Nodes get two Newton steps on ``psi_count``; weights use
    ``w_i = 1 / (count psi_{count-1}(x_i)^2)`` in log form, since squared
    eigenvector components lose all relative accuracy for tiny weights.
    """
    if int(count) != count or not 1 <= count <= MAX_NODES:
        raise DomainError(f"node count must be in [1, {MAX_NODES}], got {count!r}")
    count = int(count)
    if count == 1:
        return QuadratureRule1D(np.zeros(1), np.array([math.sqrt(math.pi)]))
    off = np.sqrt(np.arange(1, count) / 2.0)
    try:
        nodes = eigh_tridiagonal(np.zeros(count), off, eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise ComputationError(f"tridiagonal eigensolver failed for {count} nodes") from exc
    for _ in range(2):
        top, below, _ = _scaled_hermite(nodes, count)
        nodes = nodes - top / (math.sqrt(2.0 * count) * below)
    _, below, log_scale = _scaled_hermite(nodes, count)
    weights = np.exp(-math.log(count) - 2.0 * (np.log(np.abs(below)) + log_scale))
    # enforce the exact reflection symmetry of the rule
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    if count % 2:
        nodes[count // 2] = 0.0
    if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
        raise ComputationError(f"Gauss-Hermite construction produced non-finite values for {count} nodes")
    return QuadratureRule1D(nodes, weights)


def level_count(level: int) -> int:
    """Nodes at a level: 1 at level 0, ``2^level + 1`` above."""
    if int(level) != level or level < 0:
        raise DomainError(f"level must be a non-negative integer, got {level!r}")
    return 1 if level == 0 else 2 ** int(level) + 1


def _tensor_sum(rules, f: Callable[[np.ndarray], np.ndarray]) -> float:
    grids = np.meshgrid(*[r.nodes for r in rules], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    w = np.ones(1)
    for r in rules:
        w = np.multiply.outer(w, r.weights).ravel()
    vals = np.asarray(f(pts), dtype=float).reshape(pts.shape[0])
    return exact_sum([w * vals])


def tensor_quadrature(rule: QuadratureRule1D, d: int, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """Full tensor rule for ``int_R^d f(x) phi(x) dx`` with ``phi`` the standard normal density.

    ``f`` here is the integrand divided by the density.  To integrate a
    function ``g`` against Lebesgue measure pass ``g / phi``; see
    :func:`tensor_quadrature_lebesgue`.
    """
    if int(d) != d or d < 1:
        raise DomainError(f"d must be a positive integer, got {d!r}")
    if rule.count ** d > TENSOR_BUDGET:
        raise ResourceError(f"{rule.count}^{d} tensor nodes exceed {TENSOR_BUDGET}")
    return _tensor_sum([rule.normal()] * int(d), f)


def _density(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * np.sum(x * x, axis=-1)) / (2 * math.pi) ** (x.shape[-1] / 2)


def tensor_quadrature_lebesgue(rule: QuadratureRule1D, d: int, g: Callable[[np.ndarray], np.ndarray]) -> float:
    """Tensor rule for ``int_R^d g(x) dx``, dividing ``g`` by the normal density at the nodes."""
    return tensor_quadrature(rule, d, lambda x: np.asarray(g(x)) / _density(x))


def smolyak_quadrature(level: int, d: int, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """Smolyak combination of Gauss-Hermite tensor rules against the normal density.

    ``sum_{q-d+1 <= |l| <= q} (-1)^(q-|l|) C(d-1, q-|l|) (U^{l_1} x ... x U^{l_d})``
    with ``q = level`` and multi-indices ``l >= 0``.
    """
    if int(level) != level or not 0 <= level <= MAX_LEVEL:
        raise DomainError(f"Smolyak level must be in [0, {MAX_LEVEL}], got {level!r}")
    if int(d) != d or d < 1:
        raise DomainError(f"d must be a positive integer, got {d!r}")
    level, d = int(level), int(d)
    terms = []
    total_nodes = 0
    for ell in itertools.product(range(level + 1), repeat=d):
        k = level - sum(ell)
        if not 0 <= k <= d - 1:
            continue
        rules = [gauss_hermite_1d(level_count(l)).normal() for l in ell]
        total_nodes += math.prod(r.count for r in rules)
        if total_nodes > TENSOR_BUDGET:
            raise ResourceError(f"Smolyak grid exceeds {TENSOR_BUDGET} nodes")
        terms.append((-1) ** k * math.comb(d - 1, k) * _tensor_sum(rules, f))
    return math.fsum(terms)


def smolyak_node_count(level: int, d: int) -> int:
    """Total node evaluations (with repetition) used by :func:`smolyak_quadrature`."""
    return sum(math.prod(level_count(l) for l in ell)
               for ell in itertools.product(range(level + 1), repeat=d)
               if 0 <= level - sum(ell) <= d - 1)


def smolyak_quadrature_lebesgue(level: int, d: int, g: Callable[[np.ndarray], np.ndarray]) -> float:
    return smolyak_quadrature(level, d, lambda x: np.asarray(g(x)) / _density(x))
