"""Bernoulli polynomials: plain, scaled to an interval, periodic, and the
matching normalized Fourier basis.

Polynomials are stored in the variable ``w = x - 1/2``.  In that variable
``B_tau`` is an even (odd) polynomial for even (odd) ``tau``, so evaluation
only touches every second coefficient, the reflection symmetry
``B_tau(1 - x) = (-1)**tau B_tau(x)`` holds bit-exactly, and the coefficients
stay small (no cancellation from the binomial-sum form at high degree).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import DomainError

#: Largest admissible degree. Korobov kernels of smoothness alpha use
#: ``B_{2 alpha}``, so the default admits alpha <= 8.
DEGREE_CAP = 16

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class Interval:
    """Finite interval ``[a, b]`` with ``a < b``."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DomainError(f"interval ends must be finite, got [{a}, {b}]")
        if not a < b:
            raise DomainError(f"interval needs a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a

    @classmethod
    def coerce(cls, iv) -> "Interval":
        if isinstance(iv, Interval):
            return iv
        a, b = iv
        return cls(a, b)


@lru_cache(maxsize=None)
def centered_coefficients(tau: int) -> tuple[Fraction, ...]:
    """Exact coefficients ``c_k`` with ``B_tau(1/2 + w) = sum_k c_k w**k``.

    Built by the recursion ``B_tau' = tau B_{tau-1}``, ``B_0 = 1`` and the
    normalization ``int_0^1 B_tau = 0`` (``tau >= 1``).
    """
    if tau == 0:
        return (Fraction(1),)
    prev = centered_coefficients(tau - 1)
    coeffs = [Fraction(0)] + [tau * c / (k + 1) for k, c in enumerate(prev)]
    # int_{-1/2}^{1/2} w**k dw vanishes for odd k
    mean = sum(c * Fraction(2, (k + 1) * 2 ** (k + 1))
               for k, c in enumerate(coeffs) if k % 2 == 0)
    coeffs[0] -= mean
    return tuple(coeffs)


@lru_cache(maxsize=None)
def _float_coefficients(tau: int) -> np.ndarray:
    # coefficients of the polynomial in w**2, highest power first (Horner order)
    c = centered_coefficients(tau)
    sub = c[tau % 2::2]
    return np.array([float(v) for v in reversed(sub)])


def _check_degree(tau: int, minimum: int = 0) -> int:
    if int(tau) != tau:
        raise DomainError(f"Bernoulli degree must be an integer, got {tau!r}")
    tau = int(tau)
    if tau < minimum:
        raise DomainError(f"Bernoulli degree must be >= {minimum}, got {tau}")
    if tau > DEGREE_CAP:
        raise DomainError(f"Bernoulli degree {tau} exceeds the cap {DEGREE_CAP}")
    return tau


def _out(values: np.ndarray, like) -> ArrayLike:
    return float(values) if np.ndim(like) == 0 else values


def _eval_unit(tau: int, u: np.ndarray) -> np.ndarray:
    w = u - 0.5
    w2 = w * w
    coeffs = _float_coefficients(tau)
    acc = np.full_like(w2, coeffs[0])
    for c in coeffs[1:]:
        acc = acc * w2 + c
    return acc * w if tau % 2 else acc


def bernoulli_poly(tau: int, x: ArrayLike) -> ArrayLike:
    """Evaluate ``B_tau(x)`` for ``x`` in ``[0, 1]`` (scalar or array)."""
    tau = _check_degree(tau)
    u = np.asarray(x, dtype=float)
    if np.any(~((u >= 0.0) & (u <= 1.0))):
        raise DomainError("bernoulli_poly needs 0 <= x <= 1")
    return _out(_eval_unit(tau, u), x)


def scaled_bernoulli_poly(tau: int, iv, x: ArrayLike) -> ArrayLike:
    """``B^{[a,b]}_tau(x) = (b-a)**(tau-1) B_tau((x-a)/(b-a))`` on ``[a, b]``."""
    tau = _check_degree(tau)
    iv = Interval.coerce(iv)
    xs = np.asarray(x, dtype=float)
    if np.any(~((xs >= iv.a) & (xs <= iv.b))):
        raise DomainError(f"x outside the interval [{iv.a}, {iv.b}]")
    u = (xs - iv.a) / iv.length
    return _out(iv.length ** (tau - 1) * _eval_unit(tau, u), x)


def _wrap_unit(u: np.ndarray) -> np.ndarray:
    r = np.mod(u, 1.0)
    # np.mod can round tiny negatives up to exactly 1.0
    return np.where(r >= 1.0, 0.0, r)


def periodic_bernoulli_poly(tau: int, x: ArrayLike) -> ArrayLike:
    """1-periodic extension ``B_tau(x mod 1)``.

    For ``tau = 1`` the value on the integers is undefined (jump), and asking
    for it raises :class:`DomainError`.
    """
    tau = _check_degree(tau, minimum=1)
    u = _wrap_unit(np.asarray(x, dtype=float))
    if tau == 1 and np.any(u == 0.0):
        raise DomainError("periodic B_1 is undefined at integers")
    return _out(_eval_unit(tau, u), x)


def periodic_scaled_bernoulli_poly(tau: int, iv, x: ArrayLike) -> ArrayLike:
    """``(b-a)``-periodic extension of ``B^{[a,b]}_tau``.

    ``tau = 1`` is accepted away from ``a + k (b - a)`` (it is needed for the
    highest kernel derivative at smoothness 1).
    """
    tau = _check_degree(tau, minimum=1)
    iv = Interval.coerce(iv)
    xs = np.asarray(x, dtype=float)
    u = _wrap_unit(np.mod(xs - iv.a, iv.length) / iv.length)
    if tau == 1 and np.any(u == 0.0):
        raise DomainError("periodic B_1 is undefined at the interval seam")
    return _out(iv.length ** (tau - 1) * _eval_unit(tau, u), x)


def bernoulli_magnitude_bound(tau: int, iv) -> float:
    """Upper bound ``(b-a)**(tau-1) / 2`` on ``|B^{[a,b]}_tau| / tau!``."""
    tau = _check_degree(tau, minimum=1)
    iv = Interval.coerce(iv)
    return iv.length ** (tau - 1) / 2.0


def fourier_basis(h: int, iv, x: ArrayLike) -> Union[complex, np.ndarray]:
    """L2-normalized basis ``exp(2 pi i h (x-a)/(b-a)) / sqrt(b-a)``."""
    iv = Interval.coerce(iv)
    xs = np.asarray(x, dtype=float)
    if np.any(~((xs >= iv.a) & (xs <= iv.b))):
        raise DomainError(f"x outside the interval [{iv.a}, {iv.b}]")
    val = np.exp(2j * np.pi * h * (xs - iv.a) / iv.length) / math.sqrt(iv.length)
    return complex(val) if np.ndim(x) == 0 else val
