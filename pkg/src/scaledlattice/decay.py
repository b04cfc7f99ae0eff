"""Decay conditions of an integrand and its mixed partials towards infinity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError


class DecayKind(str, Enum):
    EXPONENTIAL = "exponential"
    POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class DecayCondition:
    """``sup |exp(beta |x|_p^q) f^(tau)(x)| < inf`` (exponential) or
    ``sup | |x|_p^beta f^(tau)(x)| < inf`` (polynomial), ``tau`` in ``{0..alpha-1}^d``.

    ``p`` may be ``math.inf``.  ``q`` is ignored for polynomial decay.
    """

    kind: DecayKind
    beta: float
    p: float = 2.0
    q: float = 1.0

    def __post_init__(self):
        kind = DecayKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise DomainError(f"decay rate beta must be positive and finite, got {self.beta}")
        if not self.p >= 1:
            raise DomainError(f"norm order p must be in [1, inf], got {self.p}")
        if kind is DecayKind.EXPONENTIAL and not (self.q >= 1 and math.isfinite(self.q)):
            raise DomainError(f"exponential decay needs finite q >= 1, got {self.q}")

    @classmethod
    def exponential(cls, beta: float, p: float = 2.0, q: float = 1.0) -> "DecayCondition":
        return cls(DecayKind.EXPONENTIAL, beta, p, q)

    @classmethod
    def polynomial(cls, beta: float, p: float = 2.0) -> "DecayCondition":
        return cls(DecayKind.POLYNOMIAL, beta, p)

    @property
    def is_exponential(self) -> bool:
        return self.kind is DecayKind.EXPONENTIAL

    def check_polynomial_hypothesis(self, alpha: int, d: int) -> None:
        """Raise unless ``beta > d * max(alpha - 1, 1)`` (needed for the convergence rate)."""
        if self.is_exponential:
            return
        need = d * max(alpha - 1, 1)
        if not self.beta > need:
            raise DomainError(f"polynomial decay needs beta > d*max(alpha-1, 1) = {need}, got beta = {self.beta}")

    def weight(self, norm_p: float) -> float:
        """The decay weight ``exp(beta r^q)`` or ``r^beta`` at ``r = |x|_p``."""
        if self.is_exponential:
            return math.exp(self.beta * norm_p ** self.q)
        return norm_p ** self.beta
