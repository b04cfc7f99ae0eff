"""Independent reference implementations used only by the tests.

Nothing here imports from the package's numerical code, so agreement with it
is evidence rather than tautology.
"""

from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np


@lru_cache(maxsize=None)
def bernoulli_numbers(m: int) -> tuple:
    """B_0..B_m (convention B_1 = -1/2) by the Akiyama-Tanigawa algorithm."""
    out = []
    for n in range(m + 1):
        a = [Fraction(0)] * (n + 1)
        for k in range(n + 1):
            a[k] = Fraction(1, k + 1)
            for j in range(k, 0, -1):
                a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    # Akiyama-Tanigawa yields B_1 = +1/2
    if m >= 1:
        out[1] = Fraction(-1, 2)
    return tuple(out)


def bernoulli_exact(tau: int, x: Fraction) -> Fraction:
    """B_tau(x) = sum_k C(tau, k) B_k x^(tau - k), exactly."""
    b = bernoulli_numbers(tau)
    return sum(comb(tau, k) * b[k] * x ** (tau - k) for k in range(tau + 1))


@lru_cache(maxsize=None)
def bernoulli_sup(tau: int) -> float:
    """max |B_tau| on [0, 1], by dense exact sampling (endpoints and midpoint included)."""
    grid = [Fraction(k, 1024) for k in range(1025)]
    return float(max(abs(bernoulli_exact(tau, g)) for g in grid))


def gauss_legendre(a: float, b: float, m: int):
    t, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (b - a) * t + 0.5 * (a + b), 0.5 * (b - a) * w


def wce_squared_oracle(n: int, z, alpha: int) -> Fraction:
    """Closed-form squared Korobov worst-case error in exact arithmetic."""
    from math import factorial, prod
    sign = (-1) ** (alpha + 1)
    fact = factorial(2 * alpha)
    total = Fraction(0)
    for i in range(1, n + 1):
        total += prod(1 + sign * bernoulli_exact(2 * alpha, Fraction((i * zj) % n, n)) / fact for zj in z)
    return total / n - 1
