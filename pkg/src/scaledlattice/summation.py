"""Deterministic compensated summation.

``math.fsum`` keeps exact partials (Shewchuk), so the rounded total does not
depend on how values are chunked or in which order chunks arrive.  That is
what makes chunk-parallel reduction reproducible bit for bit.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np


def exact_sum(chunks: Iterable[np.ndarray]) -> float:
    """Correctly rounded sum of all values in an iterable of 1-d chunks."""
    return math.fsum(v for chunk in chunks for v in np.asarray(chunk, dtype=float).ravel().tolist())


def chunked_sum(values: np.ndarray, chunk: int = 1 << 16) -> float:
    """Sum a flat array chunk by chunk; equal to ``exact_sum([values])``."""
    values = np.asarray(values, dtype=float).ravel()
    return exact_sum(values[i:i + chunk] for i in range(0, values.size, chunk))
