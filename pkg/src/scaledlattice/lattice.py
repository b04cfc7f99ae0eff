"""Rank-1 lattice rules: points, scaling, dual lattice, worst-case errors, CBC."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .bernoulli import Interval, _check_degree, _eval_unit, centered_coefficients
from .errors import ComputationError, DomainError, ResourceError
from .summation import exact_sum

#: Largest point count materialized as one array; beyond it use ``chunks``.
MATERIALIZE_LIMIT = 1 << 20
#: Budget for exhaustive dual-lattice scans, counted in candidate indices.
DUAL_SCAN_BUDGET = 10 ** 8
#: Negative radicands down to this value are rounding noise and clamp to 0.
RADICAND_TOLERANCE = -1e-14
#: Generating vector used in the published experiments.
FIXED_VECTOR = (1, 4959637, 5860107)

_CHUNK = 1 << 16


class CoprimalityWarning(UserWarning):
    """A generating-vector component shares a factor with ``n``."""


@dataclass(frozen=True)
class GeneratingVector:
    """Parameters ``(n, z)`` of the rank-1 lattice ``{i z / n mod 1}``."""

    n: int
    z: tuple

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        z = tuple(int(v) for v in np.atleast_1d(self.z))
        if len(z) == 0:
            raise DomainError("generating vector needs d >= 1")
        if any(int(v) != v for v in np.atleast_1d(self.z)) or any(v < 0 for v in z):
            raise DomainError(f"z must hold non-negative integers, got {self.z!r}")
        n = int(self.n)
        if n >= 1 << 40:
            raise ResourceError(f"n = {n} is too large for int64 index arithmetic")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "z", z)
        if n > 1:
            bad = [v for v in z if math.gcd(v, n) != 1]
            if bad:
                warnings.warn(f"components {bad} are not coprime to n = {n}",
                              CoprimalityWarning, stacklevel=3)

    @property
    def d(self) -> int:
        return len(self.z)

    def reduced(self) -> np.ndarray:
        """``z mod n`` as int64 (keeps ``i * z`` products small)."""
        return np.array([v % self.n for v in self.z], dtype=np.int64)

    def with_n(self, n: int) -> "GeneratingVector":
        """Same ``z`` (reduced mod the new ``n``) for another point count."""
        return GeneratingVector(n, tuple(v % n if n > 1 else v for v in self.z))

    def prefix(self, s: int) -> "GeneratingVector":
        return GeneratingVector(self.n, self.z[:s])

    @classmethod
    def fixed(cls, n: int, d: int = 3) -> "GeneratingVector":
        """The published fixed vector truncated to ``d`` components, reduced mod ``n``."""
        if not 1 <= d <= len(FIXED_VECTOR):
            raise DomainError(f"the fixed vector has {len(FIXED_VECTOR)} components, asked for {d}")
        return cls(1, FIXED_VECTOR[:d]).with_n(n)


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box ``prod_j [a_j, b_j]``."""

    intervals: tuple

    def __post_init__(self):
        ivs = tuple(Interval.coerce(iv) for iv in self.intervals)
        if not ivs:
            raise DomainError("a box needs at least one interval")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def cube(cls, a: float, b: float, d: int) -> "BoxDomain":
        return cls(tuple(Interval(a, b) for _ in range(d)))

    @property
    def d(self) -> int:
        return len(self.intervals)

    @property
    def lower(self) -> np.ndarray:
        return np.array([iv.a for iv in self.intervals])

    @property
    def upper(self) -> np.ndarray:
        return np.array([iv.b for iv in self.intervals])

    @property
    def lengths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def volume(self) -> float:
        return math.prod(iv.length for iv in self.intervals)


class LatticePoints(Sequence):
    """Lazy view of the points ``p_i = (i z / n) mod 1``, ``i = 1..n``.

    Rows are computed on demand, so a point set is never stored unless it is
    explicitly converted with :func:`numpy.asarray`, which is refused above
    :data:`MATERIALIZE_LIMIT` points.
    """

    def __init__(self, gv: GeneratingVector):
        self.gv = gv
        self._z = gv.reduced()

    def __len__(self) -> int:
        return self.gv.n

    def _rows(self, idx: np.ndarray) -> np.ndarray:
        # i runs 1..n; exact integer residue, then one rounding in the division
        return (np.outer(idx, self._z) % self.gv.n) / self.gv.n

    def __getitem__(self, k):
        if isinstance(k, slice):
            return self._rows(np.arange(1, self.gv.n + 1, dtype=np.int64)[k])
        k = int(k)
        if k < 0:
            k += self.gv.n
        if not 0 <= k < self.gv.n:
            raise IndexError(k)
        return self._rows(np.array([k + 1], dtype=np.int64))[0]

    def chunks(self, size: int = _CHUNK) -> Iterator[np.ndarray]:
        """Blocks of consecutive points in index order."""
        for start in range(1, self.gv.n + 1, size):
            stop = min(start + size, self.gv.n + 1)
            yield self._rows(np.arange(start, stop, dtype=np.int64))

    def __iter__(self):
        for block in self.chunks():
            yield from block

    def __array__(self, dtype=None, copy=None):
        if self.gv.n > MATERIALIZE_LIMIT:
            raise ResourceError(f"refusing to materialize {self.gv.n} points; iterate chunks() instead")
        out = self._rows(np.arange(1, self.gv.n + 1, dtype=np.int64))
        return out if dtype is None else out.astype(dtype)


def lattice_points(gv: GeneratingVector) -> LatticePoints:
    """Points of the rank-1 lattice in ``[0,1)^d``; the last one is the origin."""
    return LatticePoints(gv)


def scale_points(points, box: BoxDomain) -> np.ndarray:
    """Map points from the unit cube to ``box`` by ``x_j = (b_j - a_j) p_j + a_j``."""
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != box.d:
        raise DomainError(f"points have dimension {pts.shape[1]}, box has {box.d}")
    out = pts * box.lengths + box.lower
    return out[0] if single else out


def _check_scan(d: int, hmax: int) -> None:
    if int(hmax) != hmax or hmax < 0:
        raise DomainError(f"hmax must be a non-negative integer, got {hmax!r}")
    if (2 * hmax + 1) ** d > DUAL_SCAN_BUDGET:
        raise ResourceError(f"dual scan of (2*{hmax}+1)^{d} indices exceeds {DUAL_SCAN_BUDGET}")


def _dual_blocks(gv: GeneratingVector, hmax: int) -> Iterator[np.ndarray]:
    # one block per value of the first coordinate keeps memory at (2 hmax + 1)^(d-1)
    z = gv.reduced()
    rng = np.arange(-hmax, hmax + 1, dtype=np.int64)
    if gv.d == 1:
        rest = np.zeros((1, 0), dtype=np.int64)
    else:
        rest = np.stack(np.meshgrid(*([rng] * (gv.d - 1)), indexing="ij"), -1).reshape(-1, gv.d - 1)
    rest_dot = rest @ z[1:] if gv.d > 1 else np.zeros(1, dtype=np.int64)
    for h1 in rng:
        keep = (h1 * z[0] + rest_dot) % gv.n == 0
        block = np.column_stack([np.full(int(keep.sum()), h1, dtype=np.int64), rest[keep]])
        if h1 == 0:
            block = block[np.any(block != 0, axis=1)]
        yield block


def dual_lattice(gv: GeneratingVector, hmax: int) -> np.ndarray:
    """All nonzero ``h`` with ``|h|_inf <= hmax`` and ``h . z = 0 (mod n)``, one per row."""
    _check_scan(gv.d, hmax)
    blocks = list(_dual_blocks(gv, hmax))
    return np.concatenate(blocks) if blocks else np.zeros((0, gv.d), dtype=np.int64)


def _omega_table(n: int, alpha: int) -> np.ndarray:
    """``(-1)**(alpha+1) B_{2 alpha}(k/n) / (2 alpha)!`` for ``k = 0..n-1``.

    Built on ``k <= n/2`` and mirrored, so ``table[k] == table[n - k]`` exactly.
    """
    half = np.arange(0, n // 2 + 1, dtype=np.int64)
    vals = _eval_unit(2 * alpha, half / n)
    vals *= (-1) ** (alpha + 1) / math.factorial(2 * alpha)
    table = np.empty(n)
    table[: half.size] = vals
    table[half.size:] = vals[1 : n - half.size + 1][::-1]
    return table


def _radicand_sum(gv: GeneratingVector, table: np.ndarray) -> tuple[float, float]:
    """Float ``e^2`` and the mean ``|P_i - 1|`` it was cancelled from."""
    # accumulate P_i - 1 directly: (P - 1)(1 + w) + w, no cancellation against 1
    z = gv.reduced()
    parts = []
    for start in range(1, gv.n + 1, _CHUNK):
        i = np.arange(start, min(start + _CHUNK, gv.n + 1), dtype=np.int64)
        excess = np.zeros(i.size)
        for zj in z:
            w = table[(i * zj) % gv.n]
            excess = excess * (1.0 + w) + w
        parts.append(excess)
    scale = exact_sum(np.abs(p) for p in parts) / gv.n
    return exact_sum(parts) / gv.n, scale


def _integer_table(n: int, alpha: int) -> tuple[list, int]:
    # B_{2a}(k/n) = sum_m c_m ((2k - n) / (2n))^m; clear all denominators
    coeffs = centered_coefficients(2 * alpha)
    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in coeffs]
    deg = 2 * alpha
    denom = lcm * (2 * n) ** deg * math.factorial(deg)
    sign = (-1) ** (alpha + 1)
    table = []
    for k in range(n):
        t = 2 * k - n
        num = sum(c * t ** m * (2 * n) ** (deg - m) for m, c in enumerate(ints))
        table.append(denom + sign * num)
    return table, denom


def wce_squared_exact(gv: GeneratingVector, alpha: int) -> Fraction:
    """Squared worst-case error in exact rational arithmetic (O(n d) big-integer ops)."""
    table, denom = _integer_table(gv.n, int(alpha))
    z = [int(v) for v in gv.reduced()]
    total = 0
    for i in range(1, gv.n + 1):
        prod = 1
        for zj in z:
            prod *= table[(i * zj) % gv.n]
        total += prod
    return Fraction(total - gv.n * denom ** gv.d, gv.n * denom ** gv.d)


def _finish_wce(radicand: float) -> float:
    if not math.isfinite(radicand):
        raise ComputationError(f"non-finite squared worst-case error {radicand}")
    if radicand < 0.0:
        if radicand < RADICAND_TOLERANCE:
            raise ComputationError(f"negative squared worst-case error {radicand:.3e}")
        return 0.0
    return math.sqrt(radicand)


def wce_korobov_closed_form(gv: GeneratingVector, alpha: int, *, exact: bool | None = None) -> float:
    """Worst-case error of the lattice rule in the unweighted Korobov space.

    Uses ``e^2 = (1/n) sum_i prod_j [1 + (-1)**(alpha+1) B_{2 alpha}({i z_j / n}) / (2 alpha)!] - 1``,
    which equals the dual-lattice series ``sum_{h != 0} prod_j r_alpha(h_j)**-2``.

    ``e^2`` is a cancellation of terms of size about ``(2 pi)**(-2 alpha)``, so
    in double precision it is only resolved down to roughly ``1e-16`` times
    that size.  With ``exact=None`` an unresolved float result is recomputed
    in rational arithmetic when ``n <= MATERIALIZE_LIMIT``; ``exact=True``
    forces that path and ``exact=False`` forbids it.
    """
    if int(alpha) != alpha or alpha < 1:
        raise DomainError(f"alpha must be an integer >= 1, got {alpha!r}")
    alpha = int(alpha)
    _check_degree(2 * alpha)
    if exact:
        return _finish_wce(float(wce_squared_exact(gv, alpha)))
    radicand, scale = _radicand_sum(gv, _omega_table(gv.n, alpha))
    unresolved = radicand < 1e3 * np.finfo(float).eps * scale
    if exact is None and unresolved and gv.n <= MATERIALIZE_LIMIT:
        return _finish_wce(float(wce_squared_exact(gv, alpha)))
    return _finish_wce(radicand)


def wce_korobov_bruteforce(gv: GeneratingVector, alpha: int, hmax: int) -> float:
    """Truncated dual-lattice series; a lower bound that increases to the exact value."""
    if int(alpha) != alpha or alpha < 1:
        raise DomainError(f"alpha must be an integer >= 1, got {alpha!r}")
    _check_scan(gv.d, hmax)
    c = (2.0 * math.pi) ** (-2 * alpha)
    parts = []
    for block in _dual_blocks(gv, hmax):
        if block.size == 0:
            continue
        h = np.abs(block).astype(float)
        # r_alpha(0) = 1, r_alpha(h) = |2 pi h|^alpha
        factors = np.where(h == 0.0, 1.0, c * np.where(h == 0.0, 1.0, h) ** (-2 * alpha))
        parts.append(np.prod(factors, axis=1))
    return math.sqrt(exact_sum(parts))


def brute_force_tail_bound(d: int, alpha: int, hmax: int) -> float:
    """Upper bound on the squared-error mass with some ``|h_j| > hmax``.

    Uses ``sum_{|h|>H} |2 pi h|^{-2 alpha} <= 2 (2 pi)^{-2 alpha} H^{1-2alpha} / (2 alpha - 1)``
    and ``sum_h r_alpha(h)^-2 = 1 + 2 zeta(2 alpha) (2 pi)^{-2 alpha}`` per axis.
    Valid for any ``n`` because dropping the congruence only enlarges the sum.
    """
    if hmax < 1:
        return math.inf
    c = (2.0 * math.pi) ** (-2 * alpha)
    full = 1.0 + 2.0 * c * _zeta(2 * alpha)
    tail = 2.0 * c * hmax ** (1 - 2 * alpha) / (2 * alpha - 1)
    return d * tail * full ** (d - 1)


def _zeta(s: int) -> float:
    # even s = 2k: zeta(2k) = (-1)^(k+1) B_2k (2 pi)^2k / (2 (2k)!), B_2k = B_2k(0) exactly
    k = s // 2
    b2k = float(sum(c * Fraction(-1, 2) ** j for j, c in enumerate(centered_coefficients(s))))
    return (-1) ** (k + 1) * b2k * (2 * math.pi) ** s / (2 * math.factorial(s))


def wce_scaled_box_bound(gv: GeneratingVector, alpha: int, box: BoxDomain) -> float:
    """``prod_j max(1, b_j - a_j)**(alpha + 1/2)`` times the unit-cube worst-case error."""
    if box.d != gv.d:
        raise DomainError(f"box has dimension {box.d}, generating vector has {gv.d}")
    factor = math.prod(max(1.0, L) ** (alpha + 0.5) for L in box.lengths)
    return factor * wce_korobov_closed_form(gv, alpha)


def _coprimes(n: int) -> np.ndarray:
    cand = np.arange(1, n, dtype=np.int64)
    return cand[np.gcd(cand, n) == 1]


def cbc_construct(n: int, d: int, alpha: int, *, rel_tie: float = 1e-12) -> GeneratingVector:
    """Greedy component-by-component minimization of the Korobov worst-case error.

    Scores within ``rel_tie`` of the best, or within the rounding noise of the
    cancelling sum, count as ties (mathematically equal scores can differ in
    the last bits), and ties go to the smallest ``z_s``.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"CBC needs n >= 2, got {n!r}")
    if int(d) != d or d < 1:
        raise DomainError(f"CBC needs d >= 1, got {d!r}")
    if int(alpha) != alpha or alpha < 1:
        raise DomainError(f"alpha must be an integer >= 1, got {alpha!r}")
    n, d, alpha = int(n), int(d), int(alpha)
    _check_degree(2 * alpha)
    table = _omega_table(n, alpha)
    cands = _coprimes(n)
    i = np.arange(1, n + 1, dtype=np.int64)
    excess = np.zeros(n)
    z: list[int] = []
    block = max(1, (1 << 22) // n)
    for _ in range(d):
        scores = np.empty(cands.size)
        noise = 0.0
        for s in range(0, cands.size, block):
            c = cands[s : s + block]
            w = table[np.outer(c, i) % n]
            new = excess * (1.0 + w) + w
            scores[s : s + c.size] = new.sum(axis=1)
            noise = max(noise, float(np.abs(new).sum(axis=1).max()))
        best = scores.min()
        # scores cancel terms of size ~noise/n; rounding can separate true ties
        window = rel_tie * abs(best) + 1e3 * np.finfo(float).eps * noise
        pick = int(cands[np.flatnonzero(scores <= best + window)[0]])
        z.append(pick)
        w = table[(i * pick) % n]
        excess = excess * (1.0 + w) + w
    return GeneratingVector(n, tuple(z))


def write_generating_vector(gv: GeneratingVector, path) -> None:
    """Write the one-line record ``n d z_1 ... z_d``."""
    Path(path).write_text(" ".join(str(v) for v in (gv.n, gv.d, *gv.z)) + "\n")


def read_generating_vector(path) -> GeneratingVector:
    """Parse a record written by :func:`write_generating_vector`."""
    fields = Path(path).read_text().split()
    try:
        nums = [int(f) for f in fields]
    except ValueError as exc:
        raise DomainError(f"{path}: non-integer field in generating-vector file") from exc
    if len(nums) < 3 or len(nums) != 2 + nums[1]:
        raise DomainError(f"{path}: expected 'n d z_1 ... z_d'")
    return GeneratingVector(nums[0], tuple(nums[2:]))
