"""Exact ground truth by exhaustive enumeration.

Rejection probabilities are computed over the full randomness space of each
test and returned as integer counts, never floats.  Oracles refuse (raise
BudgetExceededError) rather than silently sample when a space is too large.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import (
    BinaryTensor,
    DirectSum,
    Point,
    Shape,
    axes_of,
    distance,
)
from . import testers

DEFAULT_BUDGET = 1 << 32


class BudgetExceededError(RuntimeError):
    """The enumeration space exceeds the configured budget."""


@dataclass(frozen=True)
class ExactRejection:
    """Rejection count over the test's full randomness space."""

    rejecting: int
    total: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.rejecting, self.total)


@dataclass(frozen=True)
class NearestResult:
    witness: object
    distance: Fraction


@dataclass(frozen=True)
class AffineWitness:
    """The affine function constant ^ XOR of the coordinates in `mask`."""

    constant: int
    mask: int

    def table(self, dim: int) -> np.ndarray:
        return (_parity_columns(dim, self.mask) ^ self.constant).astype(np.uint8)


def _check_budget(required: int, budget: int, what: str) -> None:
    if required > budget:
        raise BudgetExceededError(
            f"{what} needs {required} tuples, budget is {budget}"
        )


# ---------------------------------------------------------------------------
# Enumeration plans
# ---------------------------------------------------------------------------
# A plan is the full randomness space of a test over one shape, flattened to
# an index matrix (one row per tuple, one column per query) plus optional
# integer row weights.  Plans depend only on the shape and are cached.

@dataclass(frozen=True)
class _Plan:
    indices: np.ndarray          # (rows, queries) int64 flat indices
    weights: Optional[np.ndarray]  # (rows,) int64, None means all-ones
    total: int                   # full randomness-space size


_plan_cache: dict = {}
_plan_lock = threading.Lock()


def _pair_arrays(shape: Shape) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Coordinates and flat indices of all ordered point pairs (a, b)."""
    pts = shape.point_array()
    n = shape.size
    ia = np.repeat(np.arange(n, dtype=np.int64), n)
    ib = np.tile(np.arange(n, dtype=np.int64), n)
    return pts[ia], pts[ib], ia, ib


def _plan_sic_subsets(shape: Shape) -> _Plan:
    d = shape.d
    n = shape.size
    strides = np.asarray(shape.strides, dtype=np.int64)
    a, b, _, _ = _pair_arrays(shape)
    diff = (b - a) * strides
    base = (a * strides).sum(axis=1)
    # Flat index of the point taking b's coordinates on the subset `s`.
    spliced = np.empty((1 << d, n * n), dtype=np.int64)
    for s in range(1 << d):
        sel = np.array([(s >> i) & 1 for i in range(d)], dtype=bool)
        spliced[s] = base + diff[:, sel].sum(axis=1)
    blocks = []
    for s in range(1 << d):
        for t in range(1 << d):
            u = s ^ t
            blocks.append(np.stack([base, spliced[s], spliced[t], spliced[u]], axis=1))
    indices = np.concatenate(blocks, axis=0)
    return _Plan(indices, None, total=n * n * (1 << (2 * d)))


def _cube_flats(a_row: np.ndarray, b_row: np.ndarray, strides: np.ndarray) -> np.ndarray:
    """Flat indices of every vertex of the cube spanned by one (a, b) pair."""
    diff_axes = np.flatnonzero(a_row != b_row)
    m = diff_axes.size
    base = int((a_row * strides).sum())
    if m == 0:
        return np.array([base], dtype=np.int64)
    contrib = ((b_row - a_row) * strides)[diff_axes]
    vbits = (np.arange(1 << m, dtype=np.int64)[:, None] >> np.arange(m)) & 1
    return base + vbits @ contrib


def _plan_sic_cube(shape: Shape) -> _Plan:
    d = shape.d
    strides = np.asarray(shape.strides, dtype=np.int64)
    pts = shape.point_array()
    rows = []
    weights = []
    for a_row in pts:
        for b_row in pts:
            flats = _cube_flats(a_row, b_row, strides)
            m = flats.size.bit_length() - 1
            w = 1 << (2 * (d - m))
            x = np.repeat(np.arange(flats.size), flats.size)
            y = np.tile(np.arange(flats.size), flats.size)
            block = np.stack(
                [np.full(x.size, flats[0]), flats[x], flats[y], flats[x ^ y]], axis=1
            )
            rows.append(block)
            weights.append(np.full(x.size, w, dtype=np.int64))
    indices = np.concatenate(rows, axis=0)
    return _Plan(indices, np.concatenate(weights),
                 total=shape.size ** 2 * (1 << (2 * d)))


def _plan_shapka(shape: Shape) -> _Plan:
    d = shape.d
    strides = np.asarray(shape.strides, dtype=np.int64)
    a, b, _, _ = _pair_arrays(shape)
    base_a = (a * strides).sum(axis=1)
    base_b = (b * strides).sum(axis=1)
    cols = [base_b]
    cols.extend(base_a + (b[:, j] - a[:, j]) * strides[j] for j in range(d))
    if d % 2 == 0:
        cols.append(base_a)
    indices = np.stack(cols, axis=1)
    return _Plan(indices, None, total=shape.size ** 2)


def _plan_conjectured(shape: Shape) -> _Plan:
    d = shape.d
    strides = np.asarray(shape.strides, dtype=np.int64)
    pts = shape.point_array()
    rows = []
    weights = []
    for a_row in pts:
        for b_row in pts:
            flats = _cube_flats(a_row, b_row, strides)
            m = flats.size.bit_length() - 1
            w = 1 << (d - m)
            x = np.arange(flats.size)
            top = flats.size - 1
            block = np.stack(
                [np.full(flats.size, flats[0]), flats[x], np.full(flats.size, flats[top]),
                 flats[x ^ top]],
                axis=1,
            )
            rows.append(block)
            weights.append(np.full(flats.size, w, dtype=np.int64))
    indices = np.concatenate(rows, axis=0)
    return _Plan(indices, np.concatenate(weights), total=shape.size ** 2 * (1 << d))


def _plan_blr(dim: int) -> _Plan:
    n = 1 << dim
    x = np.repeat(np.arange(n, dtype=np.int64), n)
    y = np.tile(np.arange(n, dtype=np.int64), n)
    indices = np.stack([np.zeros_like(x), x, y, x ^ y], axis=1)
    return _Plan(indices, None, total=n * n)


def _space_size(shape: Shape, kind: str) -> int:
    n = shape.size
    d = shape.d
    if kind == testers.SIC_SUBSETS or kind == testers.SIC_CUBE:
        return n * n * (1 << (2 * d))
    if kind == testers.SHAPKA:
        return n * n
    if kind == testers.CONJECTURED:
        return n * n * (1 << d)
    if kind == testers.BLR:
        return n * n
    raise ValueError(f"unknown test kind {kind!r}")


_BUILDERS = {
    testers.SIC_SUBSETS: _plan_sic_subsets,
    testers.SIC_CUBE: _plan_sic_cube,
    testers.SHAPKA: _plan_shapka,
    testers.CONJECTURED: _plan_conjectured,
}


def _get_plan(shape: Shape, kind: str, budget: int) -> _Plan:
    _check_budget(_space_size(shape, kind), budget, f"{kind} enumeration")
    key = (shape.dims, kind)
    plan = _plan_cache.get(key)
    if plan is None:
        built = _BUILDERS[kind](shape)
        with _plan_lock:
            plan = _plan_cache.setdefault(key, built)
    return plan


def _apply_plan(bits: np.ndarray, plan: _Plan) -> int:
    vals = bits[plan.indices]
    parity = np.bitwise_xor.reduce(vals, axis=1)
    if plan.weights is None:
        return int(np.count_nonzero(parity))
    return int(plan.weights[parity != 0].sum())


def exact_rejection(f: BinaryTensor, kind: str, budget: int = DEFAULT_BUDGET) -> ExactRejection:
    """Exact rejection probability of one test on one tensor."""
    if kind == testers.BLR:
        return exact_blr_rejection(testers.blr_table(f), budget)
    plan = _get_plan(f.shape, kind, budget)
    return ExactRejection(_apply_plan(f.bits, plan), plan.total)


def exact_blr_rejection(table, budget: int = DEFAULT_BUDGET) -> ExactRejection:
    t = np.ascontiguousarray(table, dtype=np.uint8).ravel()
    n = t.size
    if n == 0 or n & (n - 1):
        raise ValueError(f"table length {n} is not a power of two")
    dim = n.bit_length() - 1
    _check_budget(n * n, budget, "BLR enumeration")
    key = ("blr-table", dim)
    plan = _plan_cache.get(key)
    if plan is None:
        with _plan_lock:
            plan = _plan_cache.setdefault(key, _plan_blr(dim))
    return ExactRejection(_apply_plan(t, plan), plan.total)


# ---------------------------------------------------------------------------
# Nearest codewords
# ---------------------------------------------------------------------------


_candidate_cache: dict = {}


def _ds_candidates(shape: Shape) -> tuple[np.ndarray, list]:
    key = shape.dims
    cached = _candidate_cache.get(key)
    if cached is None:
        sums = list(DirectSum.enumerate_all(shape))
        matrix = np.stack([ds.materialize().bits for ds in sums])
        with _plan_lock:
            cached = _candidate_cache.setdefault(key, (matrix, sums))
    return cached


def nearest_direct_sum(f: BinaryTensor, budget: int = DEFAULT_BUDGET) -> NearestResult:
    """Global minimum over all canonical direct sums.

    Ties go to the lexicographically smallest canonical bit-string, which is
    the enumeration order, so the first minimum wins.
    """
    count = DirectSum.count(f.shape)
    _check_budget(count, budget, "direct-sum enumeration")
    matrix, sums = _ds_candidates(f.shape)
    disagreements = np.count_nonzero(matrix != f.bits, axis=1)
    best = int(np.argmin(disagreements))
    return NearestResult(sums[best], Fraction(int(disagreements[best]), f.shape.size))


def _parity_columns(dim: int, mask: int) -> np.ndarray:
    """chi_mask evaluated on every point of F2^dim, in table order.

    Table order is row-major: coordinate i of point `n` is bit (dim-1-i).
    The mask is an axis mask (bit i <-> coordinate i).
    """
    n = np.arange(1 << dim)
    out = np.zeros(1 << dim, dtype=np.uint8)
    for axis in axes_of(mask):
        out ^= ((n >> (dim - 1 - axis)) & 1).astype(np.uint8)
    return out


_affine_cache: dict = {}


def _affine_tables(dim: int) -> tuple[np.ndarray, list[AffineWitness]]:
    cached = _affine_cache.get(dim)
    if cached is None:
        witnesses = [
            AffineWitness(c, mask) for c in (0, 1) for mask in range(1 << dim)
        ]
        matrix = np.stack([w.table(dim) for w in witnesses])
        with _plan_lock:
            cached = _affine_cache.setdefault(dim, (matrix, witnesses))
    return cached


def nearest_affine(table, budget: int = DEFAULT_BUDGET) -> NearestResult:
    """Minimum distance over all 2^(D+1) affine functions on F2^D.

    Ties go to the smallest (constant, mask) pair.
    """
    t = np.ascontiguousarray(table, dtype=np.uint8).ravel()
    n = t.size
    if n == 0 or n & (n - 1):
        raise ValueError(f"table length {n} is not a power of two")
    dim = n.bit_length() - 1
    _check_budget(2 << dim, budget, "affine enumeration")
    matrix, witnesses = _affine_tables(dim)
    disagreements = np.count_nonzero(matrix != t, axis=1)
    best = int(np.argmin(disagreements))
    return NearestResult(witnesses[best], Fraction(int(disagreements[best]), n))


# ---------------------------------------------------------------------------
# Local-view decoding
# ---------------------------------------------------------------------------


def local_view_decode(f: BinaryTensor, a: Point) -> DirectSum:
    """Direct sum assembled from f's one-coordinate views anchored at a.

    Component i maps x to f(a with coordinate i set to x); the last component
    additionally absorbs f(a) when d is even, which is exactly what makes the
    reconstruction residual at any b equal the (a, b) query-set parity.
    """
    a = f.shape.require_point(a)
    arr = f.as_nd()
    comps = []
    for i in range(f.shape.d):
        idx = list(a)
        idx[i] = slice(None)
        comps.append(np.array(arr[tuple(idx)], dtype=np.uint8))
    if f.shape.d % 2 == 0:
        comps[-1] = comps[-1] ^ np.uint8(f.value(a))
    return DirectSum(f.shape, comps)


def shapka_residual_identity_check(f: BinaryTensor, a: Point, b: Point) -> tuple[int, int]:
    """Both sides of the residual identity; they must agree for every input.

    Left: (f - local-view sum)(b).  Right: the query-set parity at (a, b).
    """
    a = f.shape.require_point(a)
    b = f.shape.require_point(b)
    ds = local_view_decode(f, a)
    lhs = f.value(b) ^ ds.eval(b)
    rhs = 0 if testers.shapka_trial(f, testers.ShapkaRandomness(a, b)).accepted else 1
    return lhs, rhs


def is_direct_sum(f: BinaryTensor) -> bool:
    """Exact membership test via decode-and-compare at the origin anchor."""
    return local_view_decode(f, f.shape.origin()).materialize() == f


def best_anchor_decode(f: BinaryTensor) -> tuple[Point, DirectSum, Fraction]:
    """Local-view decode at every anchor, keeping the closest reconstruction.

    An experiment toward a voting-style reconstruction; no optimality claim.
    Ties go to the first anchor in row-major order.
    """
    best = None
    for a in f.shape.points():
        ds = local_view_decode(f, a)
        dist = distance(f, ds.materialize())
        if best is None or dist < best[2]:
            best = (a, ds, dist)
    return best


# ---------------------------------------------------------------------------
# Biased characters
# ---------------------------------------------------------------------------


def biased_character_probability(s_size: int) -> Fraction:
    """Pr[chi_S(x) = 0] when each bit is 1 with probability 2/3: (1+(-1/3)^s)/2."""
    if s_size < 0:
        raise ValueError("set size must be nonnegative")
    return (1 + Fraction(-1, 3) ** s_size) / 2


def biased_character_probability_enumerated(s_size: int, dim: int | None = None) -> Fraction:
    """Same probability by summing weighted assignments on a dim-cube.

    S is taken to be the first s_size coordinates; the remaining coordinates
    only multiply every parity class by a total weight of one.
    """
    if dim is None:
        dim = s_size
    if s_size < 0 or dim < s_size:
        raise ValueError("need 0 <= s_size <= dim")
    zero_w = Fraction(1, 3)
    one_w = Fraction(2, 3)
    total = Fraction(0)
    for x in range(1 << dim):
        weight = Fraction(1)
        for i in range(dim):
            weight *= one_w if (x >> i) & 1 else zero_w
        parity = (x & ((1 << s_size) - 1)).bit_count() & 1
        if parity == 0:
            total += weight
    return total
