"""One-shot randomized trials for the direct-sum tests.

Each trial consumes explicit randomness, so the same code path serves
Monte-Carlo estimation and exhaustive enumeration.  Trials are pure
functions of (tensor, randomness) and safe to run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import (
    BinaryTensor,
    CubePoint,
    MaskMismatchError,
    Point,
    Shape,
    ShapeMismatchError,
    cube_ones,
    cube_zero,
    delta,
    full_mask,
    point_with,
    project,
    scatter_bits,
    splice,
)

SIC_SUBSETS = "sic-subsets"
SIC_CUBE = "sic-cube"
SHAPKA = "shapka"
BLR = "blr"
CONJECTURED = "conjectured"

TENSOR_TEST_KINDS = (SIC_SUBSETS, SIC_CUBE, SHAPKA, CONJECTURED)
ALL_TEST_KINDS = TENSOR_TEST_KINDS + (BLR,)


@dataclass(frozen=True)
class SicSubsetsRandomness:
    """Two points and two axis subsets (bitmasks over 0..d-1)."""

    a: Point
    b: Point
    s: int
    t: int


@dataclass(frozen=True)
class SicCubeRandomness:
    """Two points and two vertices of the cube they span."""

    a: Point
    b: Point
    x: CubePoint
    y: CubePoint


@dataclass(frozen=True)
class ShapkaRandomness:
    a: Point
    b: Point


@dataclass(frozen=True)
class BlrRandomness:
    """Two elements of F2^D, packed as ints with bit i <-> coordinate i."""

    x: int
    y: int


@dataclass(frozen=True)
class ConjecturedRandomness:
    a: Point
    b: Point
    x: CubePoint


TrialRandomness = Union[
    SicSubsetsRandomness,
    SicCubeRandomness,
    ShapkaRandomness,
    BlrRandomness,
    ConjecturedRandomness,
]


@dataclass(frozen=True)
class TrialOutcome:
    accepted: bool
    queries: tuple


def _check_point(f: BinaryTensor, p: Point) -> None:
    if not f.shape.contains(p):
        raise ShapeMismatchError(f"point {p} outside domain {f.shape.dims}")


def sic_subsets_trial(f: BinaryTensor, r: SicSubsetsRandomness) -> TrialOutcome:
    """Four-query parity check over the spliced points picked by S, T, S^T.

    The queried points are a itself and, for each of S, T and their symmetric
    difference, the point taking b's coordinates on the subset and a's off it.
    Those four selections form a coset {0, S, T, S^T}, so on a direct sum each
    per-axis value appears an even number of times and the parity vanishes.
    """
    _check_point(f, r.a)
    _check_point(f, r.b)
    d = f.shape.d
    fm = full_mask(d)
    if r.s & ~fm or r.t & ~fm or r.s < 0 or r.t < 0:
        raise ValueError(f"subset out of range for {d} axes")
    u = r.s ^ r.t
    queries = (
        r.a,
        splice(r.b, r.a, r.s),
        splice(r.b, r.a, r.t),
        splice(r.b, r.a, u),
    )
    parity = 0
    for q in queries:
        parity ^= f.value(q)
    return TrialOutcome(parity == 0, queries)


def sic_cube_trial(f: BinaryTensor, r: SicCubeRandomness) -> TrialOutcome:
    """Affinity check of f restricted to the cube spanned by a and b."""
    _check_point(f, r.a)
    _check_point(f, r.b)
    m = delta(r.a, r.b)
    if r.x.mask != m or r.y.mask != m:
        raise MaskMismatchError("cube points must live on the cube spanned by a, b")
    queries = (
        project(r.a, r.b, cube_zero(m)),
        project(r.a, r.b, r.x),
        project(r.a, r.b, r.y),
        project(r.a, r.b, r.x ^ r.y),
    )
    parity = 0
    for q in queries:
        parity ^= f.value(q)
    return TrialOutcome(parity == 0, queries)


def shapka_trial(f: BinaryTensor, r: ShapkaRandomness) -> TrialOutcome:
    """Parity over b, the d one-coordinate hybrids of a, and a when d is even.

    The parity is taken over the defining multiset, so coincident queries
    cancel in pairs; this is what makes the check vanish identically on
    direct sums and agree with the local-view residual at b.
    """
    _check_point(f, r.a)
    _check_point(f, r.b)
    d = f.shape.d
    queries = [r.b]
    queries.extend(point_with(r.a, j, r.b[j]) for j in range(d))
    if d % 2 == 0:
        queries.append(r.a)
    parity = 0
    for q in queries:
        parity ^= f.value(q)
    return TrialOutcome(parity == 0, tuple(queries))


def blr_affinity_trial(table, r: BlrRandomness) -> TrialOutcome:
    """BLR affinity check g(0) ^ g(x) ^ g(y) ^ g(x^y) == 0 on a truth table."""
    t = np.ascontiguousarray(table, dtype=np.uint8).ravel()
    n = t.size
    if n == 0 or n & (n - 1):
        raise ValueError(f"table length {n} is not a power of two")
    if not (0 <= r.x < n and 0 <= r.y < n):
        raise ValueError("BLR randomness outside the cube")
    queries = (0, r.x, r.y, r.x ^ r.y)
    parity = int(t[0]) ^ int(t[r.x]) ^ int(t[r.y]) ^ int(t[r.x ^ r.y])
    return TrialOutcome(parity == 0, queries)


def conjectured_trial(f: BinaryTensor, r: ConjecturedRandomness) -> TrialOutcome:
    """Four-query parity through the cube's bottom, top, x, and complement of x.

    Soundness of this test is an open conjecture; nothing beyond completeness
    is asserted anywhere in the package.
    """
    _check_point(f, r.a)
    _check_point(f, r.b)
    m = delta(r.a, r.b)
    if r.x.mask != m:
        raise MaskMismatchError("cube point must live on the cube spanned by a, b")
    ones = cube_ones(m)
    queries = (
        project(r.a, r.b, cube_zero(m)),
        project(r.a, r.b, r.x),
        project(r.a, r.b, ones),
        project(r.a, r.b, r.x ^ ones),
    )
    parity = 0
    for q in queries:
        parity ^= f.value(q)
    return TrialOutcome(parity == 0, queries)


def run_trial(f: BinaryTensor, kind: str, r: TrialRandomness) -> TrialOutcome:
    if kind == SIC_SUBSETS:
        return sic_subsets_trial(f, r)
    if kind == SIC_CUBE:
        return sic_cube_trial(f, r)
    if kind == SHAPKA:
        return shapka_trial(f, r)
    if kind == CONJECTURED:
        return conjectured_trial(f, r)
    if kind == BLR:
        return blr_affinity_trial(blr_table(f), r)
    raise ValueError(f"unknown test kind {kind!r}")


def blr_table(f: BinaryTensor) -> np.ndarray:
    """View an all-binary-axes tensor as a truth table on F2^d.

    Row-major layout makes the flat bit index the point itself (axis 0 is the
    most significant bit), and XOR of indices is coordinatewise XOR.
    """
    if any(n != 2 for n in f.shape.dims):
        raise ValueError(
            f"BLR needs every axis of size 2, got shape {f.shape.dims}"
        )
    return f.bits


def _sample_point(shape: Shape, rng: np.random.Generator) -> Point:
    return tuple(int(rng.integers(0, n)) for n in shape.dims)


def sample_randomness(kind: str, shape: Shape, rng: np.random.Generator) -> TrialRandomness:
    """Draw one trial's randomness from the test's stated distribution.

    Deterministic in the generator state; the draw order is a's axes, b's
    axes, then the test-specific extras.
    """
    d = shape.d
    if kind == BLR:
        if any(n != 2 for n in shape.dims):
            raise ValueError("BLR randomness needs an all-binary shape")
        x = int(rng.integers(0, shape.size))
        y = int(rng.integers(0, shape.size))
        return BlrRandomness(x, y)
    a = _sample_point(shape, rng)
    b = _sample_point(shape, rng)
    if kind == SIC_SUBSETS:
        s = int(rng.integers(0, 1 << d))
        t = int(rng.integers(0, 1 << d))
        return SicSubsetsRandomness(a, b, s, t)
    if kind == SIC_CUBE:
        m = delta(a, b)
        k = m.bit_count()
        x = scatter_bits(m, int(rng.integers(0, 1 << k)))
        y = scatter_bits(m, int(rng.integers(0, 1 << k)))
        return SicCubeRandomness(a, b, CubePoint(m, x), CubePoint(m, y))
    if kind == SHAPKA:
        return ShapkaRandomness(a, b)
    if kind == CONJECTURED:
        m = delta(a, b)
        k = m.bit_count()
        x = scatter_bits(m, int(rng.integers(0, 1 << k)))
        return ConjecturedRandomness(a, b, CubePoint(m, x))
    raise ValueError(f"unknown test kind {kind!r}")
