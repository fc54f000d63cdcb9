"""Core vocabulary: domains, dense F2 tensors, direct sums, and distance.

A function f on [n1] x ... x [nd] is a direct sum when it splits as
f(a1, ..., ad) = f1(a1) XOR ... XOR fd(ad).  In +/-1 notation the same
objects are exactly the rank-1 sign tensors.
"""

import numpy as np

from rank1check import (
    BinaryTensor,
    DirectSum,
    Shape,
    delta,
    distance,
    flip,
    materialize,
    reindex,
    splice,
    tensor_to_text,
)

# A 2 x 3 x 2 domain.  Points enumerate in row-major order, last axis fastest.
shape = Shape((2, 3, 2))
print("domain:", shape.dims, "->", shape.size, "points")
print("first four points:", list(shape.points())[:4])

# Build a direct sum from per-axis bit vectors and look at its dense table.
ds = DirectSum(shape, [[0, 1], [1, 0, 1], [0, 0]])
f = materialize(ds)
print("\ndirect sum components (canonical):",
      [list(map(int, c)) for c in ds.components])
print("materialized bits:", "".join(str(b) for b in f.bits))

# The canonical form pushes every component's value at 0 into component one,
# so equality of direct sums is plain bit equality.
same = DirectSum(shape, [[1, 0], [0, 1, 0], [1, 1]])
print("same function, different raw components:", same == ds,
      "and tables agree:", materialize(same) == f)

# Counting: a shape has exactly 2^(1 + sum(n_i - 1)) distinct direct sums.
print("\ndistinct direct sums on", shape.dims, "=", DirectSum.count(shape))

# Distance is an exact rational: the fraction of disagreeing entries.
bits = f.bits.copy()
bits[3] ^= 1
g = BinaryTensor(shape, bits)
print("one flipped entry -> distance", distance(f, g))

# Splices and the axes-of-disagreement mask drive everything downstream.
a, b = (0, 2, 1), (1, 2, 0)
print("\ndelta mask of", a, b, "=", bin(delta(a, b)))
print("splice (a on axes {0}):", splice(a, b, 0b001))

# Reindexing axes and flipping all bits both preserve distances.
rng = np.random.default_rng(0)
perms = [rng.permutation(n).tolist() for n in shape.dims]
print("\ndistance preserved under reindex:",
      distance(f, g) == distance(reindex(f, perms), reindex(g, perms)))
print("distance preserved under flip:",
      distance(f, g) == distance(flip(f), flip(g)))

# The one-per-file text format; writers emit exactly this layout.
print("\ntext format:")
print(tensor_to_text(g), end="")
