"""Exact ground truth at desk scale: enumeration beats sampling.

Every tester has an exact rejection probability obtained by enumerating its
full randomness space; nearest-codeword searches do the same over all
direct sums or all affine functions.  Everything is an exact rational.
"""

from fractions import Fraction

from rank1check import (
    BinaryTensor,
    Shape,
    exact_blr_rejection,
    exact_rejection,
    nearest_affine,
    nearest_direct_sum,
)

shape = Shape((2, 2, 2))

# Sweep all 256 tensors on (2,2,2): rejection vanishes exactly on the 16
# direct sums, and the worst rejection/distance ratio is the empirical
# soundness constant at this scale.
min_ratio = None
members = 0
for idx in range(256):
    f = BinaryTensor(shape, [(idx >> i) & 1 for i in range(8)])
    eps = exact_rejection(f, "sic-subsets").value
    dist = nearest_direct_sum(f).distance
    if dist == 0:
        members += 1
        assert eps == 0
    else:
        ratio = eps / dist
        min_ratio = ratio if min_ratio is None else min(min_ratio, ratio)
print("direct sums among 256 tensors:", members)
print("min rejection/distance over the rest:", min_ratio,
      "=> distance <=", 1 / min_ratio, "x rejection")

# The same sweep for the (d+2)-query tester: rejection dominates distance
# outright, with no hidden constant.
worst_gap = Fraction(1)
for idx in range(256):
    f = BinaryTensor(shape, [(idx >> i) & 1 for i in range(8)])
    eps = exact_rejection(f, "shapka").value
    dist = nearest_direct_sum(f).distance
    assert eps >= dist
    if dist > 0:
        worst_gap = min(worst_gap, eps - dist)
print("hybrid-set tester: rejection >= distance on all 256, min slack",
      worst_gap)

# Affinity testing on truth tables.  AND is 1/4 from affine but rejected
# with probability 3/8; majority on three bits is also 1/4 from affine.
and_gate = [0, 0, 0, 1]
print("\nAND: rejection", exact_blr_rejection(and_gate).value,
      " nearest affine", nearest_affine(and_gate).distance,
      " witness", nearest_affine(and_gate).witness)
maj3 = [0, 0, 0, 1, 0, 1, 1, 1]
print("MAJ3: rejection", exact_blr_rejection(maj3).value,
      " nearest affine", nearest_affine(maj3).distance,
      " witness", nearest_affine(maj3).witness)

# Exact values let the two formulations be compared with no tolerance at all.
f = BinaryTensor(shape, [1, 0, 1, 1, 0, 0, 1, 0])
r1 = exact_rejection(f, "sic-subsets")
r2 = exact_rejection(f, "sic-cube")
print("\nsubset form:", r1.rejecting, "/", r1.total,
      " cube form:", r2.rejecting, "/", r2.total,
      " equal:", r1.value == r2.value)
