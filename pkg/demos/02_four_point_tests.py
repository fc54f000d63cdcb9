"""The randomized membership tests, one trial at a time.

Four testers share a theme: read f at a handful of points whose pattern
cancels on every direct sum, and reject when the parity comes out 1.
"""

from rank1check import (
    DirectSum,
    Shape,
    materialize,
    rng_for,
    run_trial,
    sample_randomness,
)
from rank1check.harness import GeneratorSpec, generate

shape = Shape((3, 3, 3))
rng = rng_for(42)

# Any direct sum is accepted by every trial of every tester: each per-axis
# value lands in the queried points an even number of times.
f = materialize(DirectSum.random(shape, rng))
for kind in ("sic-subsets", "sic-cube", "shapka", "conjectured"):
    outcomes = [run_trial(f, kind, sample_randomness(kind, shape, rng))
                for _ in range(2000)]
    print(f"{kind:12s} on a direct sum: {sum(o.accepted for o in outcomes)}/2000 accepted")

# A uniformly random tensor gets caught often.
g = generate(GeneratorSpec("uniform-random", shape, seed=7))
print()
for kind in ("sic-subsets", "sic-cube", "shapka", "conjectured"):
    outcomes = [run_trial(g, kind, sample_randomness(kind, shape, rng))
                for _ in range(2000)]
    rejected = sum(not o.accepted for o in outcomes)
    print(f"{kind:12s} on random noise: rejected {rejected}/2000")

# Peek inside one trial: the subsets form queries the base point plus three
# splices indexed by S, T, and their symmetric difference.
r = sample_randomness("sic-subsets", shape, rng)
out = run_trial(g, "sic-subsets", r)
print("\none subsets trial: S =", bin(r.s), " T =", bin(r.t))
for q in out.queries:
    print("  queried", q, "->", g.value(q))
print("accepted:", out.accepted)

# Query budgets: 4 for the four-point tests, d+2 for the hybrid-set test.
r = sample_randomness("shapka", shape, rng)
out = run_trial(g, "shapka", r)
print(f"\nhybrid-set trial reads {len(out.queries)} points (d + 2 = {shape.d + 2} cap)")
