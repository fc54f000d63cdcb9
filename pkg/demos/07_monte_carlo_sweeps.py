"""Monte-Carlo estimation against exact oracles, and reproducible sweeps.

Estimates carry Wilson 95% intervals; identical seeds reproduce identical
tallies; exact oracle columns attach whenever the enumeration budget allows.
The conjectured fourth tester is included as an experiment only: its curves
are reported, nothing about its soundness is asserted.
"""

from rank1check import (
    Shape,
    estimate_rejection,
    exact_rejection,
    nearest_direct_sum,
    parse_sweep_config,
    run_sweep,
    sweep_csv,
)
from rank1check.harness import DEFAULT_SWEEP_CONFIG, GeneratorSpec, generate

shape = Shape((2, 2, 2))

# Estimate vs exact on a lightly corrupted direct sum.
f = generate(GeneratorSpec("corrupted-direct-sum", shape, seed=3, flips=1))
exact = exact_rejection(f, "shapka").value
est = estimate_rejection(f, "shapka", trials=100000, seed=9)
print("exact rejection:", exact, "=", float(exact))
print(f"estimate: {est.estimate:.5f} in [{est.lo:.5f}, {est.hi:.5f}] "
      f"({est.rejections} rejections)")
print("interval covers the exact value:",
      est.lo <= float(exact) <= est.hi)

# Same seed, same tally; new seed, new tally.
again = estimate_rejection(f, "shapka", trials=100000, seed=9)
other = estimate_rejection(f, "shapka", trials=100000, seed=10)
print("\nreproducible:", est == again, " different seed differs:", est != other)

# Rejection grows with corruption; the conjectured tester's curve is shown
# alongside the proven ones for comparison.
print("\nflips  sic-subsets  shapka  conjectured  exact-distance")
for flips in (0, 1, 2, 4):
    g = generate(GeneratorSpec("corrupted-direct-sum", shape, seed=5,
                               flips=flips))
    cells = [
        float(exact_rejection(g, kind).value)
        for kind in ("sic-subsets", "shapka", "conjectured")
    ]
    dist = float(nearest_direct_sum(g).distance)
    print(f"{flips:5d}  {cells[0]:11.4f}  {cells[1]:6.4f}  {cells[2]:11.4f}"
          f"  {dist:14.4f}")

# A full sweep: cartesian product of shapes, tests, generators, seeds, with
# exact columns attached and byte-stable CSV output.
config = parse_sweep_config(DEFAULT_SWEEP_CONFIG)
rows, summary = run_sweep(config, master_seed=2026)
csv = sweep_csv(rows)
print("\nsweep produced", len(rows), "rows; first three:")
for line in csv.splitlines()[:4]:
    print("  ", line)
print("\nminimum rejection/distance ratio per test:")
for test, ratio in sorted(summary.items()):
    print(f"  {test:12s} {ratio} = {float(ratio):.4f}")

# Monotonicity, reported rather than asserted: mean estimated rejection of
# the corrupted rows should not decrease with the corruption rate.
print("\nmean estimated rejection by corruption rate (corrupted rows):")
for param in sorted({r.param for r in rows if r.kind == "corrupted-direct-sum"}):
    ests = [r.estimate.estimate for r in rows if r.param == param]
    print(f"  {param:12s} {sum(ests) / len(ests):.4f}")

rows2, _ = run_sweep(config, master_seed=2026)
print("\nsecond run byte-identical:", sweep_csv(rows2) == csv)
