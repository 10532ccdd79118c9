"""Zero-error refinement with unbounded rounds, at finite expected cost.

After a coarse ternary exchange, any point still in doubt lies in a small
rectangle whose decision boundary is exactly the rectangle's diagonal.  The
two nodes then stream one binary-expansion bit each per round; the first
equal bit pair pins the point into an error-free quadrant and both sides
halt knowing the answer.  The number of extra rounds is geometric(1/2), so
the expected total cost is finite even though the error is exactly zero.
"""

import math

import numpy as np

from babai_refine import (
    LatticeParams,
    Point2,
    SimConfig,
    nbar_infinite,
    rbar_infinite,
    round1_distributions,
    run_batch_infinite,
    run_infinite_rounds,
    sample_cell_arrays,
    simulate,
    transcript_to_json,
)

params = LatticeParams(rho=1.0, theta=math.acos(0.3))
q, p = round1_distributions(params)
print("round-1 message distributions (symbols -1, 0, +1):")
print("  S2 band  Q =", tuple(round(v, 5) for v in q.probs))
print("  S1 slot  P =", tuple(round(v, 5) for v in p.probs))
print()

for x in (Point2(0.0, 0.0), Point2(0.45, 0.45), Point2(-0.47, 0.42)):
    t = run_infinite_rounds(x, params)
    print(f"x = {tuple(x)}: rounds={t.rounds} bits={t.total_bits:.4f} "
          f"decision={tuple(t.decision)}")
print()
print("full transcript for (0.45, 0.45):")
print(" ", transcript_to_json(run_infinite_rounds(Point2(0.45, 0.45), params)))
print()

rep = simulate(SimConfig(params=params, scheme="infinite", trials=500_000, seed=3))
print(f"500k trials: errors = {rep.empirical_pe * rep.trials:.0f}, "
      f"unhalted = {rep.unhalted_count}")
print(f"mean bits   {rep.mean_bits:.5f}  vs closed form {rbar_infinite(params):.5f}")
print(f"mean rounds {rep.mean_rounds:.5f}  vs closed form {nbar_infinite(params):.5f}")
print()

# the geometric halting law, conditioned on entering an error rectangle
x1, x2 = sample_cell_arrays(params, np.arange(2_000_000, dtype=np.uint64), seed=5)
out = run_batch_infinite(params, x1, x2)
cond = out["extra_rounds"][out["entered_error_rect"]]
print(f"{len(cond)} trials entered an error rectangle; extra-round law:")
print("   n   empirical   2^-n")
for n in range(1, 9):
    print(f"  {n:2d}   {np.mean(cond == n):9.6f}   {2.0 ** -n:.6f}")
