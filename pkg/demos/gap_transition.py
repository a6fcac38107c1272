"""
How large can the spectral gap be when the positive mass must sit on A and
the negative mass on B? For evens/odds the answer is pi, and the minimal
gap residual switches from ~0 to clearly positive near that radius.

Run: python3 demos/gap_transition.py   (about half a minute)
"""
import numpy as np

from gaplab.gapsolver import (alternating_density, estimate_gap_characteristic,
                              interlacing_check, lattice_sites, min_gap_residual, GapProblem,
                              sweep)

A, B = lattice_sites("evens", 32), lattice_sites("odds", 32)
print(f"alternating density of the pair: {alternating_density(A, B):.3f} (predicts a transition at pi)\n")
radii = np.array([0.5, 0.8, 0.95, 1.05, 1.2, 1.5]) * np.pi
print(f"{'a/pi':>6} {'min residual':>14}")
for a, res, *_ in sweep(A, B, radii, restarts=8):
    print(f"{a / np.pi:6.2f} {res:14.3e}")

br = estimate_gap_characteristic(A, B, 0.5 * np.pi, 1.5 * np.pi, restarts=8)
print(f"\nbisection bracket: [{br.lo / np.pi:.4f} pi, {br.hi / np.pi:.4f} pi]")

sol = min_gap_residual(GapProblem(A, B, 0.9 * np.pi, restarts=8))
ok, _ = interlacing_check(sol.measure.pruned(1e-9))
print(f"optimizer at 0.9 pi: positive and negative atoms interlace -> {ok}")
