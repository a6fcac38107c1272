"""
Entire functions through their zeros: 1/F as a sum of residues, the
residue measure of sin(pi z), and what happens to sinc when two adjacent
zeros are merged into a double zero at their midpoint.

Run: python3 demos/krein_functions.py
"""
import numpy as np

from gaplab.krein import (ZeroSetFunction, double_zero_probe, double_zero_replacement,
                          partial_fraction_check, residue_measure)

z = np.array([0.5 + 0.5j, 2.3, 1.7j, -3.4 + 0.2j])
print("truncated sine: max |1/F - residue series| on a few points")
for N in (25, 50, 100, 200, 400):
    print(f"  N = {N:3d}: {partial_fraction_check(ZeroSetFunction.sine(N), z):.3e}")

_, rep = residue_measure(ZeroSetFunction.sine(400))
print(f"\nresidue masses of sin(pi z) are not summable: {rep.non_summable}")

xs = np.linspace(-50, 50, 4001) + 1e-3 * np.pi
for N in (200, 400):
    n = np.arange(-N, N + 1)
    zeros = n[n != 0].astype(float)
    scan = double_zero_replacement(np.sinc, zeros, xs)
    print(f"double-zero sinc, N = {N}: sup over [-50, 50] = {scan.sup:.5f}")
g = float(scan.midpoints[0])
print(f"near the midpoint {g}: G(g+eps) / G(g+2eps) = "
      f"{double_zero_probe(np.sinc, zeros, g, 1e-3):.4f} (1/4 for a double zero)")
