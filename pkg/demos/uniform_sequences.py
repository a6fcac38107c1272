"""
Regularity and logarithmic energy of real sequences: the integers are
1-uniform, the even integers are not (wrong density), their midpoint
doubling is again, and a sequence with the right counts but clumped points
fails the energy condition.

Run: python3 demos/uniform_sequences.py
"""
import numpy as np

from gaplab.measures import RealSequence
from gaplab.sequences import ShortPartition, cluster_sequence, midpoint_double, uniformity_report

W = 1024
ints = RealSequence(np.arange(-W, W + 1, dtype=float))
evens = RealSequence(np.arange(-W, W + 1, 2, dtype=float))
P = ShortPartition.generate(-97, 97)
cases = [("integers, d=1", ints, 1.0, None),
         ("integers, d=2", ints, 2.0, None),
         ("even integers, d=1", evens, 1.0, None),
         ("midpoint-doubled evens, d=1", midpoint_double(evens), 1.0, None),
         ("clustered sequence, d=1", cluster_sequence(P, 1.0, decay=0.25, window=96), 1.0, P)]
for name, seq, d, part in cases:
    print(f"{name:30s} -> {uniformity_report(seq, d, part).verdict}")
