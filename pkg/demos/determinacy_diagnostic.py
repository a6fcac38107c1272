"""
Is a positive measure pinned down by its transform on [-a, a]? The growth of
the Poisson log-integral of the point-evaluation majorant separates the two
cases: it stays bounded when other measures share the transform and keeps
growing when none do.

Run: python3 demos/determinacy_diagnostic.py
"""
import numpy as np

from gaplab.determinacy import determinacy_verdict, riesz_log_integral
from gaplab.fourier import make_highpass_lattice
from gaplab.measures import DiscreteMeasure, jordan_decompose

windows, grids = [8, 16, 32, 64], [65, 129]

plus, _ = jordan_decompose(make_highpass_lattice(1.0, np.pi / 2, 1001))
s = np.round(np.arange(-2000, 2001) * 0.01, 12)
gauss = DiscreteMeasure(s, np.exp(-s ** 2))

for name, mu, a in [("positive part of a high-pass measure", plus, np.pi / 2),
                    ("Gaussian weights on a fine grid", gauss, 1.0)]:
    table = riesz_log_integral(mu, a, windows, grids)
    v = determinacy_verdict(table)
    print(f"{name} at radius {a:.4f}: {v.label}")
    for row in table.to_rows():
        print("   ", row)
    print()
