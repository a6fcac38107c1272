import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from gaplab.errors import ConsistencyError
from gaplab.measures import RealSequence, counting_function
from gaplab.sequences import (IntervalFamily, ShortPartition, build_gap_weight, classify_long,
                              cluster_sequence, energy_condition_partials,
                              energy_condition_terms, interval_energy, midpoint_double,
                              regularity_integral, uniformity_report)


def integers(W):
    return RealSequence(np.arange(-W, W + 1, dtype=float))


# --- interval families ------------------------------------------------------

def test_classify_long_examples():
    dyadic = IntervalFamily.from_pairs([(2.0 ** n, 2.0 ** n + 2.0 ** (n - 1)) for n in range(1, 40)])
    terms = dyadic.shortness_terms
    assert terms[-1] == pytest.approx(0.25, rel=1e-6)
    assert classify_long(dyadic, [8, 16, 32]).verdict == "long-trend"
    squares = IntervalFamily.from_pairs([(n * n, n * n + 1) for n in range(1, 400)])
    assert classify_long(squares, [50, 100, 200, 399]).verdict == "short"
    assert classify_long(IntervalFamily.from_pairs([(0, 1)]), [1, 2, 3]).verdict == "short"
    with pytest.raises(ValueError):
        IntervalFamily.from_pairs([(0, 2), (1, 3)])


def test_generated_partition_is_short_and_contiguous():
    P = ShortPartition.generate(-5000, 5000, 0.4)
    assert np.all(P.lo[1:] == P.hi[:-1])
    assert P.window[0] <= -5000 and P.window[1] >= 5000
    assert classify_long(P, [100, 200, 400, len(P)]).verdict == "short"


def test_gap_weight_examples_and_lipschitz():
    w = build_gap_weight(IntervalFamily.from_pairs([(0, 2)]))
    assert w(1.0) == 1.0 and w(0.5) == 0.5 and w(3.0) == 0.0
    fam = IntervalFamily.from_pairs([(-7, -2), (1, 4), (6, 15)])
    w = build_gap_weight(fam)
    rng = np.random.default_rng(2)
    s, t = rng.uniform(-20, 20, (2, 2000))
    assert np.all(np.abs(w(s) - w(t)) <= np.abs(s - t) + 1e-15)


def test_poisson_integral_matches_quadrature():
    fam = IntervalFamily.from_pairs([(-7, -2), (1, 4), (6, 15)])
    w = build_gap_weight(fam)
    for X in (3.0, 10.0, 30.0):
        brk = sorted({-X, X} | {v for v in np.concatenate([fam.lo, fam.hi, (fam.lo + fam.hi) / 2]) if -X < v < X})
        ref = sum(quad(lambda t: float(w(t)) / (1 + t * t), p, q, epsabs=1e-13)[0]
                  for p, q in zip(brk[:-1], brk[1:]))
        assert w.poisson_integral(X) == pytest.approx(ref, rel=1e-10)


def test_dyadic_poisson_partials_keep_growing():
    fam = IntervalFamily.from_pairs([(2.0 ** n, 2.0 ** n + 2.0 ** (n - 1)) for n in range(1, 30)])
    parts = build_gap_weight(fam).poisson_partials(2.0 ** np.arange(6, 20))
    inc = np.diff(parts)
    assert np.all(inc > 0.5 * inc[0])


# --- regularity --------------------------------------------------------------

def test_regularity_integral_matches_quadrature():
    rng = np.random.default_rng(4)
    seq = RealSequence(np.sort(rng.uniform(-30, 30, 40)))
    X, d = 25.0, 0.7
    brk = sorted({-X, X, 0.0} | {p for p in seq.points if -X < p < X})
    ref = sum(quad(lambda x: abs(counting_function(seq, x) - d * x) / (1 + x * x), p, q,
                   epsabs=1e-13, limit=200)[0] for p, q in zip(brk[:-1], brk[1:]))
    assert regularity_integral(seq, d, X) == pytest.approx(ref, rel=1e-9)


def test_regularity_integral_integer_envelopes():
    Z = integers(20000)
    vals = [regularity_integral(Z, 1.0, X) for X in (10, 100, 1000, 10000)]
    assert max(vals) <= math.pi + 1
    # |n - 2x| ~ |x|, so the integral follows log(1 + X^2)
    for X in (1e2, 1e3, 1e4):
        assert regularity_integral(Z, 2.0, X) == pytest.approx(math.log1p(X * X), rel=0.2)
    assert regularity_integral(RealSequence([50.0]), 0.0, 10.0) == 0.0


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.05, 1.0))
def test_regularity_convex_in_d(d, h):
    seq = RealSequence(np.cumsum(np.random.default_rng(7).uniform(0.3, 1.7, 60)) - 30)
    f = [regularity_integral(seq, dd, 20.0) for dd in (d - h, d, d + h)]
    assert f[1] <= 0.5 * (f[0] + f[2]) + 1e-12


# --- energies ----------------------------------------------------------------

def test_interval_energy_examples():
    assert interval_energy(RealSequence([0.0, 1.0]), (0, 1)) == 0.0
    four = RealSequence([0.0, 1.0, 2.0, 3.0])
    assert interval_energy(four, (0, 3)) == pytest.approx(2 * math.log(12), abs=1e-13)
    assert interval_energy(four, (0, 3), method="pairs") == pytest.approx(4.969813299576001, abs=1e-12)
    assert interval_energy(RealSequence([5.0]), (0, 10)) == 0.0


def test_interval_energy_brute_force():
    rng = np.random.default_rng(11)
    pts = np.sort(rng.uniform(0, 20, 25))
    seq = RealSequence(pts)
    ref = math.fsum(math.log(abs(x - y)) for x, y in itertools.permutations(pts, 2))
    assert interval_energy(seq, (0, 20)) == pytest.approx(ref, abs=1e-9)
    # translation invariance
    tau = 3.0
    moved = RealSequence(pts + tau)
    assert interval_energy(moved, (tau, 20 + tau)) == pytest.approx(interval_energy(seq, (0, 20)), abs=1e-11)


def test_energy_terms_dual_algorithms_and_sign():
    Z = integers(300)
    P = ShortPartition.from_breakpoints(
        np.concatenate([-(2.0 ** np.arange(9, -1, -1)), [0.0], 2.0 ** np.arange(0, 10)]))
    a = energy_condition_terms(Z, P, method="prefix").terms
    b = energy_condition_terms(Z, P, method="pairs").terms
    assert np.max(np.abs(a - b)) < 1e-9
    assert np.all(a >= -1e-9)


def test_energy_partials_plateau_for_separated_sequence():
    Z = integers(2000)
    P = ShortPartition.generate(-2001, 2002)
    parts = energy_condition_terms(Z, P).window_partials([250, 500, 1000, 2000])
    inc = np.diff(parts)
    assert np.all(inc[1:] <= 0.9 * inc[:-1])


def test_energy_requires_cover():
    with pytest.raises(ValueError):
        energy_condition_partials(integers(100), ShortPartition.generate(-50, 50))


# --- reports -----------------------------------------------------------------

def test_uniformity_report_verdicts():
    assert uniformity_report(integers(1024), 1.0).verdict == "pass"
    assert uniformity_report(integers(1024), 2.0).verdict == "fail-regularity"
    evens = RealSequence(np.arange(-1024, 1025, 2, dtype=float))
    rep = uniformity_report(evens, 1.0)
    assert rep.verdict == "fail-regularity"
    assert rep.evidence["outer_relative_defect"] == pytest.approx(0.5, abs=0.15)
    assert uniformity_report(midpoint_double(evens), 1.0).verdict == "pass"


def test_cluster_sequence_fails_energy():
    P = ShortPartition.generate(-97, 97)
    seq = cluster_sequence(P, 1.0, decay=0.25, window=96)
    rep = uniformity_report(seq, 1.0, P)
    assert rep.verdict == "fail-energy"
    # counts still match the density cell by cell
    inner = np.maximum(np.abs(P.lo), np.abs(P.hi)) <= 96
    assert np.array_equal(P.counts(seq)[inner], np.rint(P.lengths[inner]).astype(int))
    with pytest.raises(ValueError):
        cluster_sequence(ShortPartition.generate(-4001, 4001), 1.0, decay=0.25)


def test_midpoint_double():
    out = midpoint_double(RealSequence([0.0, 2.0, 4.0]))
    assert out.points.tolist() == [0.0, 1.0, 2.0, 3.0, 4.0]
    Z = RealSequence(np.arange(10, dtype=float))
    D = midpoint_double(Z)
    assert len(D) == 2 * len(Z) - 1
    assert np.all(np.diff(D.points) > 0)
    for a, b in [(0, 3), (2, 9), (4, 5)]:
        assert (counting_function(D, float(b)) - counting_function(D, float(a))
                == 2 * (counting_function(Z, float(b)) - counting_function(Z, float(a))))
