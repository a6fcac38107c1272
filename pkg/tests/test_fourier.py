import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaplab.errors import InfeasibleGapError, ProfileSupportError, ZeroMeasureError
from gaplab.fourier import (PeriodicProfile, clark_lattice, ft_eval, gap_residual,
                            highpass_residual_bound, make_highpass_lattice,
                            quadrature_nodes, transform_trace)
from gaplab.measures import DiscreteMeasure


def test_ft_small_cases():
    xs = np.linspace(-5, 5, 11)
    assert np.allclose(ft_eval(DiscreteMeasure([0.0], [1.0]), xs), 1.0)
    odd = DiscreteMeasure([-1.0, 1.0], [-0.5, 0.5])
    assert np.allclose(ft_eval(odd, xs), 1j * np.sin(xs), atol=1e-15)


def test_ft_matches_double_loop():
    rng = np.random.default_rng(0)
    sigma = DiscreteMeasure(rng.uniform(-30, 30, 64), rng.normal(size=64))
    xs = rng.uniform(-4, 4, 100)
    ref = np.array([sum(m * complex(np.cos(x * s), np.sin(x * s))
                        for s, m in zip(sigma.sites, sigma.masses)) for x in xs])
    got = ft_eval(sigma, xs)
    assert np.max(np.abs(got - ref)) <= 1e-12 * np.max(np.abs(ref))
    # conjugate symmetry for real masses
    assert np.allclose(ft_eval(sigma, -xs), np.conj(got), rtol=0, atol=1e-13)


def test_gap_residual_closed_forms():
    assert gap_residual(DiscreteMeasure([0.0], [1.0]), 2.0).value == pytest.approx(1.0, abs=1e-14)
    odd = DiscreteMeasure([-1.0, 1.0], [-0.5, 0.5])
    for a in [0.3, 1.0, 2.7]:
        want = 0.5 - np.sin(2 * a) / (4 * a)
        assert gap_residual(odd, a).value == pytest.approx(want, abs=1e-13)
    with pytest.raises(ZeroMeasureError):
        gap_residual(DiscreteMeasure.zero(), 1.0)


def test_node_policy():
    assert quadrature_nodes(1.0, 1.0) == 64
    n = quadrature_nodes(np.pi, 200.0)
    assert n % 2 == 0 and n >= 1600


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 10), st.floats(-50, 50), st.floats(0.2, 3.0))
def test_residual_scale_and_shift_invariant(c, tau, a):
    rng = np.random.default_rng(5)
    sigma = DiscreteMeasure(np.arange(-10, 11, dtype=float), rng.normal(size=21))
    base = gap_residual(sigma, a).value
    assert gap_residual(sigma.scaled(-c), a).value == pytest.approx(base, rel=1e-10)
    assert gap_residual(sigma.shifted(tau), a, nodes=512).value == pytest.approx(base, rel=1e-8, abs=1e-14)


def test_highpass_small_and_alternating():
    # 41 coefficients need a concentrated bump; the default one stalls near 1e-7
    profile = PeriodicProfile.centered_bump(2 * np.pi, np.pi / 2, sharpness=8.0)
    sigma = make_highpass_lattice(1.0, np.pi / 2, 41, profile)
    assert gap_residual(sigma, np.pi / 2).value < 1e-10
    sigma = make_highpass_lattice(1.0, np.pi / 2, 41)
    n = np.rint(sigma.sites).astype(int)
    b = sigma.masses * (-1.0) ** n
    # c_n = (-1)^n b_n with b_n the real, even cosine coefficients of the centered bump
    assert np.array_equal(n, -n[::-1])
    assert np.allclose(b, b[::-1], rtol=0, atol=1e-15)
    assert b[n == 0][0] > 0 and b[n == 1][0] > 0


def test_highpass_edge_radius():
    sigma = make_highpass_lattice(1.0, 0.9 * np.pi, 201)
    assert gap_residual(sigma, 0.85 * np.pi).value < 1e-8


def test_highpass_residual_shrinks_with_atoms():
    res = [gap_residual(make_highpass_lattice(1.0, 0.8 * np.pi, n), 0.76 * np.pi).value
           for n in (51, 101, 201)]
    assert res[0] > res[1] > res[2]
    assert highpass_residual_bound(1.0, 0.8 * np.pi, 201) < highpass_residual_bound(1.0, 0.8 * np.pi, 51)


def test_highpass_errors():
    with pytest.raises(InfeasibleGapError):
        make_highpass_lattice(1.0, 1.1 * np.pi, 21)
    bad = PeriodicProfile(2 * np.pi, (1.0, 3.0), lambda x: 0 * x)
    with pytest.raises(ProfileSupportError):
        make_highpass_lattice(1.0, np.pi / 2, 21, bad)
    with pytest.raises(ValueError):
        make_highpass_lattice(1.0, np.pi / 2, 20)


def test_clark_lattice():
    seq, m = clark_lattice(2 * np.pi, 0.0, window=5)
    assert np.allclose(seq.points, np.arange(-5, 6)) and np.allclose(m, 1.0)
    seq, m = clark_lattice(np.pi, 0.0, window=6)
    assert np.allclose(seq.points, np.arange(-6, 7, 2)) and np.allclose(m, 2.0)
    seq, m = clark_lattice(1.3, 0.0)
    assert 0.0 in seq.points
    assert np.allclose(np.diff(seq.points), 2 * np.pi / 1.3)
    assert np.all(m == 2 * np.pi / 1.3)


def test_transform_trace_columns():
    tr = transform_trace(DiscreteMeasure([-1.0, 1.0], [-0.5, 0.5]), [0.0, 1.0])
    assert tr.shape == (2, 4)
    assert tr[1, 2] == pytest.approx(np.sin(1.0))
    assert tr[1, 3] == pytest.approx(np.sin(1.0) ** 2)
