import warnings

import numpy as np
import pytest

from gaplab.errors import PreconditionError
from gaplab.fourier import ft_eval, make_highpass_lattice
from gaplab.gapsolver import interlacing_check
from gaplab.krein import (ZeroSetFunction, double_zero_probe, double_zero_replacement,
                          oscillation_rate_check, pair_zeros, partial_fraction_check,
                          residue_measure)
from gaplab.measures import DiscreteMeasure


def random_separated_roots(rng, degree, sep=0.5):
    gaps = sep + rng.exponential(1.0, degree - 1)
    r = np.concatenate([[0.0], np.cumsum(gaps)])
    return r - r.mean() + rng.normal()


def test_two_term_identity():
    F = ZeroSetFunction.from_roots([-1.0, 1.0])
    assert np.allclose(F.derivative_values, [-2.0, 2.0])
    rng = np.random.default_rng(0)
    z = rng.normal(size=50) * 3 + 1j * rng.normal(size=50)
    z = z[np.min(np.abs(z[:, None] - np.array([-1.0, 1.0])), axis=1) > 1e-3]
    assert partial_fraction_check(F, z) < 1e-12
    with pytest.raises(ValueError):
        partial_fraction_check(F, [1.0 + 1e-4j])


def test_random_polynomials_identity_and_derivatives():
    rng = np.random.default_rng(5)
    for _ in range(40):
        deg = int(rng.integers(2, 13))
        roots = random_separated_roots(rng, deg)
        F = ZeroSetFunction.from_roots(roots)
        # derivative oracle: numpy's polynomial derivative
        p = np.poly(roots)
        assert np.allclose(F.derivative_values, np.polyval(np.polyder(p), F.zeros.points), rtol=1e-9)
        z = rng.normal(size=20) * 3 + 1j * rng.uniform(0.2, 2.0, 20)
        assert partial_fraction_check(F, z) < 1e-10


def test_sine_truncation_decay():
    z = np.array([0.5 + 0.5j, 2.3, 1.7j, -3.4 + 0.2j])
    Ns = [25, 50, 100, 200, 400]
    dev = np.array([partial_fraction_check(ZeroSetFunction.sine(N), z) for N in Ns])
    # at least 1/N decay per doubling; the symmetric alternating tail actually gives ~1/N^2
    assert np.all(dev[1:] <= 0.55 * dev[:-1])
    slope = np.polyfit(np.log(Ns), np.log(dev), 1)[0]
    assert slope < -1.5


def test_residue_measures():
    mu, rep = residue_measure(ZeroSetFunction.from_roots([-1.0, 1.0]))
    assert mu.sites.tolist() == [-1.0, 1.0] and mu.masses.tolist() == [-0.5, 0.5]
    xs = np.linspace(-4, 4, 17)
    assert np.allclose(ft_eval(mu, xs), 1j * np.sin(xs), atol=1e-15)
    assert not rep.non_summable
    mu, rep = residue_measure(ZeroSetFunction.sine(400))
    n = np.rint(mu.sites).astype(int)
    assert np.allclose(mu.masses, (-1.0) ** n / np.pi)
    assert rep.non_summable
    assert np.allclose(rep.increment_ratios[1:], 2.0, rtol=1e-6)


def test_residues_interlace_for_polynomials():
    rng = np.random.default_rng(9)
    for _ in range(30):
        roots = random_separated_roots(rng, int(rng.integers(2, 13)))
        mu, _ = residue_measure(ZeroSetFunction.from_roots(roots))
        ok, _ = interlacing_check(mu)
        assert ok


def test_pairing_convention():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        pairs, dropped = pair_zeros([-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0])
    assert dropped == []
    assert sorted(map(tuple, pairs.tolist())) == [(-4, -3), (-2, -1), (1, 2), (3, 4)]
    with pytest.warns(UserWarning):
        pairs, dropped = pair_zeros([-2.0, -1.0, 0.0, 1.0, 2.0, 3.0])
    # 0 joins the negative side: (0, -1) pairs, -2 is left over; 3 is left over on the right
    assert sorted(dropped) == [-2.0, 3.0]
    assert sorted(map(tuple, pairs.tolist())) == [(-1, 0), (1, 2)]


def test_symbolic_small_case():
    sp = pytest.importorskip("sympy")
    zs = sp.symbols("z")
    roots = [1, 2, -1, 3]
    Fsym = sp.prod([zs - r for r in roots])
    Gsym = sp.expand((zs + 1) * (zs - 3) * (zs - sp.Rational(3, 2)) ** 2)
    F = ZeroSetFunction.from_roots(roots)
    x = np.array([-2.7, -0.3, 0.4, 1.3, 1.8, 2.6, 4.1, 7.0])
    scan = double_zero_replacement(F, [1.0, 2.0], x)
    want = np.array([float(Gsym.subs(zs, sp.Rational(str(v)))) for v in x])
    assert np.allclose(scan.values, want, rtol=1e-12, atol=0)
    assert Fsym.subs(zs, 1) == 0


def test_sinc_replacement_stable_and_double_zero():
    sinc = np.sinc
    xs = np.linspace(-50, 50, 4001) + 1e-3 * np.pi
    sups = []
    for N in (200, 400):
        n = np.arange(-N, N + 1)
        zeros = n[n != 0].astype(float)
        sups.append(double_zero_replacement(sinc, zeros, xs).sup)
    assert abs(sups[1] - sups[0]) <= 0.1 * sups[0]
    n = np.arange(-200, 201)
    zeros = n[n != 0].astype(float)
    scan = double_zero_replacement(sinc, zeros, xs)
    for g in scan.midpoints[:6]:
        r = double_zero_probe(sinc, zeros, float(g), 1e-3)
        assert 0.2 <= r <= 0.3 and r == pytest.approx(0.25, rel=0.01)
    # away from the midpoints G is finite and nonzero
    assert np.all(np.isfinite(scan.log_abs))


def test_replacement_rejects_scan_on_zero():
    with pytest.raises(ValueError):
        double_zero_replacement(np.sinc, [1.0, 2.0], [1.0])


def test_oscillation_rate_checks():
    for frac in (0.5, 0.8):
        a = frac * np.pi
        sig = make_highpass_lattice(1.0, a, 1001)
        rep = oscillation_rate_check(sig, a, np.arange(100, 401, 50))
        assert rep.passed and rep.observed >= frac * 0.95
    n = np.arange(-50, 51)
    alt = DiscreteMeasure(n, (-1.0) ** n + 0.1)
    with pytest.raises(PreconditionError, match="residual"):
        oscillation_rate_check(alt, np.pi / 2, [10, 20, 40])
