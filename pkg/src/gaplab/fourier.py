"""
Fourier transforms of discrete measures, spectral-gap residuals and
lattice measures with a prescribed gap.

The transform convention is ``hat(x) = sum_k mass_k * exp(1j * x * site_k)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import roots_legendre

from .errors import InfeasibleGapError, ProfileSupportError, ZeroMeasureError
from .measures import DiscreteMeasure, RealSequence

# bytes budget for one (nodes x atoms) complex block in ft_eval
_BLOCK = 2 ** 22


def ft_eval(sigma: DiscreteMeasure, xs) -> np.ndarray:
    """
    Evaluate the Fourier transform of `sigma` at the points `xs`.

    Atoms are accumulated in ascending ``|mass|`` order.
    """
    xs = np.asarray(xs, dtype=float)
    shape = xs.shape
    xs = xs.ravel()
    if sigma.is_zero:
        return np.zeros(shape, dtype=complex)
    order = np.argsort(np.abs(sigma.masses), kind="stable")
    s = sigma.sites[order]
    m = sigma.masses[order]
    out = np.empty(xs.size, dtype=complex)
    step = max(1, _BLOCK // max(1, s.size))
    for i in range(0, xs.size, step):
        blk = xs[i:i + step]
        out[i:i + step] = np.exp(1j * np.outer(blk, s)) @ m
    return out.reshape(shape)


def quadrature_nodes(a: float, span: float) -> int:
    """Default Gauss-Legendre node count on ``[-a, a]`` for atoms spread over `span`."""
    n = max(64, int(np.ceil(8.0 * a * span / np.pi)))
    return n + (n % 2)


def gauss_legendre(a: float, nodes: int):
    x, w = roots_legendre(nodes)
    return a * x, a * w


@dataclass(frozen=True)
class GapResidual:
    """
    Normalized transform energy on the gap,
    ``(1/(2a)) * int_{-a}^{a} |hat|^2 dx / ||sigma||^2``.
    """

    gap_radius: float
    quad_nodes: np.ndarray
    value: float
    normalization: float

    def __float__(self):
        return self.value


def gap_residual(sigma: DiscreteMeasure, a: float, nodes: Optional[int] = None) -> GapResidual:
    if a <= 0:
        raise ValueError("gap radius must be positive")
    if sigma.is_zero:
        raise ZeroMeasureError("gap residual of the zero measure")
    if nodes is None:
        nodes = quadrature_nodes(a, float(sigma.sites[-1] - sigma.sites[0]))
    if nodes <= 0 or nodes % 2:
        raise ValueError("node count must be a positive even integer")
    x, w = gauss_legendre(a, nodes)
    vals = ft_eval(sigma, x)
    tv2 = sigma.total_variation ** 2
    value = float(np.sum(w * np.abs(vals) ** 2) / (2.0 * a) / tv2)
    return GapResidual(float(a), x, value, tv2)


def bump(u, sharpness: float = 1.0):
    """Standard bump ``exp(-sharpness/(1-u^2))`` on ``(-1, 1)``, zero elsewhere."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-sharpness / (1.0 - u[inside] ** 2))
    return out


@dataclass(frozen=True)
class PeriodicProfile:
    """
    Nonnegative smooth function on one period ``[0, period)``, zero outside
    ``support``. Evaluated periodically.
    """

    period: float
    support: Tuple[float, float]
    evaluator: Callable

    def __call__(self, x):
        x = np.mod(np.asarray(x, dtype=float), self.period)
        return self.evaluator(x)

    @classmethod
    def centered_bump(cls, period: float, gap_radius: float, fill: float = 0.95,
                      sharpness: float = 1.0) -> "PeriodicProfile":
        """
        Bump centered at ``period/2`` occupying `fill` of the window
        ``(gap_radius, period - gap_radius)``.

        Larger `sharpness` concentrates the bump, which speeds up early
        coefficient decay (small lattices reach smaller residuals) at the
        cost of the far coefficients sinking into round-off sooner.
        """
        if sharpness <= 0:
            raise ValueError("sharpness must be positive")
        if not 0 < fill < 1:
            raise ValueError("fill must lie in (0, 1)")
        c = period / 2.0
        h = fill * (c - gap_radius)
        if h <= 0:
            raise InfeasibleGapError(f"gap radius {gap_radius} leaves no room in period {period}")
        return cls(period, (c - h, c + h), lambda x: bump((x - c) / h, sharpness))

    def check_gap(self, gap_radius: float):
        lo, hi = self.support
        if not (gap_radius < lo < hi < self.period - gap_radius):
            raise ProfileSupportError(
                f"profile support {self.support} must lie strictly inside "
                f"({gap_radius}, {self.period - gap_radius})")


def _lattice_coefficients(spacing, profile, n_max, samples=None):
    period = profile.period
    lo, hi = profile.support
    if samples is None:
        # enough samples across the support for a spectrally accurate trapezoid
        samples = max(4096, 8 * (2 * n_max + 1), int(np.ceil(400 * period / (hi - lo))))
    x = np.arange(samples) * (period / samples)
    phi = profile(x)
    n = np.arange(-n_max, n_max + 1)
    c = np.exp(-1j * spacing * np.outer(n, x)) @ phi / samples
    # real part = coefficients of the symmetrized profile, which keeps the gap
    return n, c.real


def make_highpass_lattice(spacing: float, gap_radius: float, n_atoms: int,
                          profile: Optional[PeriodicProfile] = None) -> DiscreteMeasure:
    """
    Lattice measure ``sum_{|n|<=N} c_n delta(n*spacing)`` whose transform
    vanishes on ``[-gap_radius, gap_radius]`` up to truncation.

    The transform of a lattice measure is periodic with period
    ``2*pi/spacing``; ``c_n`` are the Fourier coefficients of a smooth
    profile that vanishes on the gap modulo the period, so the truncated
    series is a high-pass signal up to the coefficient tail.

    Parameters
    ----------
    spacing : float
        Lattice step.
    gap_radius : float
        Requested gap radius, must be below ``pi/spacing``.
    n_atoms : int
        Odd number of lattice sites, ``N = (n_atoms-1)/2``.
    profile : PeriodicProfile, optional
        Defaults to :meth:`PeriodicProfile.centered_bump`.

    Returns
    -------
    DiscreteMeasure
        Coefficients below ``1e-16 * max|c_n|`` are dropped.
    """
    if spacing <= 0 or gap_radius <= 0:
        raise ValueError("spacing and gap radius must be positive")
    if n_atoms < 1 or n_atoms % 2 == 0:
        raise ValueError("n_atoms must be a positive odd integer")
    period = 2 * np.pi / spacing
    if gap_radius >= np.pi / spacing:
        raise InfeasibleGapError(
            f"gap radius {gap_radius} >= pi/spacing = {np.pi / spacing}: "
            "a lattice transform is periodic and cannot vanish on a full period")
    if profile is None:
        profile = PeriodicProfile.centered_bump(period, gap_radius)
    if not np.isclose(profile.period, period, rtol=1e-12, atol=0):
        raise ProfileSupportError(f"profile period {profile.period} != 2*pi/spacing = {period}")
    profile.check_gap(gap_radius)
    n, c = _lattice_coefficients(spacing, profile, (n_atoms - 1) // 2)
    c = np.where(np.abs(c) < 1e-16 * np.max(np.abs(c)), 0.0, c)
    return DiscreteMeasure(n * spacing, c, label=f"highpass(spacing={spacing:g}, a={gap_radius:g}, n={n_atoms})")


def highpass_residual_bound(spacing: float, gap_radius: float, n_atoms: int,
                            profile: Optional[PeriodicProfile] = None) -> float:
    """
    Truncation estimate for :func:`make_highpass_lattice`.

    The transform error on the gap is at most the dropped coefficient tail;
    the tail is estimated from coefficients ``N < |n| <= 2N + 1`` and returned
    as ``(tail / ||sigma||)^2``, the scale of the normalized residual.
    """
    period = 2 * np.pi / spacing
    if profile is None:
        profile = PeriodicProfile.centered_bump(period, gap_radius)
    N = (n_atoms - 1) // 2
    n, c = _lattice_coefficients(spacing, profile, 2 * N + 1)
    inner = np.abs(n) <= N
    tail = np.sum(np.abs(c[~inner]))
    return float((tail / np.sum(np.abs(c[inner]))) ** 2)


def clark_lattice(a: float, alpha_phase: float = 0.0, window: float = 100.0):
    """
    Level set ``{t : exp(1j*a*t) = exp(1j*alpha_phase)}`` in ``[-window, window]``
    with its point masses ``2*pi/a``.

    Returns
    -------
    seq : RealSequence
    masses : numpy.ndarray
    """
    if a <= 0:
        raise ValueError("a must be positive")
    step = 2 * np.pi / a
    offset = np.mod(alpha_phase, 2 * np.pi) / a
    seq = RealSequence.lattice(-window, window, step, offset)
    return seq, np.full(len(seq), step)


def transform_trace(sigma: DiscreteMeasure, xs) -> np.ndarray:
    """Rows ``(x, Re, Im, |hat|^2)`` for CSV export."""
    xs = np.asarray(xs, dtype=float)
    v = ft_eval(sigma, xs)
    return np.column_stack([xs, v.real, v.imag, np.abs(v) ** 2])
