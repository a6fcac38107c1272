"""
Functions given by their real zeros: partial-fraction identities, residue
measures, double-zero replacement and sign-change rates of high-pass
measures.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import PreconditionError
from .fourier import gap_residual
from .measures import DiscreteMeasure, RealSequence, sign_change_report


@dataclass(frozen=True, eq=False)
class ZeroSetFunction:
    """
    A real entire function ``F`` with simple real zeros, its derivative at
    each zero and an evaluator ``F(z)`` for real or complex ``z``.
    """

    zeros: RealSequence
    derivative_values: np.ndarray
    evaluator: Callable

    def __post_init__(self):
        d = np.asarray(self.derivative_values, dtype=float).ravel()
        if d.size != len(self.zeros):
            raise ValueError("one derivative value per zero is required")
        if np.any(d == 0) or not np.all(np.isfinite(d)):
            raise ValueError("zeros must be simple (finite nonzero derivative)")
        object.__setattr__(self, "derivative_values", d)

    def __call__(self, z):
        return self.evaluator(z)

    @classmethod
    def from_roots(cls, roots, scale: float = 1.0) -> "ZeroSetFunction":
        """Polynomial ``scale * prod(z - r)``."""
        r = np.sort(np.asarray(roots, dtype=float).ravel())
        if r.size == 0:
            raise ValueError("need at least one root")
        diff = r[:, None] - r[None, :]
        np.fill_diagonal(diff, 1.0)
        deriv = scale * np.prod(diff, axis=1)

        def F(z):
            z = np.asarray(z)
            return scale * np.prod(z[..., None] - r, axis=-1)

        return cls(RealSequence(r), deriv, F)

    @classmethod
    def sine(cls, N: int) -> "ZeroSetFunction":
        """``sin(pi z)`` with its zeros truncated to ``[-N, N]``."""
        n = np.arange(-N, N + 1)
        return cls(RealSequence(n.astype(float)), np.pi * (-1.0) ** n, lambda z: np.sin(np.pi * np.asarray(z)))


def partial_fraction_check(F: ZeroSetFunction, samples, min_distance: float = 1e-3) -> float:
    """
    ``max |1/F(z) - sum_n 1/((z - l_n) F'(l_n))|`` over `samples`.

    Raises
    ------
    ValueError
        If a sample lies within `min_distance` of a zero.
    """
    z = np.asarray(samples, dtype=complex).ravel()
    lam = F.zeros.points
    D = z[:, None] - lam[None, :]
    if np.any(np.abs(D) < min_distance):
        raise ValueError(f"sample within {min_distance} of a zero")
    series = np.sum(1.0 / (D * F.derivative_values[None, :]), axis=1)
    return float(np.max(np.abs(1.0 / F(z) - series)))


@dataclass
class SummabilityReport:
    """Partial sums of ``sum 1/|F'(l_n)|`` over ``|l_n| <= X`` for doubling windows."""

    windows: np.ndarray
    partials: np.ndarray
    increment_ratios: np.ndarray
    non_summable: bool

    def to_dict(self):
        return {"windows": self.windows.tolist(), "partials": self.partials.tolist(),
                "increment_ratios": self.increment_ratios.tolist(),
                "non_summable": self.non_summable}


def residue_measure(F: ZeroSetFunction, windows: Optional[Sequence[float]] = None,
                    growth_ratio: float = 0.9):
    """
    Measure with mass ``1/F'(l_n)`` at each zero, and a summability report.

    `windows` defaults to five doublings ending at ``max |l_n|``. The series
    is flagged non-summable when the last increment ratio over a window
    doubling is at least `growth_ratio` (a ``1/n`` tail gives ratio 1).
    """
    lam = F.zeros.points
    w = 1.0 / F.derivative_values
    mu = DiscreteMeasure(lam, w, label="residue measure")
    if windows is None:
        top = float(np.max(np.abs(lam))) or 1.0
        windows = top / 2.0 ** np.arange(4, -1, -1)
    windows = np.asarray(windows, dtype=float)
    order = np.argsort(np.abs(lam), kind="stable")
    cum = np.cumsum(np.abs(w[order]))
    k = np.searchsorted(np.abs(lam[order]), windows, side="right")
    partials = np.where(k > 0, cum[np.maximum(k - 1, 0)], 0.0)
    inc = np.diff(partials)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(inc[:-1] > 0, inc[1:] / np.where(inc[:-1] > 0, inc[:-1], 1.0), 0.0)
    non_summable = bool(ratios.size and ratios[-1] >= growth_ratio)
    return mu, SummabilityReport(windows, partials, ratios, non_summable)


def pair_zeros(zeros):
    """
    Consecutive pairs counted outward from 0: ``(l_1, l_2), (l_3, l_4), ...``
    on the positive side and ``(l_-2, l_-1), ...`` on the side ``<= 0``.
    An unpaired outermost zero on either side is dropped with a warning.

    Returns
    -------
    pairs : ndarray, shape (k, 2)
    dropped : list of float
    """
    lam = np.sort(np.asarray(zeros, dtype=float).ravel())
    pos = lam[lam > 0]
    neg = lam[lam <= 0][::-1]
    pairs, dropped = [], []
    for side in (pos, neg):
        if side.size % 2:
            dropped.append(float(side[-1]))
            side = side[:-1]
        p = side.reshape(-1, 2)
        pairs.append(np.sort(p, axis=1))
    if dropped:
        warnings.warn(f"unpaired zeros dropped at the window edge: {dropped}", stacklevel=3)
    out = np.concatenate(pairs) if pairs else np.empty((0, 2))
    return out[np.argsort(np.abs(out.mean(axis=1)), kind="stable")], dropped


@dataclass
class DoubleZeroScan:
    x: np.ndarray
    log_abs: np.ndarray
    sign: np.ndarray
    midpoints: np.ndarray
    dropped: list

    @property
    def values(self) -> np.ndarray:
        return self.sign * np.exp(self.log_abs)

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def to_rows(self):
        return np.column_stack([self.x, self.log_abs, self.sign])


def _pair_log_ratio(u, half):
    """``log|u^2 / (u^2 - half^2)|`` without cancellation for large ``|u|``."""
    u = np.abs(u)
    far = u > 2 * half
    out = np.empty_like(u)
    q = (half / u[far]) ** 2
    out[far] = -np.log1p(-q)
    un = u[~far]
    with np.errstate(divide="ignore"):
        out[~far] = 2 * np.log(un) - np.log(np.abs((un - half) * (un + half)))
    return out


def double_zero_replacement(F_eval: Callable, zeros, scan, N: Optional[float] = None,
                            min_distance: float = 1e-6) -> DoubleZeroScan:
    """
    Replace each consecutive pair of zeros ``(l, l')`` of ``F`` by a double
    zero at the midpoint ``g``:

        G(x) = F(x) * prod (x - g)^2 / ((x - l)(x - l')).

    Evaluated as ``log|F| + sum_pairs log|...|`` with pairs ordered by
    ``|g|``. With `N`, only zeros in ``[-N, N]`` are used.

    Raises
    ------
    ValueError
        If a scan point is within `min_distance` of a replaced zero.
    """
    lam = np.asarray(zeros.points if isinstance(zeros, RealSequence) else zeros, dtype=float)
    if N is not None:
        lam = lam[np.abs(lam) <= N]
    x = np.asarray(scan, dtype=float).ravel()
    pairs, dropped = pair_zeros(lam)
    used = pairs.ravel()
    if used.size:
        su = np.sort(used)
        k = np.clip(np.searchsorted(su, x), 1, max(su.size - 1, 1))
        dist = np.minimum(np.abs(x - su[k - 1]), np.abs(x - su[np.minimum(k, su.size - 1)]))
        if np.any(dist < min_distance):
            raise ValueError(f"scan point within {min_distance} of a replaced zero")
    Fx = np.asarray(F_eval(x), dtype=float)
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(Fx))
    sign = np.sign(Fx)
    g = pairs.mean(axis=1)
    half = 0.5 * (pairs[:, 1] - pairs[:, 0])
    # accumulate pair by pair, innermost first
    for gi, hi, (l1, l2) in zip(g, half, pairs):
        log_abs = log_abs + _pair_log_ratio(x - gi, hi)
        sign = sign * np.where((x > l1) & (x < l2), -1.0, 1.0)
    # at a midpoint G has a genuine double zero; the formula gives 0 * inf there
    log_abs = np.where(np.isnan(log_abs), -np.inf, log_abs)
    return DoubleZeroScan(x, log_abs, sign, g, dropped)


def double_zero_probe(F_eval: Callable, zeros, gamma: float, eps: float, N: Optional[float] = None):
    """Ratio ``G(gamma + eps) / G(gamma + 2 eps)``; close to 1/4 at a double zero."""
    s = double_zero_replacement(F_eval, zeros, [gamma + eps, gamma + 2 * eps], N)
    return float(s.sign[0] * s.sign[1] * np.exp(s.log_abs[0] - s.log_abs[1]))


@dataclass
class OscillationReport:
    radii: np.ndarray
    counts: np.ndarray
    rates: np.ndarray
    bound: float
    observed: float  # min rate over the top half of the schedule
    passed: bool
    residual: float

    def to_dict(self):
        return {"radii": self.radii.tolist(), "counts": self.counts.tolist(),
                "rates": self.rates.tolist(), "bound": self.bound, "observed": self.observed,
                "passed": self.passed, "residual": self.residual}


def oscillation_rate_check(sigma: DiscreteMeasure, a: float, r_schedule: Sequence[float],
                           slack: float = 0.05, tol: float = 1e-8,
                           nodes: Optional[int] = None) -> OscillationReport:
    """
    Sign changes per unit length of a measure with a verified gap ``[-a, a]``.

    The gap residual at radius `a` must be below `tol`. The observed rate is
    the minimum of ``s(r)/r`` over the upper half of the sorted schedule and
    is compared with ``(a/pi) * (1 - slack)``.

    Raises
    ------
    PreconditionError
        If the gap residual is not below `tol`.
    """
    res = gap_residual(sigma, a, nodes).value
    if not res < tol:
        raise PreconditionError(f"gap residual {res:.3e} at radius {a:g} is not below {tol:g}")
    rep = sign_change_report(sigma, r_schedule)
    top = rep.rates[rep.radii.size // 2:]
    bound = a / np.pi * (1.0 - slack)
    observed = float(np.min(top))
    return OscillationReport(rep.radii, rep.counts, rep.rates, float(bound), observed,
                             bool(observed >= bound), float(res))
