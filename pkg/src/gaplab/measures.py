"""
Finite signed discrete measures, real sequences and their counting
and sign-change statistics.

Everything here is an immutable value; operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import WeightDomainError, ZeroMeasureError


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """
    Finite signed measure ``sum_k masses[k] * delta(sites[k])``.

    Sites are sorted on construction, atoms of exactly zero mass are pruned
    and duplicate sites are rejected.

    Parameters
    ----------
    sites : array_like
        Real atom locations.
    masses : array_like
        Real atom masses, same length as `sites`.
    label : str, optional
        Free-form description carried into output files.
    """

    sites: np.ndarray
    masses: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        sites = np.asarray(self.sites, dtype=float).ravel()
        masses = np.asarray(self.masses, dtype=float).ravel()
        if sites.shape != masses.shape:
            raise ValueError("sites and masses must have the same length")
        if not (np.all(np.isfinite(sites)) and np.all(np.isfinite(masses))):
            raise ValueError("sites and masses must be finite")
        keep = masses != 0.0
        sites, masses = sites[keep], masses[keep]
        order = np.argsort(sites, kind="stable")
        sites, masses = sites[order], masses[order]
        if sites.size > 1 and np.any(np.diff(sites) <= 0):
            raise ValueError("duplicate sites in measure")
        object.__setattr__(self, "sites", _frozen(sites))
        object.__setattr__(self, "masses", _frozen(masses))

    def __len__(self):
        return self.sites.size

    def __repr__(self):
        lab = f", label={self.label!r}" if self.label else ""
        return f"DiscreteMeasure(n_atoms={len(self)}, total_variation={self.total_variation:.6g}{lab})"

    @classmethod
    def zero(cls, label=None) -> "DiscreteMeasure":
        return cls(np.empty(0), np.empty(0), label)

    @property
    def is_zero(self) -> bool:
        return self.sites.size == 0

    @property
    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.masses)))

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    @property
    def is_positive(self) -> bool:
        return bool(self.sites.size) and bool(np.all(self.masses > 0))

    def scaled(self, c: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.sites, c * self.masses, self.label)

    def shifted(self, tau: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.sites + tau, self.masses, self.label)

    def restricted(self, lo: float, hi: float) -> "DiscreteMeasure":
        """Restriction to the closed window ``[lo, hi]``."""
        m = (self.sites >= lo) & (self.sites <= hi)
        return DiscreteMeasure(self.sites[m], self.masses[m], self.label)

    def pruned(self, tol: float) -> "DiscreteMeasure":
        """Drop atoms with ``|mass| <= tol``."""
        m = np.abs(self.masses) > tol
        return DiscreteMeasure(self.sites[m], self.masses[m], self.label)

    def __sub__(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        return self + other.scaled(-1.0)

    def __add__(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        sites = np.concatenate([self.sites, other.sites])
        masses = np.concatenate([self.masses, other.masses])
        u, inv = np.unique(sites, return_inverse=True)
        total = np.zeros(u.size)
        np.add.at(total, inv, masses)
        return DiscreteMeasure(u, total, self.label)


@dataclass(frozen=True, eq=False)
class RealSequence:
    """
    Strictly increasing finite list of reals.

    ``origin_index`` is the list position that carries two-sided index 0;
    by default it is the position of the first nonnegative point, so the
    two-sided index of position ``p`` is ``p - origin_index``.
    """

    points: np.ndarray
    origin_index: Optional[int] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        if not np.all(np.isfinite(pts)):
            raise ValueError("sequence points must be finite")
        if pts.size > 1 and np.any(np.diff(pts) <= 0):
            raise ValueError("sequence points must be strictly increasing")
        object.__setattr__(self, "points", _frozen(pts))
        if self.origin_index is None:
            object.__setattr__(self, "origin_index", int(np.searchsorted(pts, 0.0, side="left")))

    def __len__(self):
        return self.points.size

    def __repr__(self):
        if len(self):
            return f"RealSequence(n={len(self)}, span=[{self.points[0]:.6g}, {self.points[-1]:.6g}])"
        return "RealSequence(n=0)"

    def indices(self) -> np.ndarray:
        return np.arange(len(self)) - self.origin_index

    def window(self, lo: float, hi: float) -> "RealSequence":
        m = (self.points >= lo) & (self.points <= hi)
        return RealSequence(self.points[m])

    @classmethod
    def lattice(cls, start: float, stop: float, step: float = 1.0, offset: float = 0.0) -> "RealSequence":
        """Points ``offset + k*step`` inside the closed window ``[start, stop]``."""
        k0 = np.ceil((start - offset) / step)
        k1 = np.floor((stop - offset) / step)
        return cls(offset + step * np.arange(k0, k1 + 1))


@dataclass(frozen=True)
class SignChangeReport:
    radii: np.ndarray
    counts: np.ndarray

    @property
    def rates(self) -> np.ndarray:
        return self.counts / self.radii


def jordan_decompose(sigma: DiscreteMeasure):
    """Split ``sigma`` into its positive and negative parts ``(plus, minus)``."""
    if sigma.is_zero:
        raise ZeroMeasureError("Jordan decomposition of the zero measure")
    pos = sigma.masses > 0
    plus = DiscreteMeasure(sigma.sites[pos], sigma.masses[pos], sigma.label)
    minus = DiscreteMeasure(sigma.sites[~pos], -sigma.masses[~pos], sigma.label)
    return plus, minus


def weighted_norm(sigma: DiscreteMeasure, weight: Optional[Callable] = None) -> float:
    """
    Weighted total variation ``sum_k w(site_k) |mass_k|``.

    `weight` must be vectorized and at least 1 on every site; ``None``
    means ``w = 1`` (plain total variation).
    """
    if weight is None:
        return sigma.total_variation
    w = np.broadcast_to(np.asarray(weight(sigma.sites), dtype=float), sigma.sites.shape)
    if np.any(w < 1.0):
        bad = sigma.sites[np.argmax(w < 1.0)]
        raise WeightDomainError(f"weight < 1 at site {bad!r}")
    return float(np.sum(w * np.abs(sigma.masses)))


def counting_function(seq: RealSequence, x):
    """
    Signed counting function of `seq`.

    ``#(seq in (0, x])`` for ``x > 0``, ``-#(seq in (x, 0])`` for ``x < 0``
    and 0 at 0. A point exactly at 0 is counted on the left branch.
    """
    x = np.asarray(x, dtype=float)
    pts = seq.points
    # both branches equal #(pts <= x) - #(pts <= 0)
    out = np.searchsorted(pts, x, side="right") - np.searchsorted(pts, 0.0, side="right")
    if out.ndim == 0:
        return int(out)
    return out.astype(int)


def sign_changes(sigma: DiscreteMeasure, r: float) -> int:
    """
    Number of sign changes of an atomic measure on ``(0, r)``.

    For atomic measures this is the number of adjacent-site sign flips among
    the atoms strictly inside the window.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    m = (sigma.sites > 0) & (sigma.sites < r)
    sgn = np.sign(sigma.masses[m])
    return int(np.count_nonzero(sgn[1:] != sgn[:-1]))


def sign_change_report(sigma: DiscreteMeasure, radii: Sequence[float]) -> SignChangeReport:
    radii = np.asarray(sorted(radii), dtype=float)
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    inside = sigma.sites > 0
    s = sigma.sites[inside]
    flips = np.sign(sigma.masses[inside])
    flips = np.concatenate([[0], np.cumsum(flips[1:] != flips[:-1])])
    # atoms strictly below r; the count is the cumulative flip number at the last such atom
    k = np.searchsorted(s, radii, side="left")
    counts = np.where(k > 0, flips[np.maximum(k - 1, 0)], 0) if s.size else np.zeros(radii.size, int)
    return SignChangeReport(radii, np.asarray(counts, dtype=int))
