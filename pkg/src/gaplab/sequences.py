"""
Toolkit for d-uniform sequences: interval families, short partitions,
regularity and energy statistics, and the gap weight of a family of
intervals.

Divergence is never decided, only estimated from trends over a doubling
schedule of windows; every verdict is relative to the partition used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConsistencyError
from .measures import RealSequence, counting_function


def _dist0(lo, hi):
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return np.where((lo <= 0) & (hi >= 0), 0.0, np.minimum(np.abs(lo), np.abs(hi)))


@dataclass(frozen=True, eq=False)
class IntervalFamily:
    """Ordered, pairwise disjoint open intervals ``(lo[n], hi[n])``."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).ravel()
        hi = np.asarray(self.hi, dtype=float).ravel()
        if lo.shape != hi.shape:
            raise ValueError("endpoint arrays differ in length")
        if np.any(hi <= lo):
            raise ValueError("intervals must have positive length")
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]
        if lo.size > 1 and np.any(lo[1:] < hi[:-1]):
            raise ValueError("intervals overlap")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_pairs(cls, pairs):
        arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])

    def __len__(self):
        return self.lo.size

    @property
    def lengths(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def dist0(self) -> np.ndarray:
        return _dist0(self.lo, self.hi)

    @property
    def shortness_terms(self) -> np.ndarray:
        return (self.lengths / (1.0 + self.dist0)) ** 2


@dataclass(frozen=True, eq=False)
class ShortPartition(IntervalFamily):
    """
    Contiguous cells ``[b_k, b_{k+1})`` covering ``[b_0, b_K)``.

    Cells are half-open so that every point of a sequence inside the window
    belongs to exactly one cell.
    """

    def __post_init__(self):
        super().__post_init__()
        if self.lo.size > 1 and np.any(self.lo[1:] != self.hi[:-1]):
            raise ValueError("partition cells must be contiguous")

    @classmethod
    def from_breakpoints(cls, breakpoints) -> "ShortPartition":
        b = np.asarray(sorted(breakpoints), dtype=float)
        if b.size < 2:
            raise ValueError("need at least two breakpoints")
        return cls(b[:-1], b[1:])

    @classmethod
    def generate(cls, lo: float, hi: float, gamma: float = 0.4) -> "ShortPartition":
        """
        Cells of integer length ``ceil((1 + |x|)**gamma)`` grown outward from 0,
        ``x`` being the cell endpoint nearest 0, until ``[lo, hi]`` is covered.
        """
        if not lo < 0 < hi:
            raise ValueError("generated partitions are anchored at 0; need lo < 0 < hi")
        right = [0.0]
        while right[-1] < hi:
            right.append(right[-1] + math.ceil((1.0 + right[-1]) ** gamma))
        left = [0.0]
        while left[-1] > lo:
            left.append(left[-1] - math.ceil((1.0 - left[-1]) ** gamma))
        return cls.from_breakpoints(left[:0:-1] + right)

    @property
    def breakpoints(self) -> np.ndarray:
        return np.append(self.lo, self.hi[-1])

    @property
    def window(self):
        return float(self.lo[0]), float(self.hi[-1])

    def shortness_partials(self) -> np.ndarray:
        order = np.argsort(self.dist0, kind="stable")
        return np.cumsum(self.shortness_terms[order])

    def counts(self, seq: RealSequence) -> np.ndarray:
        """Number of sequence points in each cell."""
        idx = np.searchsorted(self.breakpoints, seq.points, side="right") - 1
        idx = idx[(idx >= 0) & (idx < len(self))]
        return np.bincount(idx, minlength=len(self))


def _octave_ratios(partials) -> np.ndarray:
    inc = np.diff(np.asarray(partials, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        return inc[1:] / inc[:-1]


@dataclass(frozen=True)
class LongClassification:
    verdict: str
    counts: np.ndarray
    partials: np.ndarray


def classify_long(fam: IntervalFamily, window_schedule: Sequence[int],
                  long_ratio: float = 0.9, short_ratio: float = 0.75,
                  tail_tol: float = 1e-3) -> LongClassification:
    """
    Trend test for divergence of the shortness sum.

    Terms are summed in order of distance from 0; partial sums are taken
    after ``window_schedule[i]`` terms. With per-octave growth rates
    ``r_i = increment_i / log2(count ratio)``, the family is ``"long-trend"``
    when every ``r_{i+1} >= long_ratio * r_i``, ``"short"`` when every
    ``r_{i+1} <= short_ratio * r_i`` or the last increment is below
    ``tail_tol`` times the sum, and ``"inconclusive"`` otherwise.
    """
    sched = np.asarray(window_schedule, dtype=int)
    if sched.size < 3:
        raise ValueError("need at least 3 schedule points")
    if np.any(np.diff(sched) <= 0) or sched[0] < 1:
        raise ValueError("schedule must be positive and increasing")
    order = np.argsort(fam.dist0, kind="stable")
    csum = np.concatenate([[0.0], np.cumsum(fam.shortness_terms[order])])
    counts = np.minimum(sched, len(fam))
    partials = csum[counts]
    inc = np.diff(partials)
    rates = inc / np.log2(sched[1:] / sched[:-1])
    if partials[-1] == 0 or inc[-1] <= tail_tol * partials[-1]:
        verdict = "short"
    elif np.all(rates[1:] >= long_ratio * rates[:-1]):
        verdict = "long-trend"
    elif np.all(rates[1:] <= short_ratio * rates[:-1]):
        verdict = "short"
    else:
        verdict = "inconclusive"
    return LongClassification(verdict, counts, partials)


class GapWeight:
    """
    Tent weight of an interval family: ``dist(t, R \\ (lo_n, hi_n))`` on each
    interval and zero elsewhere. 1-Lipschitz.
    """

    def __init__(self, fam: IntervalFamily):
        self.family = fam

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.family.lo, self.family.hi
        k = np.searchsorted(lo, t, side="right") - 1
        kc = np.clip(k, 0, max(len(lo) - 1, 0))
        if len(lo) == 0:
            return np.zeros_like(t)
        inside = (k >= 0) & (t > lo[kc]) & (t < hi[kc])
        return np.where(inside, np.minimum(t - lo[kc], hi[kc] - t), 0.0)

    def poisson_integral(self, X: float) -> float:
        """Exact ``int_{-X}^{X} w(t) / (1 + t^2) dt``."""
        lo, hi = self.family.lo, self.family.hi
        mid = 0.5 * (lo + hi)

        def L(t):
            return 0.5 * np.log1p(t * t)

        def rising(p, q, a):  # int_p^q (t - a)/(1+t^2)
            return (L(q) - L(p)) - a * (np.arctan(q) - np.arctan(p))

        total = 0.0
        p1, q1 = np.clip(lo, -X, X), np.clip(mid, -X, X)
        total += np.sum(np.where(q1 > p1, rising(p1, q1, lo), 0.0))
        p2, q2 = np.clip(mid, -X, X), np.clip(hi, -X, X)
        total += np.sum(np.where(q2 > p2, -rising(p2, q2, hi), 0.0))
        return float(total)

    def poisson_partials(self, windows) -> np.ndarray:
        return np.array([self.poisson_integral(X) for X in windows])


def build_gap_weight(fam: IntervalFamily) -> GapWeight:
    return GapWeight(fam)


def regularity_integral(seq: RealSequence, d: float, X: float) -> float:
    """
    ``int_{-X}^{X} |n(x) - d x| / (1 + x^2) dx`` with ``n`` the counting
    function of `seq`, integrated exactly piece by piece.
    """
    if X <= 0:
        raise ValueError("window must be positive")
    pts = seq.points
    cuts = np.unique(np.concatenate([[-X, 0.0, X], pts[(pts > -X) & (pts < X)]]))
    p, q = cuts[:-1], cuts[1:]
    k = counting_function(seq, 0.5 * (p + q)).astype(float)
    if d != 0:
        z = k / d
        split = (z > p) & (z < q)
        p = np.concatenate([p[~split], p[split], z[split]])
        q = np.concatenate([q[~split], z[split], q[split]])
        k = np.concatenate([k[~split], k[split], k[split]])

    def F(x):
        return k * np.arctan(x) - 0.5 * d * np.log1p(x * x)

    return float(np.sum(np.abs(F(q) - F(p))))


def _interval_points(seq, lo, hi, right_closed):
    pts = seq.points
    side = "right" if right_closed else "left"
    return pts[np.searchsorted(pts, lo, side="left"):np.searchsorted(pts, hi, side=side)]


def interval_energy(seq: RealSequence, interval, right_closed: bool = True,
                    method: str = "prefix") -> float:
    """
    Atomic energy ``sum_{i != j} log|x_i - x_j|`` of the points of `seq` in
    `interval` (diagonal excluded). 0 for fewer than two points.

    ``method="prefix"`` accumulates, for each point, the log-distances to all
    points before it; ``method="pairs"`` is the plain double loop over
    ordered pairs.
    """
    lo, hi = interval
    x = _interval_points(seq, lo, hi, right_closed)
    if x.size < 2:
        return 0.0
    if method == "pairs":
        total = 0.0
        for i in range(x.size):
            for j in range(x.size):
                if i != j:
                    total += math.log(abs(x[i] - x[j]))
        return total
    if method != "prefix":
        raise ValueError(f"unknown method {method!r}")
    total = 0.0
    for j in range(1, x.size):
        total += np.sum(np.log(x[j] - x[:j]))
    return float(2.0 * total)


@dataclass(frozen=True)
class EnergyTerms:
    """Per-cell energy-condition terms ordered by distance of the cell from 0."""

    lo: np.ndarray
    hi: np.ndarray
    dist0: np.ndarray
    counts: np.ndarray
    terms: np.ndarray

    @property
    def partials(self) -> np.ndarray:
        return np.cumsum(self.terms)

    def window_partials(self, windows) -> np.ndarray:
        """Sum of terms over cells contained in ``[-X, X]`` for each window X."""
        reach = np.maximum(np.abs(self.lo), np.abs(self.hi))
        return np.array([np.sum(self.terms[reach <= X]) for X in windows])


def energy_condition_terms(seq: RealSequence, partition: ShortPartition,
                           method: str = "prefix", neg_tol: float = 1e-9) -> EnergyTerms:
    """
    Terms ``(k_n^2 log+|I_n| - E_{I_n}) / (1 + dist(0, I_n)^2)`` of the
    energy series, one per partition cell.

    Raises
    ------
    ConsistencyError
        If a term is below ``-neg_tol``; the series is nonnegative.
    """
    if len(seq):
        a, b = partition.window
        if seq.points[0] < a or seq.points[-1] >= b:
            raise ValueError("partition does not cover the sequence")
    counts = partition.counts(seq)
    dist = partition.dist0
    L = partition.lengths
    terms = np.empty(len(partition))
    for n in range(len(partition)):
        E = interval_energy(seq, (partition.lo[n], partition.hi[n]), right_closed=False, method=method)
        terms[n] = (counts[n] ** 2 * max(math.log(L[n]), 0.0) - E) / (1.0 + dist[n] ** 2)
    if np.any(terms < -neg_tol):
        n = int(np.argmin(terms))
        raise ConsistencyError(f"negative energy term {terms[n]:.3e} on cell "
                               f"[{partition.lo[n]}, {partition.hi[n]})")
    order = np.argsort(dist, kind="stable")
    return EnergyTerms(partition.lo[order], partition.hi[order], dist[order], counts[order], terms[order])


def energy_condition_partials(seq: RealSequence, partition: ShortPartition, **kw) -> np.ndarray:
    """Partial sums of the energy series, cells taken by distance from 0."""
    return energy_condition_terms(seq, partition, **kw).partials


@dataclass
class UniformityThresholds:
    regularity_tol: float = 0.1     # outer mean of |defect| / |I_n|
    energy_decay: float = 0.9       # max per-octave increment ratio for a plateau
    energy_growth: float = 1.0      # mean ratio at or above this => divergent trend
    n_windows: int = 4


@dataclass
class UniformityReport:
    density: float
    partition: ShortPartition
    regularity_defects: np.ndarray
    relative_defects: np.ndarray
    windows: np.ndarray
    regularity_integral_partials: np.ndarray
    energy_partials: np.ndarray
    verdict: str
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "density": self.density,
            "breakpoints": self.partition.breakpoints.tolist(),
            "regularity_defects": self.regularity_defects.tolist(),
            "windows": self.windows.tolist(),
            "regularity_integral_partials": self.regularity_integral_partials.tolist(),
            "energy_partials": self.energy_partials.tolist(),
            "evidence": self.evidence,
        }


def uniformity_report(seq: RealSequence, d: float, partition: Optional[ShortPartition] = None,
                      thresholds: Optional[UniformityThresholds] = None) -> UniformityReport:
    """
    Regularity and energy evidence for `seq` being `d`-uniform relative to
    `partition`.

    Verdicts: ``"pass"``, ``"fail-regularity"``, ``"fail-energy"``,
    ``"inconclusive"``. A failure only means failure for this partition.
    """
    th = thresholds or UniformityThresholds()
    if len(seq) < 2:
        raise ValueError("need at least two points")
    if partition is None:
        partition = ShortPartition.generate(min(seq.points[0], -1.0), max(seq.points[-1], 1.0) + 1.0)
    counts = partition.counts(seq)
    defects = counts - d * partition.lengths
    rel = np.abs(defects) / partition.lengths

    # only cells inside the data span, else truncation reads as a defect
    inside = (partition.lo >= seq.points[0]) & (partition.hi <= seq.points[-1])
    reach = np.maximum(np.abs(partition.lo), np.abs(partition.hi))
    X = float(min(-seq.points[0], seq.points[-1]))
    if X <= 0:
        X = float(max(abs(seq.points[0]), abs(seq.points[-1])))
    windows = X / 2.0 ** np.arange(th.n_windows - 1, -1, -1)
    outer = inside & (reach > X / 2) & (reach <= X)
    outer_defect = float(np.mean(rel[outer])) if np.any(outer) else float("nan")
    reg_ok = bool(np.isfinite(outer_defect) and outer_defect <= th.regularity_tol)

    reg_partials = np.array([regularity_integral(seq, d, w) for w in windows])
    energy = energy_condition_terms(seq, partition)
    e_partials = energy.window_partials(windows)
    ratios = _octave_ratios(e_partials)
    inc = np.diff(e_partials)
    if np.all(inc <= 1e-12 * max(1.0, e_partials[-1])):
        energy_state = "plateau"
    elif np.all(np.isfinite(ratios)) and np.all(ratios <= th.energy_decay):
        energy_state = "plateau"
    elif np.nanmean(ratios) >= th.energy_growth:
        energy_state = "growth"
    else:
        energy_state = "unclear"

    if not reg_ok:
        verdict = "fail-regularity" if np.isfinite(outer_defect) else "inconclusive"
    elif energy_state == "growth":
        verdict = "fail-energy"
    elif energy_state == "plateau":
        verdict = "pass"
    else:
        verdict = "inconclusive"
    evidence = {
        "outer_relative_defect": outer_defect,
        "regularity_tol": th.regularity_tol,
        "energy_increment_ratios": [float(r) for r in ratios],
        "energy_state": energy_state,
        "energy_decay": th.energy_decay,
        "energy_growth": th.energy_growth,
        "min_energy_term": float(energy.terms.min()) if energy.terms.size else 0.0,
    }
    return UniformityReport(float(d), partition, defects, rel, windows, reg_partials,
                            e_partials, verdict, evidence)


def midpoint_double(seq: RealSequence) -> RealSequence:
    """Insert the midpoint of every consecutive pair."""
    if len(seq) < 2:
        raise ValueError("need at least two points")
    p = seq.points
    out = np.empty(2 * p.size - 1)
    out[0::2] = p
    out[1::2] = 0.5 * (p[:-1] + p[1:])
    return RealSequence(out)


def cluster_sequence(partition: ShortPartition, density: float = 1.0, decay: float = 0.25,
                     window: Optional[float] = None) -> RealSequence:
    """
    Sequence with ``round(density*|I_n|)`` points per cell, crammed at the
    cell center into width ``exp(-decay * dist(0, I_n)) * |I_n| / 2``.

    Counts match the density exactly on every cell while the energy defect
    grows linearly with distance. Raises ``ValueError`` once the cluster
    spacing falls below 64 ulps of the cell position.
    """
    pts = []
    for lo, hi, dist in zip(partition.lo, partition.hi, partition.dist0):
        if window is not None and max(abs(lo), abs(hi)) > window:
            continue
        k = int(round(density * (hi - lo)))
        if k == 0:
            continue
        c = 0.5 * (lo + hi)
        if k == 1:
            pts.append([c])
            continue
        w = math.exp(-decay * dist) * (hi - lo) / 2.0
        if w / (k - 1) < 64 * np.spacing(max(abs(lo), abs(hi))):
            raise ValueError(f"cluster at {c} is not representable in float64; shrink the window")
        pts.append(c + w * (np.arange(k) / (k - 1) - 0.5))
    return RealSequence(np.concatenate(pts) if pts else np.empty(0))
