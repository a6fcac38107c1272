"""
Riesz-type determinacy diagnostic.

For a positive discrete measure ``mu`` and a finite frequency grid
``t_1..t_N`` the majorant

    m(w) = sup{ |F(w)| : F = sum_k c_k exp(i t_k x), ||F||_{L2(mu)} <= 1 }

equals ``sqrt(e(w)^* G^{-1} e(w))`` with ``G`` the Gram matrix of the
exponentials. Growth of ``int log+ m(x) / (1+x^2) dx`` over widening windows
separates determinate-like from indeterminate-like measures.

The quadratic form is evaluated through the singular values of the factor
``V[s, k] = sqrt(mass_s) exp(i t_k site_s)`` (``G = V^* V``), which resolves
twice as many digits of the spectrum as factoring ``G`` itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import SingularGramError
from .fourier import gauss_legendre
from .measures import DiscreteMeasure

DEFAULT_RIDGE = 1e-24


@dataclass(frozen=True, eq=False)
class GramSystem:
    """
    Gram matrix ``matrix[j, k] = hat(mu)(t_k - t_j)`` of exponentials under
    ``L2(mu)`` together with the ridge used by :func:`majorant`.
    """

    freqs: np.ndarray
    matrix: np.ndarray
    ridge: float
    source: DiscreteMeasure
    _svals: np.ndarray = field(repr=False, default=None)
    _rvecs: np.ndarray = field(repr=False, default=None)

    @property
    def size(self) -> int:
        return self.freqs.size

    @property
    def degenerate(self) -> bool:
        """Fewer atoms than frequencies: the Gram matrix is exactly singular."""
        return len(self.source) < self.size


def gram_matrix(mu: DiscreteMeasure, freqs, ridge: Optional[float] = None) -> GramSystem:
    """
    Assemble the Gram system of ``exp(i t x)``, ``t`` in `freqs`, under `mu`.

    `ridge` is absolute; ``None`` means ``DEFAULT_RIDGE * mu(R)``.
    """
    freqs = np.asarray(freqs, dtype=float).ravel()
    if np.unique(freqs).size != freqs.size:
        raise ValueError("frequencies must be distinct")
    if not mu.is_positive:
        raise ValueError("Gram systems need a positive measure (all masses > 0)")
    total = mu.total_mass
    if ridge is None:
        ridge = DEFAULT_RIDGE * total
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    V = np.sqrt(mu.masses)[:, None] * np.exp(1j * np.outer(mu.sites, freqs))
    G = V.conj().T @ V
    G = 0.5 * (G + G.conj().T)
    np.fill_diagonal(G, total)
    # full right factor is needed only when there are fewer atoms than frequencies
    _, s, Wh = np.linalg.svd(V, full_matrices=V.shape[0] < V.shape[1])
    s = np.concatenate([s, np.zeros(freqs.size - s.size)])
    return GramSystem(freqs, G, float(ridge), mu, s, Wh)


def _majorant_parts(G: GramSystem, w):
    w = np.asarray(w, dtype=float)
    E = np.exp(1j * np.outer(G.freqs, w.ravel()))
    P = np.abs(G._rvecs.conj() @ E) ** 2
    s2 = G._svals ** 2
    if G.ridge == 0:
        s = G._svals
        if s.min() <= np.finfo(float).eps * max(len(G.source), G.size) * s.max():
            raise SingularGramError("Gram matrix is numerically singular; pass ridge > 0")
    terms = P / (s2[:, None] + G.ridge)
    m2 = terms.sum(axis=0)
    limited = terms[s2 <= G.ridge].sum(axis=0)
    return w.shape, m2, limited


def majorant(G: GramSystem, w):
    """
    ``m(w) = sqrt(e(w)^* (matrix + ridge*I)^{-1} e(w))``, ``e(w)_k = exp(i t_k w)``.

    With ``ridge > 0`` this is a lower bound of the unregularized majorant.
    """
    shape, m2, _ = _majorant_parts(G, w)
    out = np.sqrt(m2).reshape(shape)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MajorantTrace:
    eval_points: np.ndarray
    values: np.ndarray
    ridge: float
    n_freqs: int
    freq_span: tuple
    ridge_limited: np.ndarray  # True where >= half of m^2 comes from directions below the ridge


def majorant_trace(G: GramSystem, ws) -> MajorantTrace:
    shape, m2, limited = _majorant_parts(G, ws)
    return MajorantTrace(np.asarray(ws, dtype=float).reshape(shape), np.sqrt(m2).reshape(shape),
                         G.ridge, G.size, (float(G.freqs.min()), float(G.freqs.max())),
                         (limited >= 0.5 * m2).reshape(shape))


def frequency_grid(a: float, count: int) -> np.ndarray:
    """Uniform grid of `count` points on ``[-a/2, a/2]``."""
    return np.linspace(-a / 2.0, a / 2.0, count)


@dataclass
class GrowthTable:
    """
    Log-integrals ``int_{-X}^{X} log+ m(x) / (1+x^2) dx``; rows are windows,
    columns are frequency-grid sizes.
    """

    a: float
    windows: np.ndarray
    grids: np.ndarray
    ridge_rel: float
    integrals: np.ndarray
    full_log_integrals: np.ndarray
    ridge_limited: np.ndarray  # fraction of nodes in each octave panel that are ridge-limited
    degenerate: bool

    def to_rows(self):
        return [[float(X)] + [float(v) for v in row] for X, row in zip(self.windows, self.integrals)]


def riesz_log_integral(mu: DiscreteMeasure, a: float, window_schedule: Sequence[float],
                       grid_schedule: Sequence[int], ridge: float = DEFAULT_RIDGE,
                       nodes_per_unit: float = 16.0) -> GrowthTable:
    """
    Growth table of the Poisson log-integral of the majorant for frequencies
    in ``[-a/2, a/2]``.

    The x-axis is cut into panels ``[0, X_0], [X_0, X_1], ...`` at the window
    schedule (and mirrored), each integrated by Gauss-Legendre with about
    ``nodes_per_unit * max(1, a)`` nodes per unit length. `ridge` is relative
    to ``mu(R)``.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    windows = np.asarray(window_schedule, dtype=float)
    if np.any(np.diff(windows) <= 0) or windows[0] <= 0:
        raise ValueError("window schedule must be positive and increasing")
    grids = np.asarray(grid_schedule, dtype=int)
    edges = np.concatenate([[0.0], windows])
    nW, nG = windows.size, grids.size
    pos = np.zeros((nW, nG))
    full = np.zeros((nW, nG))
    limited = np.zeros((nW, nG))
    degenerate = False
    for j, count in enumerate(grids):
        G = gram_matrix(mu, frequency_grid(a, count), ridge=ridge * mu.total_mass)
        degenerate |= G.degenerate
        acc_pos = acc_full = 0.0
        for i in range(nW):
            lo, hi = edges[i], edges[i + 1]
            n = int(np.ceil(nodes_per_unit * max(1.0, a) * (hi - lo)))
            x, wq = gauss_legendre((hi - lo) / 2, max(n, 8))
            x = x + (lo + hi) / 2
            x = np.concatenate([x, -x])
            wq = np.concatenate([wq, wq]) / (1 + x ** 2)
            tr = majorant_trace(G, x)
            logm = np.log(tr.values)
            acc_pos += float(np.sum(wq * np.maximum(logm, 0.0)))
            acc_full += float(np.sum(wq * logm))
            pos[i, j], full[i, j] = acc_pos, acc_full
            limited[i, j] = float(np.mean(tr.ridge_limited))
    return GrowthTable(float(a), windows, grids, float(ridge), pos, full, limited, bool(degenerate))


@dataclass
class DeterminacyThresholds:
    plateau_rel: float = 0.02       # increment / accumulated, per octave
    plateau_octaves: int = 3
    decay_ratio: float = 0.85       # geometric decay of increments counts as a plateau
    growth_ratio: float = 1.0       # increments not shrinking => growth
    stability_rel: float = 0.05     # grid-refinement change at the largest window
    saturation_frac: float = 0.25   # ridge-limited share of the outer panel

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class DeterminacyVerdict:
    label: str
    evidence: dict

    def to_dict(self):
        return {"verdict": self.label, **self.evidence}


def determinacy_verdict(table: GrowthTable,
                        thresholds: Optional[DeterminacyThresholds] = None) -> DeterminacyVerdict:
    """
    Classify a growth table as ``"determinate-like"``,
    ``"indeterminate-like"`` or ``"inconclusive"``.

    Rules, on the finest grid column:

    * degenerate Gram systems (fewer atoms than frequencies) are forced to
      indeterminate-like with a note;
    * determinate-like if the outer panel is ridge-limited on at least
      ``saturation_frac`` of its nodes, or if octave increments never shrink;
    * indeterminate-like if increments plateau (each of the last
      ``plateau_octaves`` below ``plateau_rel`` of the accumulated value, or
      all consecutive ratios at most ``decay_ratio``) and the largest-window
      value moves by at most ``stability_rel`` between the two finest grids.
    """
    th = thresholds or DeterminacyThresholds()
    ev = {"thresholds": th.to_dict(), "windows": table.windows.tolist(),
          "grids": table.grids.tolist(), "integrals": table.integrals.tolist(),
          "ridge_limited": table.ridge_limited.tolist(), "ridge_rel": table.ridge_rel}
    if table.windows.size < 3 or table.grids.size < 2:
        ev["note"] = "insufficient data: need >= 3 windows and >= 2 grids"
        return DeterminacyVerdict("inconclusive", ev)
    if table.degenerate:
        ev["note"] = "degenerate: fewer atoms than frequencies, Gram matrix singular"
        return DeterminacyVerdict("indeterminate-like", ev)

    col = table.integrals[:, -1]
    inc = np.diff(col)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = inc[1:] / inc[:-1]
        rel = inc / col[1:]
    stab = abs(table.integrals[-1, -1] - table.integrals[-1, -2]) / max(abs(table.integrals[-1, -1]), 1e-300)
    saturated = table.ridge_limited[-1, -1]
    ev.update(increments=inc.tolist(), increment_ratios=ratios.tolist(),
              relative_increments=rel.tolist(), refinement_change=float(stab),
              outer_ridge_limited=float(saturated))

    if saturated >= th.saturation_frac:
        ev["note"] = "majorant reaches the ridge ceiling in the outer window"
        return DeterminacyVerdict("determinate-like", ev)
    if np.all(np.isfinite(ratios)) and np.all(ratios >= th.growth_ratio):
        ev["note"] = "octave increments do not shrink"
        return DeterminacyVerdict("determinate-like", ev)
    k = min(th.plateau_octaves, rel.size)
    flat = bool(np.all(rel[-k:] < th.plateau_rel)) or bool(
        np.all(np.isfinite(ratios)) and np.all(ratios <= th.decay_ratio))
    if flat and stab <= th.stability_rel:
        ev["note"] = "octave increments decay and are stable under grid refinement"
        return DeterminacyVerdict("indeterminate-like", ev)
    ev["note"] = "no clear trend"
    return DeterminacyVerdict("inconclusive", ev)
