"""
Gap characteristics of site pairs by constrained quadratic minimization.

A measure with nonnegative masses on ``sites_a`` and nonpositive masses on
``sites_b`` has total variation ``sum(x)`` where ``x = |masses|``, so the
sign-constrained, norm-one feasible set is the probability simplex in ``x``.
The normalized gap energy

    (1/(2a)) int_{-a}^{a} |hat sigma(t)|^2 dt = x^T Q x,
    Q[j, k] = s_j s_k sinc(a (site_j - site_k)),

is a convex quadratic there, minimized by accelerated projected gradient
with exact simplex projection, refined by an active-set polish, with
Frank-Wolfe gap certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from .errors import BracketError, NotApplicableError
from .fourier import GapResidual, gap_residual
from .measures import DiscreteMeasure


@dataclass(frozen=True)
class GapProblem:
    """
    Sites allowed for the positive part (`sites_a`) and the negative part
    (`sites_b`), gap radius `a`, quadrature node count (``None``: default
    policy) and solver settings.
    """

    sites_a: np.ndarray
    sites_b: np.ndarray
    a: float
    nodes: Optional[int] = None
    max_iter: int = 20000
    rtol: float = 1e-2
    atol: float = 1e-9
    restarts: int = 20
    seed: int = 42
    polish: bool = True

    def __post_init__(self):
        A = np.unique(np.asarray(self.sites_a, dtype=float).ravel())
        B = np.unique(np.asarray(self.sites_b, dtype=float).ravel())
        if self.a <= 0:
            raise ValueError("gap radius must be positive")
        if np.intersect1d(A, B).size:
            raise ValueError("sites_a and sites_b must be disjoint")
        object.__setattr__(self, "sites_a", A)
        object.__setattr__(self, "sites_b", B)

    def with_radius(self, a: float) -> "GapProblem":
        return replace(self, a=a)


@dataclass
class GapSolution:
    measure: DiscreteMeasure
    residual: GapResidual
    objective: float        # exact kernel value of the normalized gap energy
    lower_bound: float      # objective - Frank-Wolfe gap, a lower bound on the finite-site minimum
    iterations: int
    converged: bool
    restart: int


def sinc_kernel(sites, a: float) -> np.ndarray:
    """``K[j, k] = sin(a d) / (a d)`` with ``d = site_j - site_k`` (1 on the diagonal)."""
    s = np.asarray(sites, dtype=float)
    return np.sinc(a * (s[:, None] - s[None, :]) / np.pi)


def project_simplex(V: np.ndarray) -> np.ndarray:
    """Euclidean projection of each column of `V` onto the probability simplex."""
    V = np.atleast_2d(V.T).T if V.ndim == 1 else V
    n = V.shape[0]
    U = -np.sort(-V, axis=0)
    css = np.cumsum(U, axis=0) - 1.0
    ind = np.arange(1, n + 1)[:, None]
    cond = U - css / ind > 0
    rho = n - 1 - np.argmax(cond[::-1], axis=0)
    theta = css[rho, np.arange(V.shape[1])] / (rho + 1)
    return np.maximum(V - theta, 0.0)


def _fista(Q, X0, max_iter, rtol, atol):
    """Batched accelerated projected gradient for ``min x^T Q x`` on the simplex."""
    L = 2.0 * np.linalg.eigvalsh(Q)[-1]
    X = X0.copy()
    Y = X.copy()
    t = np.ones(X.shape[1])
    done = np.zeros(X.shape[1], dtype=bool)
    iters = np.full(X.shape[1], max_iter)
    for k in range(max_iter):
        QX = Q @ X
        f = np.einsum("ij,ij->j", X, QX)
        fw_gap = 2.0 * (f - QX.min(axis=0))
        # the minimum is >= 0, so f itself also bounds the suboptimality
        newly = ~done & (np.minimum(fw_gap, f) <= rtol * f + atol)
        iters[newly] = k
        done |= newly
        if done.all():
            break
        G = 2.0 * (Q @ Y)
        Xn = project_simplex(Y - G / L)
        tn = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        Yn = Xn + ((t - 1.0) / tn) * (Xn - X)
        # gradient-based adaptive restart
        bad = np.einsum("ij,ij->j", Xn - X, Yn - Xn) > 0
        Yn[:, bad] = Xn[:, bad]
        tn[bad] = 1.0
        # frozen columns stay put
        X = np.where(done, X, Xn)
        Y = np.where(done, Y, Yn)
        t = np.where(done, t, tn)
    QX = Q @ X
    f = np.einsum("ij,ij->j", X, QX)
    fw_gap = 2.0 * (f - QX.min(axis=0))
    return X, f, fw_gap, iters, done


def _active_set_polish(Q, x, max_rounds):
    """
    Primal active-set refinement on the simplex.

    Solves the equality-constrained problem on the current support, steps
    back to the boundary when that leaves the simplex, and adds the
    coordinate with the most negative reduced gradient. A candidate is only
    accepted if it lowers the exactly evaluated objective, so the result is
    never worse than `x`.
    """
    f = float(x @ Q @ x)
    S = x > 0
    for _ in range(max_rounds):
        idx = np.nonzero(S)[0]
        w, V = np.linalg.eigh(Q[np.ix_(idx, idx)])
        keep = w > 1e-15 * w[-1]
        y = V[:, keep] @ ((V[:, keep].T @ np.ones(idx.size)) / w[keep])
        if not np.isfinite(y).all() or y.sum() <= 0:
            break
        y /= y.sum()
        if np.all(y >= 0):
            xn = np.zeros_like(x)
            xn[idx] = y
            fn = float(xn @ Q @ xn)
            if fn < f:
                x, f = xn, fn
            g = Q @ x
            j = int(np.argmin(g))
            if S[j] or g[j] >= f * (1 - 1e-9):
                break
            S = x > 0
            S[j] = True
        else:
            xs = x[idx]
            d = y - xs
            neg = d < 0
            t = float(np.min(-xs[neg] / d[neg]))
            xn = np.zeros_like(x)
            xn[idx] = np.maximum(xs + t * d, 0.0)
            xn /= xn.sum()
            fn = float(xn @ Q @ xn)
            if fn > f:
                break
            x, f = xn, fn
            S = x > 0
    return x


def solve_restarts(problem: GapProblem) -> List[GapSolution]:
    """Run every seeded restart and return one solution per restart."""
    A, B = problem.sites_a, problem.sites_b
    sites = np.concatenate([A, B])
    if sites.size == 0:
        raise ValueError("no sites")
    signs = np.concatenate([np.ones(A.size), -np.ones(B.size)])
    order = np.argsort(sites)
    sites, signs = sites[order], signs[order]
    n = sites.size
    R = max(1, problem.restarts)
    if n == 1:
        mu = DiscreteMeasure(sites, signs)
        res = gap_residual(mu, problem.a, problem.nodes)
        return [GapSolution(mu, res, 1.0, 1.0, 0, True, r) for r in range(R)]
    Q = sinc_kernel(sites, problem.a) * np.outer(signs, signs)
    rng = np.random.default_rng(problem.seed)
    X0 = rng.dirichlet(np.ones(n), size=R).T
    X, f, fw_gap, iters, done = _fista(Q, X0, problem.max_iter, problem.rtol, problem.atol)
    if problem.polish:
        for r in range(R):
            X[:, r] = _active_set_polish(Q, X[:, r], max_rounds=4 * n)
        QX = Q @ X
        f = np.einsum("ij,ij->j", X, QX)
        fw_gap = 2.0 * (f - QX.min(axis=0))
        done = np.minimum(fw_gap, f) <= problem.rtol * f + problem.atol
    out = []
    for r in range(R):
        x = X[:, r] / X[:, r].sum()
        mu = DiscreteMeasure(sites, signs * x, label=f"gap-solution(a={problem.a:g}, restart={r})")
        res = gap_residual(mu, problem.a, problem.nodes)
        out.append(GapSolution(mu, res, float(f[r]), float(max(f[r] - fw_gap[r], 0.0)),
                               int(iters[r]), bool(done[r]), r))
    return out


def min_gap_residual(problem: GapProblem) -> GapSolution:
    """
    Best restart of the sign-constrained gap-energy minimization.

    Never raises on non-convergence; ``converged`` is False instead. Ties are
    broken by the lower restart index.
    """
    sols = solve_restarts(problem)
    return min(sols, key=lambda s: (s.residual.value, s.restart))


@dataclass
class GapBracket:
    lo: float
    hi: float
    threshold: float
    probes: list = field(default_factory=list)  # (a, residual, converged, restarts)

    @property
    def estimate(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.hi - self.lo)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "estimate": self.estimate,
                "threshold": self.threshold,
                "probes": [list(p) for p in self.probes]}


def estimate_gap_characteristic(sites_a, sites_b, a_lo: float, a_hi: float,
                                threshold: float = 1e-3, rtol: float = 0.02,
                                **settings) -> GapBracket:
    """
    Bisect the transition radius between the feasible regime
    (residual < `threshold`) and the infeasible one.

    Stops once ``hi - lo <= rtol * hi``. Extra keyword arguments go to
    :class:`GapProblem`.

    Raises
    ------
    BracketError
        If ``a_lo`` is not feasible or ``a_hi`` is not infeasible.
    """
    if not 0 < a_lo < a_hi:
        raise ValueError("need 0 < a_lo < a_hi")
    base = GapProblem(sites_a, sites_b, a_lo, **settings)
    probes = []

    def probe(a):
        sol = min_gap_residual(base.with_radius(a))
        probes.append((float(a), sol.residual.value, sol.converged, base.restarts))
        return sol.residual.value

    r_lo, r_hi = probe(a_lo), probe(a_hi)
    if not (r_lo < threshold <= r_hi):
        raise BracketError(f"no regime change in [{a_lo}, {a_hi}]: residuals {r_lo:.3e}, {r_hi:.3e} "
                           f"vs threshold {threshold:g}")
    lo, hi = float(a_lo), float(a_hi)
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if probe(mid) < threshold:
            lo = mid
        else:
            hi = mid
    return GapBracket(lo, hi, threshold, probes)


def interlacing_check(sigma: DiscreteMeasure):
    """
    Whether the supports of the positive and negative parts interlace.

    Returns
    -------
    ok : bool
    violation : tuple or None
        First pair of adjacent same-sign sites.
    """
    if sigma.is_zero or np.all(sigma.masses > 0) or np.all(sigma.masses < 0):
        raise NotApplicableError("interlacing needs both a positive and a negative part")
    sgn = np.sign(sigma.masses)
    same = np.nonzero(sgn[1:] == sgn[:-1])[0]
    if same.size:
        k = int(same[0])
        return False, (float(sigma.sites[k]), float(sigma.sites[k + 1]))
    return True, None


def det_probe(sites_x, fine_grid, a_lo: float, a_hi: float, threshold: float = 1e-3,
              **kw) -> GapBracket:
    """
    Transition radius with the positive part on `sites_x` and the negative
    part free on the off-X points of `fine_grid`.
    """
    X = np.unique(np.asarray(sites_x, dtype=float))
    F = np.asarray(fine_grid, dtype=float)
    near = np.zeros(F.size, dtype=bool)
    if X.size:
        k = np.clip(np.searchsorted(X, F), 1, max(X.size - 1, 1))
        near = np.minimum(np.abs(F - X[k - 1]), np.abs(F - X[np.minimum(k, X.size - 1)])) < 1e-9
    return estimate_gap_characteristic(X, F[~near], a_lo, a_hi, threshold, **kw)


def lattice_sites(rule: str, window: float) -> np.ndarray:
    """
    Integer site sets on ``[-window, window]``: ``integers``, ``evens``,
    ``odds``, or ``Mk+r`` (e.g. ``3k``, ``3k+1``).
    """
    n = np.arange(-math.floor(window), math.floor(window) + 1)
    rule = rule.replace(" ", "").lower()
    if rule in ("integers", "z"):
        sel = np.ones(n.size, dtype=bool)
    elif rule == "evens":
        sel = n % 2 == 0
    elif rule == "odds":
        sel = n % 2 == 1
    elif "k" in rule:
        head, _, tail = rule.partition("k")
        M = int(head or 1)
        r = int(tail.lstrip("+") or 0) if tail else 0
        if M <= 0:
            raise ValueError(f"bad lattice rule {rule!r}")
        sel = n % M == r % M
    else:
        raise ValueError(f"unknown lattice rule {rule!r}")
    return n[sel].astype(float)


def alternating_subsequence(sites_a, sites_b) -> np.ndarray:
    """
    Greedy alternating selection A, B, A, B, ... from the merged sites,
    starting at the leftmost site of either set. Returns the selected points.
    """
    A = np.asarray(sites_a, dtype=float)
    B = np.asarray(sites_b, dtype=float)
    pts = np.concatenate([A, B])
    lab = np.concatenate([np.zeros(A.size, int), np.ones(B.size, int)])
    order = np.argsort(pts, kind="stable")
    pts, lab = pts[order], lab[order]
    out = []
    last = -1
    for p, l in zip(pts, lab):
        if l != last:
            out.append(p)
            last = l
    return np.asarray(out)


def alternating_density(sites_a, sites_b) -> float:
    """Points per unit length of the greedy alternating subsequence."""
    seq = alternating_subsequence(sites_a, sites_b)
    if seq.size < 2:
        return 0.0
    return (seq.size - 1) / (seq[-1] - seq[0])


def sweep(sites_a, sites_b, radii: Sequence[float], **settings) -> list:
    """Rows ``(a, residual, converged, restarts)`` over a list of radii."""
    base = GapProblem(sites_a, sites_b, float(radii[0]), **settings)
    rows = []
    for a in radii:
        sol = min_gap_residual(base.with_radius(float(a)))
        rows.append((float(a), sol.residual.value, sol.converged, base.restarts))
    return rows
