"""Cut and chain conductance, the graph conductance LP, and bound checks.

Conductance of a set X under stationary weights pi is the probability mass
flowing out of X in one step, normalized by pi(X).  Chain conductance
minimizes over cuts; graph conductance maximizes chain conductance over all
chains respecting the graph's locality, solved here as a single linear
program (the cut minimum linearizes because the pi(X) are constants).
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.optimize import linprog

from .errors import (
    BadGamma,
    BadSize,
    DimensionMismatch,
    EmptyCutWeight,
    InfeasibleLP,
    NotStationary,
    TooManyNodes,
)
from .graph_core import Cut, Graph, enumerate_cuts
from .markov import Distribution, StochasticMatrix, check_stationary

_PHI_CHAIN_MAX_NODES = 24
_PHI_GRAPH_MAX_NODES = 14
_CHUNK_BITS = 16

__all__ = [
    "phi_cut",
    "phi_chain",
    "phi_chain_cycle",
    "phi_graph",
    "lemma1_check",
    "diameter_conductance_check",
    "clock_contraction_check",
]


def _members_of(X, n: int) -> np.ndarray:
    """Boolean membership vector from a Cut or an iterable of node indices."""
    sel = np.zeros(n, dtype=bool)
    if isinstance(X, Cut):
        nodes = X.members()
    else:
        nodes = list(X)
    for i in nodes:
        i = int(i)
        if not 0 <= i < n:
            raise DimensionMismatch(f"cut member {i} outside node range [0, {n})")
        sel[i] = True
    return sel


def phi_cut(P: StochasticMatrix, pi: Distribution, X) -> float:
    """Conductance of the set X: mass leaving X in one step over pi(X)."""
    if P.n != pi.n:
        raise DimensionMismatch("chain and distribution sizes differ")
    sel = _members_of(X, P.n)
    w = pi.weights
    weight = float(w[sel].sum())
    if weight <= 0.0:
        raise EmptyCutWeight("cut carries no stationary mass")
    flows = P.entries * w[None, :]
    internal = float(flows[np.ix_(sel, sel)].sum())
    return max(weight - internal, 0.0) / weight


def _cut_chunks(n: int, w: np.ndarray):
    """Yield (masks, members, weights) for all cuts with pi-weight <= 1/2.

    Masks ascend across and within chunks; both halves of an exact 1/2
    split are kept, matching enumerate_cuts.
    """
    total = 1 << n
    bits = np.arange(n, dtype=np.int64)
    step = 1 << _CHUNK_BITS
    for start in range(1, total - 1, step):
        stop = min(start + step, total - 1)
        masks = np.arange(start, stop, dtype=np.int64)
        members = ((masks[:, None] >> bits[None, :]) & 1).astype(bool)
        weights = members @ w
        keep = weights <= 0.5 + 1e-12
        if keep.any():
            yield masks[keep], members[keep], weights[keep]


def phi_chain(P: StochasticMatrix, pi: Distribution) -> tuple[float, Cut]:
    """Chain conductance: minimum of phi_cut over all cuts, with the argmin.

    Ties break toward the lowest cut bitmask.
    """
    if P.n != pi.n:
        raise DimensionMismatch("chain and distribution sizes differ")
    if P.n < 2:
        raise DimensionMismatch("conductance needs at least two nodes")
    if P.n > _PHI_CHAIN_MAX_NODES:
        raise TooManyNodes(
            f"phi_chain enumerates cuts; {P.n} nodes exceeds the "
            f"{_PHI_CHAIN_MAX_NODES}-node guard"
        )
    check_stationary(P, pi, tol=1e-9)
    w = pi.weights
    flows = P.entries * w[None, :]
    best_phi = math.inf
    best_mask = 0
    best_weight = 0.0
    for masks, members, weights in _cut_chunks(P.n, w):
        positive = weights > 0.0
        if not positive.any():
            continue
        masks = masks[positive]
        members = members[positive]
        weights = weights[positive]
        internal = ((members @ flows.T) * members).sum(axis=1)
        phis = np.maximum(weights - internal, 0.0) / weights
        k = int(np.argmin(phis))
        if phis[k] < best_phi:
            best_phi = float(phis[k])
            best_mask = int(masks[k])
            best_weight = float(weights[k])
    if not math.isfinite(best_phi):
        raise EmptyCutWeight("no cut carries positive stationary mass")
    return best_phi, Cut(member_mask=best_mask, weight=best_weight)


def phi_chain_cycle(P: StochasticMatrix, pi: Distribution) -> tuple[float, Cut]:
    """Chain conductance for a chain supported on the standard cycle.

    Off-diagonal support must sit on arcs (i, i+-1 mod n).  Every minimizing
    cut of such a chain can be taken contiguous: splitting a cut into its
    contiguous runs splits weight and boundary flow into parts, and a ratio
    of sums is never below the smallest ratio of parts.  Scanning the
    O(n^2) contiguous windows is therefore exact, with no size guard.
    """
    n = P.n
    if n != pi.n:
        raise DimensionMismatch("chain and distribution sizes differ")
    if n < 3:
        return phi_chain(P, pi)
    check_stationary(P, pi, tol=1e-9)
    off = P.entries.copy()
    np.fill_diagonal(off, 0.0)
    allowed = np.zeros((n, n), dtype=bool)
    idx = np.arange(n)
    allowed[(idx + 1) % n, idx] = True
    allowed[(idx - 1) % n, idx] = True
    if (np.abs(off) > 1e-12)[~allowed].any():
        raise DimensionMismatch(
            "phi_chain_cycle needs off-diagonal support on cycle arcs only"
        )
    w = pi.weights
    flows = P.entries * w[None, :]
    best = None
    for a in range(n):
        weight = 0.0
        for length in range(1, n):
            b = (a + length - 1) % n
            weight += w[b]
            if weight > 0.5 + 1e-12 or weight <= 0.0:
                continue
            cross = flows[(a - 1) % n, a] + flows[(b + 1) % n, b]
            phi = max(cross, 0.0) / weight
            mask = 0
            for off_i in range(length):
                mask |= 1 << ((a + off_i) % n)
            cand = (phi, mask, weight)
            if best is None or (phi, mask) < (best[0], best[1]):
                best = cand
    if best is None:
        raise EmptyCutWeight("no window carries positive stationary mass")
    return best[0], Cut(member_mask=best[1], weight=best[2])


def phi_graph(g: Graph, pi: Distribution) -> tuple[float, StochasticMatrix]:
    """Best achievable chain conductance on g, with one optimizing chain.

    Linear program: variables are the permitted entries of P (arcs of g
    plus the diagonal) and a scalar t; constraints fix column sums to one,
    impose P pi = pi, and require every cut's outflow to be at least
    t * pi(X); the objective maximizes t.
    """
    n = g.n
    if n != pi.n:
        raise DimensionMismatch("graph and distribution sizes differ")
    if n > _PHI_GRAPH_MAX_NODES:
        raise TooManyNodes(
            f"phi_graph builds one constraint per cut; {n} nodes exceeds "
            f"the {_PHI_GRAPH_MAX_NODES}-node guard"
        )
    w = pi.weights
    entries = [(i, i) for i in range(n)] + [(j, i) for (i, j) in sorted(g.arcs)]
    ne = len(entries)
    t_col = ne
    nv = ne + 1
    rows_e = np.array([e[0] for e in entries])
    cols_e = np.array([e[1] for e in entries])

    a_eq = np.zeros((2 * n, nv))
    b_eq = np.zeros(2 * n)
    for k in range(ne):
        a_eq[cols_e[k], k] = 1.0
        a_eq[n + rows_e[k], k] = w[cols_e[k]]
    b_eq[:n] = 1.0
    b_eq[n:] = w

    cuts = enumerate_cuts(g, pi)
    cuts = [c for c in cuts if c.weight > 0.0]
    if not cuts:
        raise EmptyCutWeight("no cut carries positive stationary mass")
    members = np.zeros((len(cuts), n), dtype=bool)
    for r, c in enumerate(cuts):
        members[r, c.members()] = True
    crossing = members[:, cols_e] & ~members[:, rows_e]
    a_ub = np.zeros((len(cuts), nv))
    a_ub[:, :ne] = -(crossing * w[cols_e][None, :])
    a_ub[:, t_col] = np.array([c.weight for c in cuts])
    b_ub = np.zeros(len(cuts))

    cost = np.zeros(nv)
    cost[t_col] = -1.0
    bounds = [(0.0, 1.0)] * ne + [(0.0, 1.0)]
    res = linprog(
        cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds,
        method="highs",
    )
    if not res.success:
        raise InfeasibleLP(f"conductance LP failed: {res.message}")
    x = res.x
    phi = float(x[t_col])
    P = np.zeros((n, n))
    P[rows_e, cols_e] = x[:ne]

    col_err = np.abs(P.sum(axis=0) - 1.0).max()
    stat_err = np.abs(P @ w - w).max()
    cut_err = float((a_ub @ x - b_ub).max())
    if col_err > 1e-8 or stat_err > 1e-8 or cut_err > 1e-8:
        raise InfeasibleLP(
            "LP solution violates constraints beyond 1e-8 "
            f"(columns {col_err:.2e}, stationarity {stat_err:.2e}, "
            f"cuts {cut_err:.2e})"
        )
    # + 0.0 turns negative zeros from the clamped LP solution into plain zeros
    return phi, StochasticMatrix(P + 0.0, locality=g)


def lemma1_check(
    P: StochasticMatrix, pi: Distribution, X, t: int
) -> tuple[float, float, bool]:
    """Leakage after t steps from the pi-restriction to X, against t*phi.

    Starts from pi conditioned on X and measures the mass outside X after
    t steps; that mass never exceeds t times the cut conductance.
    """
    if t < 1:
        raise BadSize("need at least one step")
    check_stationary(P, pi, tol=1e-9)
    sel = _members_of(X, P.n)
    w = pi.weights
    weight = float(w[sel].sum())
    if weight <= 0.0:
        raise EmptyCutWeight("cut carries no stationary mass")
    phi = phi_cut(P, pi, X)
    p = np.where(sel, w, 0.0) / weight
    for _ in range(int(t)):
        p = P.entries @ p
    leakage = float(p[~sel].sum())
    bound = t * phi
    return leakage, bound, leakage <= bound + 1e-9


def diameter_conductance_check(
    P: StochasticMatrix, pi: Distribution, D: int
) -> tuple[float, float, bool]:
    """Compare chain conductance against 4*log(1/pi_min)/(D-1).

    Reports both sides; a violation only warns, because the relationship
    carries an unpinned constant.
    """
    if D < 2:
        raise BadSize("diameter must be at least 2")
    lhs, _ = phi_chain(P, pi)
    positive = pi.weights[pi.weights > 0.0]
    pi_min = float(positive.min())
    rhs = 4.0 * math.log(1.0 / pi_min) / (D - 1)
    ok = lhs <= rhs + 1e-9
    if not ok:
        warnings.warn(
            f"conductance {lhs:.6g} exceeds diameter bound {rhs:.6g}",
            stacklevel=2,
        )
    return lhs, rhs, ok


def clock_contraction_check(
    D: int, gamma: float, q0
) -> tuple[float, float, bool]:
    """l1 contraction of a zero-sum perturbation over one clock period.

    The clock chain steps deterministically 0 -> 1 -> ... -> D+1 and leaks
    mass gamma from the top state back to 0.  A perturbation q summing to
    zero shrinks in l1 by at least the factor 2*(D+1)*gamma after D+1
    steps.
    """
    if D < 1:
        raise BadSize("clock depth must be at least 1")
    if not 0.0 < gamma < 1.0 / (2.0 * (D + 1)):
        raise BadGamma(
            f"gamma must lie in (0, 1/{2 * (D + 1)}) for depth {D}"
        )
    q = np.asarray(q0, dtype=float)
    if q.shape != (D + 2,):
        raise DimensionMismatch(f"perturbation must have length {D + 2}")
    if abs(q.sum()) > 1e-9:
        raise BadGamma("perturbation must sum to zero")
    n = D + 2
    P = np.zeros((n, n))
    for i in range(D + 1):
        P[i + 1, i] = 1.0
    P[n - 1, n - 1] = 1.0 - gamma
    P[0, n - 1] = gamma
    start = float(np.abs(q).sum())
    for _ in range(D + 1):
        q = P @ q
    end = float(np.abs(q).sum())
    ratio = 0.0 if start == 0.0 else end / start
    bound = 2.0 * (D + 1) * gamma
    return ratio, bound, ratio <= bound + 1e-9
