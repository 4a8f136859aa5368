"""Cuts, cut transfer matrices, max-flow and the two min-cut quantities.

``max_diversity`` is the minimum number of antenna-level edges crossing any
source/sink cut. ``dof`` is the minimum rank of a cut transfer matrix.
Both minimise over partitions of *super-nodes*.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import CeilingExceededError, MissingCoefficientError
from .network import Network

MAX_NONTERMINALS = 20
DEFAULT_REL_TOL = 1e-9


@dataclass(frozen=True)
class Cut:
    """Partition (U, U^c) with ``source in U`` and ``sink not in U``.

    ``crossing_edges`` holds indices into ``net.edges`` of the edges running
    from U to U^c. ``mask`` is the binary-counting index of the cut over the
    non-terminal nodes (bit k set when the k-th non-terminal is in U).
    """

    source_side: frozenset[str]
    crossing_edges: tuple[int, ...]
    source: str
    sink: str
    mask: int = -1

    def label(self, order: Sequence[str] | None = None) -> str:
        ids = sorted(self.source_side) if order is None else [n for n in order if n in self.source_side]
        return "{" + ",".join(ids) + "}"


@dataclass(frozen=True)
class CutMatrix:
    """Transfer matrix of the edges crossing a cut.

    Rows are receive antennas on the sink side, columns transmit antennas on
    the source side; only antennas touched by a crossing edge are kept.
    """

    matrix: np.ndarray
    rows: tuple[tuple[str, int], ...]
    cols: tuple[tuple[str, int], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


@dataclass(frozen=True)
class FlowAnalysis:
    source: str
    sink: str
    min_cut_value: int
    dof: int
    argmin_cut_diversity: Cut
    argmin_cut_dof: Cut

    @property
    def diversity(self) -> int:
        return self.min_cut_value


def _check_terminals(net: Network, s: str, t: str) -> None:
    ids = net.node_ids
    if s not in ids or t not in ids:
        raise KeyError(f"unknown terminal in flow {s}->{t}")
    if s == t:
        raise ValueError("source and sink must differ")


def _nonterminals(net: Network, s: str, t: str) -> list[str]:
    return [n for n in net.node_ids if n != s and n != t]


def make_cut(net: Network, source_side, s: str, t: str) -> Cut:
    """Cut with the given source side; ``mask`` follows :func:`enumerate_cuts`."""
    side = frozenset(source_side) | {s}
    if t in side:
        raise ValueError("sink cannot be on the source side")
    crossing = tuple(i for i, e in enumerate(net.edges) if e.tail in side and e.head not in side)
    mask = sum(1 << k for k, n in enumerate(_nonterminals(net, s, t)) if n in side)
    return Cut(side, crossing, s, t, mask)


def num_cuts(net: Network, s: str, t: str) -> int:
    return 2 ** len(_nonterminals(net, s, t))


def enumerate_cuts(
    net: Network, s: str, t: str, max_nonterminals: int = MAX_NONTERMINALS
) -> Iterator[Cut]:
    """Yield all 2^(|V|-2) cuts between ``s`` and ``t`` in binary-counting order."""
    _check_terminals(net, s, t)
    inner = _nonterminals(net, s, t)
    if len(inner) > max_nonterminals:
        raise CeilingExceededError(
            f"{len(inner)} non-terminal super-nodes exceed the enumeration ceiling of {max_nonterminals}"
        )
    tails = [e.tail for e in net.edges]
    heads = [e.head for e in net.edges]
    for mask in range(2 ** len(inner)):
        side = {s}
        side.update(n for k, n in enumerate(inner) if mask >> k & 1)
        crossing = tuple(i for i in range(len(tails)) if tails[i] in side and heads[i] not in side)
        yield Cut(frozenset(side), crossing, s, t, mask)


def cut_value(cut: Cut) -> int:
    """Number of antenna-level edges crossing from the source side."""
    return len(cut.crossing_edges)


def cut_layout(net: Network, cut: Cut):
    """Row/column antenna labels and (row, col, edge index) triples of a cut."""
    rows = sorted({net.edges[i].head_antenna for i in cut.crossing_edges}, key=_antenna_key(net))
    cols = sorted({net.edges[i].tail_antenna for i in cut.crossing_edges}, key=_antenna_key(net))
    r_index = {a: k for k, a in enumerate(rows)}
    c_index = {a: k for k, a in enumerate(cols)}
    entries = [(r_index[net.edges[i].head_antenna], c_index[net.edges[i].tail_antenna], i) for i in cut.crossing_edges]
    return tuple(rows), tuple(cols), entries


def _antenna_key(net: Network):
    order = {n: k for k, n in enumerate(net.node_ids)}
    return lambda a: (order[a[0]], a[1])


def cut_matrix(net: Network, cut: Cut) -> CutMatrix:
    """Complex transfer matrix H of the edges crossing ``cut``."""
    rows, cols, entries = cut_layout(net, cut)
    m = np.zeros((len(rows), len(cols)), dtype=complex)
    for r, c, i in entries:
        h = net.edges[i].coeff
        if h is None:
            raise MissingCoefficientError(f"edge {i} has no coefficient; sample coefficients first")
        m[r, c] += h
    return CutMatrix(m, rows, cols)


def numerical_rank(m, rel_tol: float = DEFAULT_REL_TOL) -> int:
    """Count singular values above ``rel_tol`` times the largest one."""
    if not 0 < rel_tol < 1:
        raise ValueError("rel_tol must lie in (0, 1)")
    a = np.asarray(m.matrix if isinstance(m, CutMatrix) else m)
    if a.size == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.count_nonzero(sv > rel_tol * sv[0]))


# ------------------------------------------------------------------ max-flow


@dataclass(frozen=True)
class _FlowResult:
    value: int
    flow: tuple[int, ...]
    residual_side: frozenset[str]


def _max_flow(net: Network, s: str, t: str) -> _FlowResult:
    """Edmonds-Karp with unit arcs; BFS scans arcs by ascending edge index."""
    _check_terminals(net, s, t)
    incident: dict[str, list[tuple[int, bool]]] = {n: [] for n in net.node_ids}
    for i, e in enumerate(net.edges):
        if e.tail == e.head:
            continue
        incident[e.tail].append((i, True))
        incident[e.head].append((i, False))
    for arcs in incident.values():
        arcs.sort()
    flow = [0] * len(net.edges)
    value = 0
    while True:
        parent: dict[str, tuple[int, bool] | None] = {s: None}
        queue = deque([s])
        while queue and t not in parent:
            u = queue.popleft()
            for i, forward in incident[u]:
                e = net.edges[i]
                if forward and flow[i] == 0:
                    v = e.head
                elif not forward and flow[i] == 1:
                    v = e.tail
                else:
                    continue
                if v not in parent:
                    parent[v] = (i, forward)
                    queue.append(v)
        if t not in parent:
            return _FlowResult(value, tuple(flow), frozenset(parent))
        v = t
        while parent[v] is not None:
            i, forward = parent[v]
            flow[i] = 1 if forward else 0
            v = net.edges[i].tail if forward else net.edges[i].head
        value += 1


def min_cut_value(net: Network, s: str, t: str) -> int:
    """Max-flow value with one unit arc per antenna-level edge."""
    return _max_flow(net, s, t).value


def max_diversity(net: Network, s: str, t: str) -> int:
    """Largest diversity order achievable for the flow ``s -> t``."""
    return min_cut_value(net, s, t)


def min_cut(net: Network, s: str, t: str) -> Cut:
    """A minimum-value cut: the super-nodes reachable in the final residual graph."""
    res = _max_flow(net, s, t)
    return make_cut(net, res.residual_side, s, t)


def brute_force_min_cut(net: Network, s: str, t: str) -> tuple[int, Cut]:
    """Minimum cut value by exhaustive enumeration (first minimiser)."""
    best = None
    for cut in enumerate_cuts(net, s, t):
        if best is None or cut_value(cut) < cut_value(best):
            best = cut
    return cut_value(best), best


def edge_disjoint_paths(net: Network, s: str, t: str) -> list[list[int]]:
    """Decompose an integral max-flow into edge-disjoint paths.

    Each path is a list of edge indices whose consecutive edges share a
    super-node; it starts at an antenna of ``s`` and ends at one of ``t``.
    """
    res = _max_flow(net, s, t)
    remaining = set(i for i, f in enumerate(res.flow) if f)
    out_edges: dict[str, list[int]] = {}
    for i in sorted(remaining):
        out_edges.setdefault(net.edges[i].tail, []).append(i)
    paths = []
    for _ in range(res.value):
        path: list[int] = []
        visited = {s: 0}
        u = s
        while u != t:
            i = next(j for j in out_edges[u] if j in remaining)
            remaining.discard(i)
            path.append(i)
            u = net.edges[i].head
            if u in visited:
                # flow cycle: drop it and continue from where it closed
                path = path[: visited[u]]
                visited = {n: k for n, k in visited.items() if k <= len(path)}
            else:
                visited[u] = len(path)
        paths.append(path)
    return paths


# ------------------------------------------------------------------------ DOF


def dof_with_cut(
    net: Network, s: str, t: str, rel_tol: float = DEFAULT_REL_TOL, max_nonterminals: int = MAX_NONTERMINALS
) -> tuple[int, Cut]:
    """Minimum cut-matrix rank and the first cut attaining it."""
    if not net.has_all_coefficients:
        raise MissingCoefficientError("dof needs every edge coefficient; call sample_coefficients first")
    best_rank, best_cut = None, None
    for cut in enumerate_cuts(net, s, t, max_nonterminals):
        r = numerical_rank(cut_matrix(net, cut), rel_tol)
        if best_rank is None or r < best_rank:
            best_rank, best_cut = r, cut
            if r == 0:
                break
    return best_rank, best_cut


def dof(net: Network, s: str, t: str, rel_tol: float = DEFAULT_REL_TOL) -> int:
    """Degrees of freedom of the flow ``s -> t``: min over cuts of rank(H_cut)."""
    return dof_with_cut(net, s, t, rel_tol)[0]


def multicast_dof(net: Network, s: str, sinks: Sequence[str], rel_tol: float = DEFAULT_REL_TOL) -> int:
    """Smallest per-sink DOF when every sink wants the same message."""
    if not sinks:
        raise ValueError("multicast needs at least one sink")
    return min(dof(net, s, t, rel_tol) for t in sinks)


def analyze_flow(net: Network, s: str, t: str, rel_tol: float = DEFAULT_REL_TOL) -> FlowAnalysis:
    res = _max_flow(net, s, t)
    rank, rank_cut = dof_with_cut(net, s, t, rel_tol)
    return FlowAnalysis(
        source=s,
        sink=t,
        min_cut_value=res.value,
        dof=rank,
        argmin_cut_diversity=make_cut(net, res.residual_side, s, t),
        argmin_cut_dof=rank_cut,
    )
