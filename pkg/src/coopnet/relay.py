"""Amplify-and-forward relaying over a time-expanded network.

Relays are memoryless per slot: in slot ``tau`` a relay transmits
``A @ y`` where ``y`` is what it received in slot ``tau``, and a
reception in slot ``tau`` is the superposition of what its in-neighbours
transmitted in slot ``tau - 1``. The end-to-end map from the source's
``T`` input slots to the sink's listening window is returned exactly,
either over the complex numbers or modulo a prime.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from graphlib import CycleError
from typing import Mapping

import numpy as np

from .cuts import DEFAULT_REL_TOL, numerical_rank
from .errors import MissingCoefficientError, NoCodeError
from .galois import DeterministicNetwork, PrimeField, fp_inv, fp_rank, matmul_mod, rref_mod
from .network import Network, draw_fading, flow_nodes, topological_order


@dataclass(frozen=True)
class RelayAssignment:
    """Per-relay square matrices (antennas x antennas), reused every slot.

    ``p`` is the prime for a finite-field assignment, ``None`` for complex.
    """

    matrices: Mapping[str, np.ndarray] = field(default_factory=dict)
    p: int | None = None

    def __len__(self) -> int:
        return len(self.matrices)


@dataclass(frozen=True)
class EndToEndMatrix:
    """Linear map from source antenna-slots (columns) to sink antenna-slots (rows)."""

    matrix: np.ndarray
    p: int | None
    rows: tuple[tuple[int, int], ...]
    cols: tuple[tuple[int, int], ...]
    T: int
    T_listen: int
    first_slot: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def rank(self, rel_tol: float = DEFAULT_REL_TOL) -> int:
        if self.p is None:
            return numerical_rank(self.matrix, rel_tol)
        return fp_rank(self.matrix, self.p)


def random_relays(
    net: Network | DeterministicNetwork,
    field: PrimeField | int | None = None,
    seed=0,
    terminals=None,
) -> RelayAssignment:
    """Random relay matrices for every non-terminal super-node.

    Complex entries are CN(0, 1); field entries are uniform on {0, ..., p-1}.
    ``terminals`` defaults to the declared sources and sinks.
    """
    base = net.network if isinstance(net, DeterministicNetwork) else net
    if isinstance(field, int):
        field = PrimeField(field)
    skip = set(base.sources) | set(base.sinks) if terminals is None else set(terminals)
    rng = np.random.default_rng(seed)
    mats = {}
    for node in base.nodes:
        if node.id in skip:
            continue
        shape = (node.antennas, node.antennas)
        mats[node.id] = draw_fading(rng, shape) if field is None else field.random(rng, shape)
    return RelayAssignment(mats, None if field is None else field.p)


def path_length_range(net: Network, s: str, t: str) -> tuple[int, int]:
    """Shortest and longest s -> t path length in super-node hops."""
    keep = flow_nodes(net, s, t)
    if t not in keep:
        raise ValueError(f"no path from {s} to {t}")
    try:
        order = topological_order(net, keep)
    except CycleError:
        raise ValueError("unfolding needs an acyclic network") from None
    lo = {s: 0}
    hi = {s: 0}
    for u in order:
        if u not in lo:
            continue
        for e in net.edges:
            if e.tail == u and e.head in keep and e.head != u:
                lo[e.head] = min(lo.get(e.head, lo[u] + 1), lo[u] + 1)
                hi[e.head] = max(hi.get(e.head, hi[u] + 1), hi[u] + 1)
    return lo[t], hi[t]


def is_layered(net: Network, s: str, t: str) -> bool:
    lo, hi = path_length_range(net, s, t)
    return lo == hi


def default_horizon(net: Network, s: str, t: str) -> int:
    """Slot horizon used when ``T`` is not given.

    The longest path length on layered networks. Otherwise it is stretched by
    the path-length spread so that rank gained at the edges of the listening
    window cannot lift ``floor(rank / T)`` above the per-slot value.
    """
    lo, hi = path_length_range(net, s, t)
    return hi * (1 + hi - lo)


def _default_flow(net: Network, source, sink) -> tuple[str, str]:
    if source is not None and sink is not None:
        return source, sink
    flows = net.declared_flows
    if not flows:
        raise ValueError("no declared flow; pass source and sink")
    return flows[0]


def unfold(
    net: Network | DeterministicNetwork,
    relays: RelayAssignment,
    T: int,
    source: str | None = None,
    sink: str | None = None,
) -> EndToEndMatrix:
    """End-to-end matrix of ``T`` source slots through the relays.

    The sink listens from the earliest possible arrival slot until the last
    input slot has propagated along the longest path, i.e.
    ``T + L_max - L_min`` slots.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    if isinstance(net, DeterministicNetwork):
        base, p = net.network, net.p
        coeffs = list(net.xi)
        if relays.p != p:
            raise ValueError("relay assignment is not over the network's field")
    else:
        base, p = net, None
        if not base.has_all_coefficients:
            raise MissingCoefficientError("unfold needs every edge coefficient")
        coeffs = [e.coeff for e in base.edges]
        if relays.p is not None:
            raise ValueError("finite-field relays given for a complex network")
    s, t = _default_flow(base, source, sink)
    lo, hi = path_length_range(base, s, t)
    keep = flow_nodes(base, s, t)
    ants = {n.id: n.antennas for n in base.nodes}
    n_s, n_t = ants[s], ants[t]
    n_in = n_s * T
    dtype = complex if p is None else np.int64

    def mul(a, b):
        return a @ b if p is None else matmul_mod(a, b, p)

    edges = [(e, c) for e, c in zip(base.edges, coeffs) if e.tail in keep and e.head in keep and e.tail != t and e.head != s]
    last_slot = T - 1 + hi
    tx = {v: np.zeros((ants[v], n_in), dtype=dtype) for v in keep}
    received = []
    for tau in range(0, last_slot + 1):
        rx = {v: np.zeros((ants[v], n_in), dtype=dtype) for v in keep}
        if tau > 0:
            for e, c in edges:
                contrib = c * tx[e.tail][e.tail_ant]
                rx[e.head][e.head_ant] = rx[e.head][e.head_ant] + contrib if p is None else (rx[e.head][e.head_ant] + contrib) % p
        new_tx = {}
        for v in keep:
            if v == s:
                x = np.zeros((n_s, n_in), dtype=dtype)
                if tau < T:
                    x[:, tau * n_s : (tau + 1) * n_s] = np.eye(n_s, dtype=dtype)
                new_tx[v] = x
            elif v == t or v not in relays.matrices:
                new_tx[v] = np.zeros((ants[v], n_in), dtype=dtype)
            else:
                new_tx[v] = mul(np.asarray(relays.matrices[v]), rx[v])
        tx = new_tx
        if lo <= tau <= last_slot:
            received.append(rx[t])
    matrix = np.vstack(received) if received else np.zeros((0, n_in), dtype=dtype)
    rows = tuple((b, tau) for tau in range(lo, last_slot + 1) for b in range(n_t))
    cols = tuple((a, tau) for tau in range(T) for a in range(n_s))
    return EndToEndMatrix(matrix, p, rows, cols, T, last_slot - lo + 1, lo)


def af_trial_ranks(
    net: Network,
    trials: int = 5,
    T: int | None = None,
    seed: int | np.random.SeedSequence = 0,
    source: str | None = None,
    sink: str | None = None,
    rel_tol: float = DEFAULT_REL_TOL,
    workers: int = 1,
) -> list[int]:
    """Raw end-to-end ranks for ``trials`` independent random relay draws.

    Trial ``k`` uses the k-th child of ``SeedSequence(seed)``, so results do
    not depend on ``workers``. ``seed`` may itself be a SeedSequence; it is
    not mutated.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    s, t = _default_flow(net, source, sink)
    if T is None:
        T = default_horizon(net, s, t)
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = [
        np.random.SeedSequence(root.entropy, spawn_key=(*root.spawn_key, k)) for k in range(trials)
    ]

    def one(child) -> int:
        relays = random_relays(net, None, child, terminals={s, t})
        return numerical_rank(unfold(net, relays, T, s, t).matrix, rel_tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, children))
    return [one(c) for c in children]


def achievable_dof_af(
    net: Network,
    trials: int = 5,
    T: int | None = None,
    seed: int = 0,
    source: str | None = None,
    sink: str | None = None,
    rel_tol: float = DEFAULT_REL_TOL,
    workers: int = 1,
) -> int:
    """Best per-slot rank ``floor(rank / T)`` over random relay draws.

    ``T`` defaults to :func:`default_horizon`.
    """
    s, t = _default_flow(net, source, sink)
    if T is None:
        T = default_horizon(net, s, t)
    ranks = af_trial_ranks(net, trials, T, seed, s, t, rel_tol, workers)
    return max(r // T for r in ranks)


# ------------------------------------------------------------ zero-error codes


@dataclass(frozen=True)
class ZeroErrorCode:
    """Linear code through the invertible submatrix ``submatrix = G[rows][:, cols]``.

    A message ``m`` in GF(p)^r is sent as ``x = encoder @ m``; the receiver
    reads ``y[rows]`` and applies ``decoder``.
    """

    p: int
    dimension: int
    column_selection: tuple[int, ...]
    row_selection: tuple[int, ...]
    submatrix: np.ndarray
    encoder: np.ndarray
    decoder: np.ndarray

    def encode(self, messages) -> np.ndarray:
        m = np.asarray(messages, dtype=np.int64).reshape(self.dimension, -1)
        return matmul_mod(self.encoder, m, self.p)

    def decode(self, received) -> np.ndarray:
        y = np.asarray(received, dtype=np.int64)
        return matmul_mod(self.decoder, y[list(self.row_selection)], self.p)


def _as_field_matrix(g, p):
    if isinstance(g, EndToEndMatrix):
        if g.p is None:
            raise ValueError("zero-error codes need a finite-field end-to-end matrix")
        return np.asarray(g.matrix, dtype=np.int64) % g.p, g.p
    if p is None:
        raise ValueError("pass p for a raw matrix")
    return np.asarray(g, dtype=np.int64) % p, p


def extract_zero_error_code(g: EndToEndMatrix | np.ndarray, p: int | None = None) -> ZeroErrorCode:
    """Select r pivot columns and r pivot rows forming an invertible r x r block."""
    mat, p = _as_field_matrix(g, p)
    _, cols = rref_mod(mat, p)
    r = len(cols)
    if r == 0:
        raise NoCodeError("end-to-end matrix has rank 0")
    _, rows = rref_mod(mat[:, cols].T, p)
    sub = mat[np.ix_(rows, cols)]
    encoder = np.zeros((mat.shape[1], r), dtype=np.int64)
    encoder[cols, np.arange(r)] = 1
    return ZeroErrorCode(p, r, tuple(cols), tuple(rows), sub, encoder, fp_inv(sub, p))


@dataclass(frozen=True)
class ZeroErrorCheck:
    ok: bool
    counterexample: tuple[int, ...] | None
    messages_checked: int
    exhaustive: bool

    def __bool__(self) -> bool:
        return self.ok


def verify_zero_error(
    code: ZeroErrorCode,
    g: EndToEndMatrix | np.ndarray,
    ceiling: int = 10**5,
    samples: int = 10**5,
    seed: int = 0,
) -> ZeroErrorCheck:
    """Encode, transmit through ``g`` and decode every message (or a sample).

    All ``p**r`` messages are swept when that count is at most ``ceiling``.
    """
    mat, p = _as_field_matrix(g, code.p)
    r = code.dimension
    exhaustive = p**r <= ceiling
    if exhaustive:
        msgs = np.array(list(itertools.product(range(p), repeat=r)), dtype=np.int64).T
    else:
        msgs = np.random.default_rng(seed).integers(0, p, size=(r, samples), dtype=np.int64)
    decoded = code.decode(matmul_mod(mat, code.encode(msgs), p))
    bad = np.flatnonzero(np.any(decoded != msgs, axis=0))
    counter = tuple(int(x) for x in msgs[:, bad[0]]) if bad.size else None
    return ZeroErrorCheck(bad.size == 0, counter, msgs.shape[1], exhaustive)
