"""Multi-antenna network model: super-nodes, antenna-level edges, file format.

A terminal is a *super-node* hosting one or more antennas; every edge joins
one antenna to another and carries a scalar complex fading coefficient.
A coefficient may be left ``None`` (absent) and filled in later by
:func:`sample_coefficients`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from graphlib import CycleError, TopologicalSorter
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .errors import NetworkReferenceError, NetworkSyntaxError, ZeroCoefficientError

SAMPLERS = ("gaussian", "disc")


@dataclass(frozen=True)
class SuperNode:
    id: str
    antennas: int = 1


@dataclass(frozen=True)
class Edge:
    tail: str
    tail_ant: int
    head: str
    head_ant: int
    coeff: complex | None = None

    @property
    def tail_antenna(self) -> tuple[str, int]:
        return (self.tail, self.tail_ant)

    @property
    def head_antenna(self) -> tuple[str, int]:
        return (self.head, self.head_ant)


@dataclass(frozen=True)
class Network:
    """Edge-labelled directed graph over antennas grouped into super-nodes.

    ``flows`` optionally restricts which (source, sink) pairs are analysed;
    when ``None`` every source is paired with every sink. ``wireline`` marks
    a graph whose links are orthogonal (see :func:`embed_wireline`).
    """

    nodes: tuple[SuperNode, ...]
    edges: tuple[Edge, ...]
    sources: tuple[str, ...] = ()
    sinks: tuple[str, ...] = ()
    flows: tuple[tuple[str, str], ...] | None = None
    wireline: bool = False

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "sinks", tuple(self.sinks))
        if self.flows is not None:
            object.__setattr__(self, "flows", tuple(tuple(f) for f in self.flows))

    @property
    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def antennas(self, node_id: str) -> int:
        for n in self.nodes:
            if n.id == node_id:
                return n.antennas
        raise KeyError(node_id)

    @property
    def q(self) -> int:
        """Largest antenna count of any super-node."""
        return max((n.antennas for n in self.nodes), default=0)

    @property
    def declared_flows(self) -> list[tuple[str, str]]:
        if self.flows is not None:
            return list(self.flows)
        return [(s, t) for s in self.sources for t in self.sinks if s != t]

    @property
    def has_all_coefficients(self) -> bool:
        return all(e.coeff is not None for e in self.edges)

    def coefficients(self) -> np.ndarray:
        """Edge coefficients as a complex array; absent ones become NaN."""
        return np.array(
            [complex("nan") if e.coeff is None else e.coeff for e in self.edges],
            dtype=complex,
        )

    def with_coefficients(self, coeffs: Iterable[complex | None]) -> Network:
        edges = tuple(
            replace(e, coeff=None if c is None else complex(c))
            for e, c in zip(self.edges, coeffs, strict=True)
        )
        return replace(self, edges=edges)

    def successors(self) -> dict[str, list[str]]:
        """Super-node adjacency (deduplicated, in edge order)."""
        succ: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            if e.head not in succ.setdefault(e.tail, []):
                succ[e.tail].append(e.head)
        return succ

    def antenna_nodes(self) -> list[tuple[str, int]]:
        """All small (antenna) nodes in declaration order."""
        return [(n.id, a) for n in self.nodes for a in range(n.antennas)]

    def antenna_graph(self) -> tuple[list[tuple[str, int]], list[tuple[int, int]]]:
        """Expand to antenna level: (small nodes, arcs as index pairs)."""
        small = self.antenna_nodes()
        index = {v: i for i, v in enumerate(small)}
        arcs = [(index[e.tail_antenna], index[e.head_antenna]) for e in self.edges]
        return small, arcs


# ---------------------------------------------------------------- file format


def _fail(msg: str) -> None:
    raise NetworkSyntaxError(msg)


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        _fail(msg)


def _as_int(value: Any, where: str) -> int:
    _expect(isinstance(value, int) and not isinstance(value, bool), f"{where}: expected integer")
    return value


def _as_str(value: Any, where: str) -> str:
    _expect(isinstance(value, str), f"{where}: expected string")
    return value


def _as_number(value: Any, where: str) -> float:
    _expect(
        isinstance(value, (int, float)) and not isinstance(value, bool),
        f"{where}: expected number",
    )
    return float(value)


def network_from_dict(doc: Any) -> Network:
    """Build a :class:`Network` from an already-decoded JSON document."""
    _expect(isinstance(doc, dict), "top level: expected an object")
    for key in ("nodes", "edges", "sources", "sinks"):
        _expect(key in doc, f"top level: missing key {key!r}")
        _expect(isinstance(doc[key], list), f"{key}: expected a list")

    nodes = []
    for i, raw in enumerate(doc["nodes"]):
        where = f"nodes[{i}]"
        _expect(isinstance(raw, dict), f"{where}: expected an object")
        _expect("id" in raw, f"{where}: missing 'id'")
        node_id = _as_str(raw["id"], f"{where}.id")
        ants = _as_int(raw.get("antennas", 1), f"{where}.antennas")
        if ants < 1:
            _fail(f"{where}.antennas: must be >= 1")
        nodes.append(SuperNode(node_id, ants))
    ants_of = {}
    for n in nodes:
        ants_of.setdefault(n.id, n.antennas)

    edges = []
    for i, raw in enumerate(doc["edges"]):
        where = f"edges[{i}]"
        _expect(isinstance(raw, dict), f"{where}: expected an object")
        for key in ("from", "to"):
            _expect(key in raw, f"{where}: missing {key!r}")
        tail = _as_str(raw["from"], f"{where}.from")
        head = _as_str(raw["to"], f"{where}.to")
        tail_ant = _as_int(raw.get("from_ant", 0), f"{where}.from_ant")
        head_ant = _as_int(raw.get("to_ant", 0), f"{where}.to_ant")
        for node_id, ant, role in ((tail, tail_ant, "from"), (head, head_ant, "to")):
            if node_id not in ants_of:
                raise NetworkReferenceError(f"{where}.{role}: unknown node {node_id!r}")
            if not 0 <= ant < ants_of[node_id]:
                raise NetworkReferenceError(
                    f"{where}.{role}_ant: antenna {ant} out of range for node "
                    f"{node_id!r} with {ants_of[node_id]} antenna(s)"
                )
        coeff = None
        if raw.get("coeff") is not None:
            c = raw["coeff"]
            _expect(isinstance(c, list) and len(c) == 2, f"{where}.coeff: expected [re, im]")
            coeff = complex(_as_number(c[0], f"{where}.coeff[0]"), _as_number(c[1], f"{where}.coeff[1]"))
            if coeff == 0:
                raise ZeroCoefficientError(f"{where}.coeff: zero coefficient is not allowed")
        edges.append(Edge(tail, tail_ant, head, head_ant, coeff))

    terminals = {}
    for key in ("sources", "sinks"):
        ids = []
        for i, raw in enumerate(doc[key]):
            node_id = _as_str(raw, f"{key}[{i}]")
            if node_id not in ants_of:
                raise NetworkReferenceError(f"{key}[{i}]: unknown node {node_id!r}")
            ids.append(node_id)
        terminals[key] = tuple(ids)

    flows = None
    if doc.get("flows") is not None:
        _expect(isinstance(doc["flows"], list), "flows: expected a list")
        flows = []
        for i, raw in enumerate(doc["flows"]):
            _expect(isinstance(raw, list) and len(raw) == 2, f"flows[{i}]: expected [source, sink]")
            pair = (_as_str(raw[0], f"flows[{i}][0]"), _as_str(raw[1], f"flows[{i}][1]"))
            for node_id in pair:
                if node_id not in ants_of:
                    raise NetworkReferenceError(f"flows[{i}]: unknown node {node_id!r}")
            flows.append(pair)
        flows = tuple(flows)

    wireline = doc.get("wireline", False)
    _expect(isinstance(wireline, bool), "wireline: expected boolean")
    return Network(tuple(nodes), tuple(edges), terminals["sources"], terminals["sinks"], flows, wireline)


def parse_network(text: str) -> Network:
    """Parse a JSON network document.

    Raises :class:`NetworkSyntaxError` (with line/column for JSON errors),
    :class:`NetworkReferenceError` or :class:`ZeroCoefficientError`.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    return network_from_dict(doc)


def network_to_dict(net: Network) -> dict[str, Any]:
    edges = []
    for e in net.edges:
        item: dict[str, Any] = {"from": e.tail, "from_ant": e.tail_ant, "to": e.head, "to_ant": e.head_ant}
        if e.coeff is not None:
            item["coeff"] = [float(e.coeff.real), float(e.coeff.imag)]
        edges.append(item)
    doc: dict[str, Any] = {
        "nodes": [{"id": n.id, "antennas": n.antennas} for n in net.nodes],
        "edges": edges,
        "sources": list(net.sources),
        "sinks": list(net.sinks),
    }
    if net.flows is not None:
        doc["flows"] = [list(f) for f in net.flows]
    if net.wireline:
        doc["wireline"] = True
    return doc


def serialize_network(net: Network) -> str:
    """Canonical JSON text; nodes and edges keep their declaration order."""
    return json.dumps(network_to_dict(net), indent=2) + "\n"


def load_network(path: str | Path) -> Network:
    return parse_network(Path(path).read_text(encoding="utf-8"))


def dump_network(net: Network, path: str | Path) -> None:
    Path(path).write_text(serialize_network(net), encoding="utf-8")


# ----------------------------------------------------------------- validation


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    element: Any = None


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


def reachable_from(succ: dict[str, list[str]], start: str) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in succ.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def _reverse(succ: dict[str, list[str]]) -> dict[str, list[str]]:
    pred: dict[str, list[str]] = {u: [] for u in succ}
    for u, vs in succ.items():
        for v in vs:
            pred.setdefault(v, []).append(u)
    return pred


def flow_nodes(net: Network, s: str, t: str) -> set[str]:
    """Super-nodes lying on at least one s -> t path."""
    succ = net.successors()
    return reachable_from(succ, s) & reachable_from(_reverse(succ), t)


def topological_order(net: Network, nodes: Iterable[str] | None = None) -> list[str]:
    """Topological order of the super-node graph (optionally an induced subgraph).

    Raises ``graphlib.CycleError`` on a directed cycle.
    """
    keep = set(net.node_ids if nodes is None else nodes)
    ts: TopologicalSorter = TopologicalSorter()
    for n in net.node_ids:
        if n in keep:
            ts.add(n)
    for e in net.edges:
        if e.tail in keep and e.head in keep and e.tail != e.head:
            ts.add(e.head, e.tail)
    return list(ts.static_order())


def validate(net: Network) -> ValidationReport:
    """Check every structural invariant plus per-flow reachability.

    Never raises; problems are returned as :class:`Violation` records.
    """
    out: list[Violation] = []
    ants_of: dict[str, int] = {}
    for n in net.nodes:
        if n.id in ants_of:
            out.append(Violation("duplicate_node", f"node id {n.id!r} declared twice", n))
        else:
            ants_of[n.id] = n.antennas
        if n.antennas < 1:
            out.append(Violation("antennas", f"node {n.id!r} has {n.antennas} antennas", n))

    seen_pairs = set()
    for i, e in enumerate(net.edges):
        bad_ref = False
        for node_id, ant in (e.tail_antenna, e.head_antenna):
            if node_id not in ants_of:
                out.append(Violation("unknown_node", f"edge {i} references unknown node {node_id!r}", e))
                bad_ref = True
            elif not 0 <= ant < ants_of[node_id]:
                out.append(Violation("antenna_range", f"edge {i}: antenna {ant} out of range at {node_id!r}", e))
                bad_ref = True
        if e.tail == e.head:
            out.append(Violation("self_loop", f"edge {i} joins super-node {e.tail!r} to itself", e))
        if e.coeff is not None and e.coeff == 0:
            out.append(Violation("zero_coefficient", f"edge {i} has a zero coefficient", e))
        pair = (e.tail_antenna, e.head_antenna)
        if not net.wireline and not bad_ref and pair in seen_pairs:
            out.append(Violation("duplicate_edge", f"edge {i} repeats antenna pair {pair}", e))
        seen_pairs.add(pair)

    for key in ("sources", "sinks"):
        for node_id in getattr(net, key):
            if node_id not in ants_of:
                out.append(Violation("unknown_node", f"{key} entry {node_id!r} is not a node", node_id))

    flows = net.declared_flows
    if not flows:
        out.append(Violation("no_flow", "no (source, sink) flow is declared", None))
    if any(v.code == "unknown_node" for v in out):
        return ValidationReport(tuple(out))

    succ = net.successors()
    on_flow: set[str] = set()
    for s, t in flows:
        if s == t:
            out.append(Violation("bad_flow", f"flow {s}->{t} has identical endpoints", (s, t)))
            continue
        if t not in reachable_from(succ, s):
            out.append(Violation("unreachable", f"sink {t!r} is unreachable from source {s!r}", (s, t)))
            continue
        on_flow |= flow_nodes(net, s, t)
    try:
        topological_order(net, on_flow)
    except CycleError as exc:
        cycle = exc.args[1] if len(exc.args) > 1 else None
        out.append(Violation("acyclic", f"super-node cycle on a declared flow: {cycle}", cycle))
    return ValidationReport(tuple(out))


# ------------------------------------------------------------------- sampling


def draw_fading(rng: np.random.Generator, size, sampler: str = "gaussian") -> np.ndarray:
    """Unit-power complex fading draws.

    ``"gaussian"``: circularly-symmetric CN(0, 1) (Rayleigh magnitude).
    ``"disc"``: uniform on the disc of radius sqrt(2), also E|h|^2 = 1.
    """
    if sampler == "gaussian":
        re_part = rng.standard_normal(size)
        im_part = rng.standard_normal(size)
        return (re_part + 1j * im_part) / np.sqrt(2.0)
    if sampler == "disc":
        r = np.sqrt(2.0 * rng.random(size))
        theta = 2.0 * np.pi * rng.random(size)
        return r * np.exp(1j * theta)
    raise ValueError(f"unknown sampler {sampler!r}; expected one of {SAMPLERS}")


def sample_coefficients(net: Network, seed: int, sampler: str = "gaussian") -> Network:
    """Replace every absent coefficient with an independent fading draw.

    Present coefficients are kept. The result depends only on ``seed``.
    """
    missing = [i for i, e in enumerate(net.edges) if e.coeff is None]
    if not missing:
        return net
    rng = np.random.default_rng(seed)
    draws = draw_fading(rng, len(missing), sampler)
    # a draw of exactly zero has probability zero, but the convention forbids it
    draws[draws == 0] = 1.0
    coeffs: list[complex | None] = [e.coeff for e in net.edges]
    for i, h in zip(missing, draws):
        coeffs[i] = complex(h)
    return net.with_coefficients(coeffs)


# --------------------------------------------------------------- wireline


def embed_wireline(wireline: Network) -> Network:
    """Natural embedding of an orthogonal-link graph into a wireless network.

    Each super-node receives one dedicated antenna per incident link, so no
    antenna touches two edges. Antenna indices given on the input edges are
    ignored; coefficients are carried over.
    """
    if not wireline.wireline:
        raise ValueError("embed_wireline expects a network flagged as wireline")
    next_ant = {n.id: 0 for n in wireline.nodes}
    edges = []
    for e in wireline.edges:
        ta = next_ant[e.tail]
        next_ant[e.tail] += 1
        ha = next_ant[e.head]
        next_ant[e.head] += 1
        edges.append(Edge(e.tail, ta, e.head, ha, e.coeff))
    nodes = tuple(SuperNode(n.id, max(1, next_ant[n.id])) for n in wireline.nodes)
    return Network(nodes, tuple(edges), wireline.sources, wireline.sinks, wireline.flows, wireline=False)


def to_wireline(net: Network) -> Network:
    """Flag a network's links as orthogonal (for :func:`embed_wireline`)."""
    return replace(net, wireline=True)
