"""Canonical and random network builders."""

from __future__ import annotations

import numpy as np

from .network import Edge, Network, SuperNode, draw_fading, sample_coefficients


def _dense(tail: str, nt: int, head: str, nr: int) -> list[Edge]:
    return [Edge(tail, a, head, b) for a in range(nt) for b in range(nr)]


def single_edge(coeff: complex | None = None) -> Network:
    return Network((SuperNode("S"), SuperNode("D")), (Edge("S", 0, "D", 0, coeff),), ("S",), ("D",))


def point_to_point(nt: int, nr: int) -> Network:
    """MIMO link with every transmit/receive antenna pair connected."""
    return Network((SuperNode("S", nt), SuperNode("D", nr)), tuple(_dense("S", nt, "D", nr)), ("S",), ("D",))


def chain(hops: int, antennas: int = 1) -> Network:
    """S -> R1 -> ... -> D with fully connected antenna pairs on each hop."""
    ids = ["S"] + [f"R{k}" for k in range(1, hops)] + ["D"]
    nodes = tuple(SuperNode(i, antennas) for i in ids)
    edges = [e for u, v in zip(ids, ids[1:]) for e in _dense(u, antennas, v, antennas)]
    return Network(nodes, tuple(edges), ("S",), ("D",))


def diamond() -> Network:
    """S -> {R1, R2} -> D, single antennas."""
    nodes = (SuperNode("S"), SuperNode("R1"), SuperNode("R2"), SuperNode("D"))
    edges = (Edge("S", 0, "R1", 0), Edge("S", 0, "R2", 0), Edge("R1", 0, "D", 0), Edge("R2", 0, "D", 0))
    return Network(nodes, edges, ("S",), ("D",))


def keyhole(n_source: int = 2, n_relay: int = 1, n_sink: int = 2) -> Network:
    """S(n) -> R(m) -> D(k): a relay bottleneck in antenna count."""
    nodes = (SuperNode("S", n_source), SuperNode("R", n_relay), SuperNode("D", n_sink))
    edges = _dense("S", n_source, "R", n_relay) + _dense("R", n_relay, "D", n_sink)
    return Network(nodes, tuple(edges), ("S",), ("D",))


def parallel_relays(m: int, hops: int = 2) -> Network:
    """``m`` vertex-disjoint single-antenna relay chains of ``hops`` hops each.

    For single-hop parallel paths use ``point_to_point(m, 1)``.
    """
    if hops < 2:
        raise ValueError("hops must be >= 2")
    nodes = [SuperNode("S")]
    edges = []
    for k in range(m):
        prev = "S"
        for h in range(1, hops):
            rid = f"R{k + 1}_{h}"
            nodes.append(SuperNode(rid))
            edges.append(Edge(prev, 0, rid, 0))
            prev = rid
        edges.append(Edge(prev, 0, "D", 0))
    nodes.append(SuperNode("D"))
    return Network(tuple(nodes), tuple(edges), ("S",), ("D",))


def butterfly_wireline() -> Network:
    """Classic two-sink butterfly with orthogonal links (flagged wireline)."""
    ids = ["S", "A", "B", "C", "E", "D1", "D2"]
    links = [("S", "A"), ("S", "B"), ("A", "C"), ("B", "C"), ("C", "E"), ("A", "D1"), ("B", "D2"), ("E", "D1"), ("E", "D2")]
    edges = tuple(Edge(u, 0, v, 0) for u, v in links)
    return Network(tuple(SuperNode(i) for i in ids), edges, ("S",), ("D1", "D2"), wireline=True)


def random_dag(
    seed: int,
    n_nodes: int = 6,
    max_antennas: int = 3,
    edge_prob: float = 0.5,
    antenna_prob: float = 0.6,
    coefficients: bool = True,
) -> Network:
    """Random DAG on ``n_nodes`` super-nodes ordered S, V1, ..., D.

    Super-edges only run forward in that order; each chosen super-edge gets a
    random nonempty subset of antenna pairs. A path S -> D is forced.
    """
    rng = np.random.default_rng(seed)
    ids = ["S"] + [f"V{k}" for k in range(1, n_nodes - 1)] + ["D"]
    ants = {i: int(rng.integers(1, max_antennas + 1)) for i in ids}
    pairs = set()
    for a in range(n_nodes):
        for b in range(a + 1, n_nodes):
            if rng.random() < edge_prob:
                pairs.add((a, b))
    # force S -> D connectivity through a random increasing chain
    inner = np.arange(1, n_nodes - 1)
    mids = rng.choice(inner, size=int(rng.integers(0, inner.size + 1)), replace=False)
    hops = [0] + sorted(int(x) for x in mids) + [n_nodes - 1]
    pairs.update(zip(hops, hops[1:]))
    edges = []
    for a, b in sorted(pairs):
        u, v = ids[a], ids[b]
        chosen = [(x, y) for x in range(ants[u]) for y in range(ants[v]) if rng.random() < antenna_prob]
        if not chosen:
            chosen = [(int(rng.integers(ants[u])), int(rng.integers(ants[v])))]
        edges.extend(Edge(u, x, v, y) for x, y in chosen)
    net = Network(tuple(SuperNode(i, ants[i]) for i in ids), tuple(edges), ("S",), ("D",))
    if coefficients:
        net = sample_coefficients(net, int(rng.integers(2**63)))
    return net


def random_layered(
    seed: int,
    hops: int = 3,
    max_width: int = 2,
    max_antennas: int = 2,
    antenna_prob: float = 0.6,
    coefficients: bool = True,
) -> Network:
    """Random layered network: every S -> D path has exactly ``hops`` edges.

    Edges only join consecutive layers; every relay has an incoming and an
    outgoing edge.
    """
    rng = np.random.default_rng(seed)
    layers = [["S"]]
    for h in range(1, hops):
        width = int(rng.integers(1, max_width + 1))
        layers.append([f"L{h}N{k}" for k in range(width)])
    layers.append(["D"])
    ants = {i: int(rng.integers(1, max_antennas + 1)) for layer in layers for i in layer}
    edge_set: set[tuple[str, int, str, int]] = set()
    for prev, nxt in zip(layers, layers[1:]):
        for u in prev:
            for v in nxt:
                for x in range(ants[u]):
                    for y in range(ants[v]):
                        if rng.random() < antenna_prob:
                            edge_set.add((u, x, v, y))
        for v in nxt:
            if not any(e[2] == v for e in edge_set):
                u = prev[int(rng.integers(len(prev)))]
                edge_set.add((u, int(rng.integers(ants[u])), v, int(rng.integers(ants[v]))))
        for u in prev:
            if not any(e[0] == u for e in edge_set):
                v = nxt[int(rng.integers(len(nxt)))]
                edge_set.add((u, int(rng.integers(ants[u])), v, int(rng.integers(ants[v]))))
    order = {i: k for k, i in enumerate(i for layer in layers for i in layer)}
    edges = tuple(Edge(*e) for e in sorted(edge_set, key=lambda e: (order[e[0]], e[1], order[e[2]], e[3])))
    nodes = tuple(SuperNode(i, ants[i]) for layer in layers for i in layer)
    net = Network(nodes, edges, ("S",), ("D",))
    if coefficients:
        coeffs = draw_fading(rng, len(edges))
        net = net.with_coefficients(coeffs)
    return net
