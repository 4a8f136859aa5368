"""Exact linear algebra over prime fields and the finite-field lift.

The lift replaces every complex edge coefficient by a nonzero residue
``xi`` modulo a prime ``p`` so that, cut by cut, the rank of the field
transfer matrix is at least the rank of the complex one. Residues are drawn
at random and the result is *certified* by computing both ranks.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from .cuts import DEFAULT_REL_TOL, Cut, cut_layout, cut_matrix, cut_value, enumerate_cuts, numerical_rank
from .errors import LiftError, MissingCoefficientError, NetworkSyntaxError
from .network import Network, network_from_dict, network_to_dict

MAX_PRIME = 2**31 - 1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    c = max(n + 1, 2)
    while not is_prime(c):
        c += 1
    return c


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.p > MAX_PRIME:
            raise ValueError(f"modulus {self.p} exceeds 2^31 - 1")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, -1, self.p)

    def reduce(self, m) -> np.ndarray:
        return np.asarray(m, dtype=np.int64) % self.p

    def random(self, rng: np.random.Generator, size, nonzero: bool = False) -> np.ndarray:
        return rng.integers(1 if nonzero else 0, self.p, size=size, dtype=np.int64)


def _as_fp(m, p: int) -> np.ndarray:
    a = np.asarray(m)
    if a.dtype == object:
        a = np.array([[int(x) % p for x in row] for row in a], dtype=np.int64).reshape(a.shape)
    return np.asarray(a, dtype=np.int64) % p


def matmul_mod(a, b, p: int) -> np.ndarray:
    """Matrix product modulo ``p`` without int64 overflow."""
    a = _as_fp(a, p)
    b = _as_fp(b, p)
    inner = a.shape[-1] if a.ndim else 1
    if inner == 0:
        return np.zeros((a.shape[0], b.shape[-1]), dtype=np.int64)
    if (p - 1) ** 2 * inner < 2**63:
        return (a @ b) % p
    out = (a.astype(object) @ b.astype(object)) % p
    return out.astype(np.int64)


def rref_mod(m, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(p) and the pivot columns."""
    a = _as_fp(m, p).copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        factors = a[:, c].copy()
        factors[r] = 0
        nzr = np.flatnonzero(factors)
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(factors[nzr], a[r]) % p) % p
        pivots.append(c)
        r += 1
    return a, pivots


def fp_rank(m, p: int) -> int:
    """Exact rank over GF(p)."""
    a = np.asarray(m)
    if a.size == 0:
        return 0
    return len(rref_mod(a, p)[1])


def fp_det(m, p: int) -> int:
    """Determinant over GF(p) by elimination with row-swap sign tracking."""
    a = _as_fp(m, p).copy()
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("determinant needs a square matrix")
    n = a.shape[0]
    det = 1
    for c in range(n):
        nz = np.flatnonzero(a[c:, c])
        if nz.size == 0:
            return 0
        k = c + int(nz[0])
        if k != c:
            a[[c, k]] = a[[k, c]]
            det = -det
        piv = int(a[c, c])
        det = det * piv % p
        inv = pow(piv, -1, p)
        below = a[c + 1 :, c] * inv % p
        a[c + 1 :] = (a[c + 1 :] - np.outer(below, a[c]) % p) % p
    return det % p


def fp_inv(m, p: int) -> np.ndarray:
    """Inverse over GF(p); raises ``ValueError`` when singular."""
    a = _as_fp(m, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse needs a square matrix")
    r, pivots = rref_mod(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular modulo p")
    return r[:, n:]


def choose_prime(n_edges: int, n_cuts: int) -> int:
    """Smallest prime above 2 * N * |cuts|.

    Each cut's chosen minor has degree at most one per edge variable, so the
    product over all cuts has total degree at most N * |cuts|; a uniform draw
    from a field twice that size misses a root with probability >= 1/2.
    """
    if n_edges < 1 or n_cuts < 1:
        raise ValueError("need at least one edge and one cut")
    return next_prime(2 * n_edges * n_cuts)


# ------------------------------------------------------------ deterministic net


@dataclass(frozen=True)
class DeterministicNetwork:
    """Linear deterministic network over GF(p) sharing the topology of ``network``."""

    network: Network
    p: int
    q: int
    xi: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "xi", tuple(int(x) for x in self.xi))
        if len(self.xi) != len(self.network.edges):
            raise ValueError("need exactly one field coefficient per edge")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if any(not 0 < x < self.p for x in self.xi):
            raise ValueError("field coefficients must be nonzero residues")


def field_cut_matrix(dn: DeterministicNetwork, cut: Cut) -> np.ndarray:
    """Transfer matrix G of a cut, entries modulo ``dn.p``."""
    rows, cols, entries = cut_layout(dn.network, cut)
    g = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for r, c, i in entries:
        g[r, c] = (g[r, c] + dn.xi[i]) % dn.p
    return g


def deterministic_min_cut_rank(
    dn: DeterministicNetwork, s: str, t: str | Sequence[str]
) -> int:
    """Min over cuts of the field rank; a list of sinks gives the multicast value."""
    sinks = [t] if isinstance(t, str) else list(t)
    if not sinks:
        raise ValueError("need at least one sink")
    best = None
    for sink in sinks:
        for cut in enumerate_cuts(dn.network, s, sink):
            r = fp_rank(field_cut_matrix(dn, cut), dn.p)
            if best is None or r < best:
                best = r
    return best


@dataclass(frozen=True)
class CutCertificate:
    cut: Cut
    m_omega: int
    rank_h: int
    rank_g: int

    @property
    def ok(self) -> bool:
        return self.rank_g >= self.rank_h


@dataclass(frozen=True)
class LiftCertificate:
    per_cut: tuple[CutCertificate, ...]
    attempts: int
    primes_tried: tuple[int, ...]

    @property
    def valid(self) -> bool:
        return all(row.ok for row in self.per_cut)

    def violations(self) -> list[CutCertificate]:
        return [row for row in self.per_cut if not row.ok]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cut_bitmask", "m_omega", "rank_H", "rank_G", "source", "sink"])
        for row in self.per_cut:
            w.writerow([row.cut.mask, row.m_omega, row.rank_h, row.rank_g, row.cut.source, row.cut.sink])
        return buf.getvalue()


def _flow_cuts(net: Network, flows: Iterable[tuple[str, str]] | None) -> list[Cut]:
    flows = net.declared_flows if flows is None else list(flows)
    return [cut for s, t in flows for cut in enumerate_cuts(net, s, t)]


def _gaussian_ranks(net: Network, cuts: list[Cut], rel_tol: float) -> list[int]:
    if not net.has_all_coefficients:
        raise MissingCoefficientError("lifting needs every edge coefficient; sample coefficients first")
    return [numerical_rank(cut_matrix(net, cut), rel_tol) for cut in cuts]


def certify(
    dn: DeterministicNetwork,
    net: Network | None = None,
    flows: Iterable[tuple[str, str]] | None = None,
    rel_tol: float = DEFAULT_REL_TOL,
) -> LiftCertificate:
    """Per-cut comparison of field rank against complex rank.

    ``net`` supplies the complex coefficients and defaults to ``dn.network``.
    """
    net = dn.network if net is None else net
    cuts = _flow_cuts(net, flows)
    ranks_h = _gaussian_ranks(net, cuts, rel_tol)
    rows = tuple(
        CutCertificate(cut, cut_value(cut), rh, fp_rank(field_cut_matrix(dn, cut), dn.p))
        for cut, rh in zip(cuts, ranks_h)
    )
    return LiftCertificate(rows, attempts=0, primes_tried=(dn.p,))


def lift_network(
    net: Network,
    seed: int,
    max_attempts: int = 20,
    flows: Iterable[tuple[str, str]] | None = None,
    rel_tol: float = DEFAULT_REL_TOL,
    prime: int | None = None,
) -> tuple[DeterministicNetwork, LiftCertificate]:
    """Draw nonzero field coefficients until every cut is certified.

    After ``max_attempts`` failures at one prime the degree bound is doubled
    and the next prime above it is used.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    cuts = _flow_cuts(net, flows)
    ranks_h = _gaussian_ranks(net, cuts, rel_tol)
    n_edges = max(len(net.edges), 1)
    bound = 2 * n_edges * max(len(cuts), 1)
    if prime is not None:
        PrimeField(prime)
        p, bound = prime, prime
    else:
        p = next_prime(bound)
    rng = np.random.default_rng(seed)
    tried: list[int] = []
    attempts = 0
    while p <= MAX_PRIME:
        tried.append(p)
        field = PrimeField(p)
        for _ in range(max_attempts):
            attempts += 1
            xi = field.random(rng, len(net.edges), nonzero=True)
            dn = DeterministicNetwork(net, p, net.q, tuple(xi))
            ranks_g = []
            for cut, rh in zip(cuts, ranks_h):
                rg = fp_rank(field_cut_matrix(dn, cut), p)
                if rg < rh:
                    break
                ranks_g.append(rg)
            else:
                rows = tuple(
                    CutCertificate(cut, cut_value(cut), rh, rg) for cut, rh, rg in zip(cuts, ranks_h, ranks_g)
                )
                return dn, LiftCertificate(rows, attempts, tuple(tried))
        bound *= 2
        p = next_prime(bound)
    raise LiftError(f"no certified lift after {attempts} attempts over primes {tried}")


# --------------------------------------------------------------- file format


def deterministic_network_to_dict(dn: DeterministicNetwork) -> dict[str, Any]:
    doc = network_to_dict(dn.network)
    for item, x in zip(doc["edges"], dn.xi):
        item["xi"] = x
    doc["p"] = dn.p
    doc["q"] = dn.q
    return doc


def serialize_deterministic_network(dn: DeterministicNetwork) -> str:
    return json.dumps(deterministic_network_to_dict(dn), indent=2) + "\n"


def parse_deterministic_network(text: str) -> DeterministicNetwork:
    """Parse a lifted-network document (network grammar plus ``p``, ``q``, ``xi``)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    net = network_from_dict(doc)
    for key in ("p", "q"):
        if not isinstance(doc.get(key), int):
            raise NetworkSyntaxError(f"lifted network: missing integer {key!r}")
    xi = []
    for i, item in enumerate(doc["edges"]):
        if not isinstance(item.get("xi"), int):
            raise NetworkSyntaxError(f"edges[{i}].xi: expected integer")
        xi.append(item["xi"])
    try:
        return DeterministicNetwork(net, doc["p"], doc["q"], tuple(xi))
    except ValueError as exc:
        raise NetworkSyntaxError(f"lifted network: {exc}") from None
