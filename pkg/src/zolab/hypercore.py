"""s-uniform hypergraphs: densities, balance, isomorphism, copy counting, distances.

Vertices are arbitrary integer labels; nothing assumes contiguity.  All values
are immutable after construction and safe to share across threads.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import CapacityError

DEFAULT_ENUM_CAP = 24    # vertex cap for 2^v subset walks
DEFAULT_SEARCH_CAP = 16  # vertex cap for isomorphism-type backtracking

_CHUNK = 1 << 20


@dataclass(frozen=True)
class Hypergraph:
    """Finite s-uniform hypergraph: every edge is an s-element vertex subset."""

    s: int
    vertices: frozenset[int]
    edges: frozenset[frozenset[int]]

    def __post_init__(self) -> None:
        if self.s < 3:
            raise ValueError(f"arity must be >= 3, got {self.s}")
        for e in self.edges:
            if len(e) != self.s:
                raise ValueError(f"edge {sorted(e)} has {len(e)} vertices, expected {self.s}")
            if not e <= self.vertices:
                raise ValueError(f"edge {sorted(e)} uses vertices outside the vertex set")

    @classmethod
    def make(cls, s: int, vertices: Iterable[int], edges: Iterable[Iterable[int]]) -> "Hypergraph":
        return cls(s, frozenset(vertices), frozenset(frozenset(e) for e in edges))

    @classmethod
    def from_edges(cls, s: int, edges: Iterable[Iterable[int]],
                   extra_vertices: Iterable[int] = ()) -> "Hypergraph":
        es = frozenset(frozenset(e) for e in edges)
        verts = frozenset(itertools.chain(extra_vertices, *es))
        return cls(s, verts, es)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def sorted_vertices(self) -> list[int]:
        return sorted(self.vertices)

    def sorted_edges(self) -> list[tuple[int, ...]]:
        return sorted(tuple(sorted(e)) for e in self.edges)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def incident_edges(self, v: int) -> list[frozenset[int]]:
        return [e for e in self.edges if v in e]

    def co_edge_neighbors(self, v: int) -> set[int]:
        out: set[int] = set()
        for e in self.edges:
            if v in e:
                out |= e
        out.discard(v)
        return out

    def induced(self, subset: Iterable[int]) -> "Hypergraph":
        sub = frozenset(subset)
        if not sub <= self.vertices:
            raise ValueError("induced subset contains unknown vertices")
        return Hypergraph(self.s, sub, frozenset(e for e in self.edges if e <= sub))

    def union(self, other: "Hypergraph") -> "Hypergraph":
        if self.s != other.s:
            raise ValueError("arity mismatch in union")
        return Hypergraph(self.s, self.vertices | other.vertices, self.edges | other.edges)

    def relabel(self, mapping: Mapping[int, int]) -> "Hypergraph":
        if len(set(mapping.values())) != len(mapping):
            raise ValueError("relabel mapping is not injective")
        verts = frozenset(mapping[v] for v in self.vertices)
        edges = frozenset(frozenset(mapping[v] for v in e) for e in self.edges)
        return Hypergraph(self.s, verts, edges)

    def is_subhypergraph_of(self, other: "Hypergraph") -> bool:
        return (self.s == other.s and self.vertices <= other.vertices
                and self.edges <= other.edges)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Hypergraph(s={self.s}, v={self.num_vertices}, e={self.num_edges})"


@dataclass(frozen=True)
class RootedPair:
    """A pair (G, H) with H embedded into G by an injective, edge-onto-edge map."""

    outer: Hypergraph
    inner: Hypergraph
    embedding: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.outer.s != self.inner.s:
            raise ValueError("arity mismatch between outer and inner")
        emb = dict(self.embedding)
        if set(emb) != self.inner.vertices:
            raise ValueError("embedding domain must be the inner vertex set")
        if len(set(emb.values())) != len(emb):
            raise ValueError("embedding is not injective")
        if not set(emb.values()) <= self.outer.vertices:
            raise ValueError("embedding image leaves the outer vertex set")
        for e in self.inner.edges:
            if frozenset(emb[v] for v in e) not in self.outer.edges:
                raise ValueError(f"inner edge {sorted(e)} does not map onto an outer edge")
        if self.outer.num_vertices < self.inner.num_vertices:
            raise ValueError("outer has fewer vertices than inner")

    @classmethod
    def identity(cls, outer: Hypergraph, inner: Hypergraph) -> "RootedPair":
        return cls(outer, inner, tuple((v, v) for v in inner.sorted_vertices()))

    @property
    def embedding_map(self) -> dict[int, int]:
        return dict(self.embedding)

    @property
    def inner_image(self) -> Hypergraph:
        emb = self.embedding_map
        return Hypergraph(
            self.outer.s,
            frozenset(emb[v] for v in self.inner.vertices),
            frozenset(frozenset(emb[v] for v in e) for e in self.inner.edges),
        )

    @property
    def v_rel(self) -> int:
        return self.outer.num_vertices - self.inner.num_vertices

    @property
    def e_rel(self) -> int:
        return self.outer.num_edges - self.inner.num_edges

    def rel_density(self) -> Fraction:
        if self.v_rel == 0:
            raise ValueError("pair density undefined: v(G,H) = 0")
        return Fraction(self.e_rel, self.v_rel)


# ---------------------------------------------------------------------------
# densities over induced sub-hypergraphs
# ---------------------------------------------------------------------------

def density(g: Hypergraph) -> Fraction:
    """Edges over vertices, exactly."""
    if g.num_vertices == 0:
        raise ValueError("density undefined on an empty vertex set")
    return Fraction(g.num_edges, g.num_vertices)


def _edge_bits(g: Hypergraph, order: list[int]) -> list[int]:
    idx = {v: i for i, v in enumerate(order)}
    return sorted(sum(1 << idx[v] for v in e) for e in g.edges)


def _mask_chunks(nbits: int, *, skip_zero: bool = True, skip_full: bool = False) -> Iterator[np.ndarray]:
    stop = (1 << nbits) - (1 if skip_full else 0)
    start = 1 if skip_zero else 0
    for lo in range(start, stop, _CHUNK):
        hi = min(lo + _CHUNK, stop)
        yield np.arange(lo, hi, dtype=np.uint64)


def _edge_counts(masks: np.ndarray, edge_bits: list[int]) -> np.ndarray:
    counts = np.zeros(len(masks), dtype=np.int64)
    for eb in edge_bits:
        ebv = np.uint64(eb)
        counts += (masks & ebv) == ebv
    return counts


def _popcounts(masks: np.ndarray) -> np.ndarray:
    return np.bitwise_count(masks).astype(np.int64)


def max_density(g: Hypergraph, cap: int = DEFAULT_ENUM_CAP) -> tuple[Fraction, Hypergraph]:
    """Maximum density over non-empty sub-hypergraphs, with one maximizing witness.

    The maximum is attained on induced sub-hypergraphs, so a walk over vertex
    subsets suffices.  The witness is the first maximizer in ascending order of
    the subset bitmask over ascending vertex labels (deterministic).
    """
    order = g.sorted_vertices()
    v = len(order)
    if v == 0:
        raise ValueError("max_density undefined on an empty vertex set")
    if v > cap:
        raise CapacityError(f"{v} vertices exceeds the enumeration cap {cap}")
    if not g.edges:
        return Fraction(0), g.induced({order[0]})
    ebits = _edge_bits(g, order)
    best_e, best_v, best_mask = 0, 1, 1  # the single smallest vertex
    for masks in _mask_chunks(v):
        counts = _edge_counts(masks, ebits)
        if counts.max(initial=0) == 0 and best_e > 0:
            continue
        pops = _popcounts(masks)
        while True:
            better = counts * best_v > pops * best_e
            hits = np.flatnonzero(better)
            if hits.size == 0:
                break
            i = int(hits[0])
            best_e, best_v, best_mask = int(counts[i]), int(pops[i]), int(masks[i])
            keep = slice(i + 1, None)
            masks, counts, pops = masks[keep], counts[keep], pops[keep]
            if masks.size == 0:
                break
    witness = g.induced(order[i] for i in range(v) if best_mask >> i & 1)
    return Fraction(best_e, best_v), witness


def is_strictly_balanced(g: Hypergraph, cap: int = DEFAULT_ENUM_CAP) -> bool:
    """True iff the density strictly exceeds that of every proper sub-hypergraph."""
    order = g.sorted_vertices()
    v = len(order)
    if v == 0:
        raise ValueError("balance undefined on an empty vertex set")
    if v > cap:
        raise CapacityError(f"{v} vertices exceeds the enumeration cap {cap}")
    if v == 1:
        return True
    e_g = g.num_edges
    ebits = _edge_bits(g, order)
    for masks in _mask_chunks(v, skip_full=True):
        counts = _edge_counts(masks, ebits)
        pops = _popcounts(masks)
        if np.any(counts * v >= e_g * pops):
            return False
    return True


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

def distance(g: Hypergraph, x: int, y: int) -> int | float:
    """Minimum number of edges in a chain of pairwise-intersecting edges from x to y.

    0 iff x = y, 1 iff distinct co-edge vertices, infinity when disconnected.
    """
    if x not in g.vertices or y not in g.vertices:
        raise ValueError("distance: unknown vertex")
    if x == y:
        return 0
    seen = {x}
    frontier = {x}
    d = 0
    while frontier:
        d += 1
        nxt: set[int] = set()
        for e in g.edges:
            if e & frontier:
                nxt |= e
        nxt -= seen
        if y in nxt:
            return d
        seen |= nxt
        frontier = nxt
    return math.inf


# ---------------------------------------------------------------------------
# isomorphism search: automorphisms, copies, embeddings
# ---------------------------------------------------------------------------

def _invariants(g: Hypergraph, rounds: int = 2) -> dict[int, int]:
    """Iterated degree refinement; equal labels are a necessary match condition."""
    label = {v: g.degree(v) for v in g.vertices}
    for _ in range(rounds):
        sig = {}
        for v in g.vertices:
            profile = sorted(
                tuple(sorted(label[u] for u in e if u != v)) for e in g.edges if v in e
            )
            sig[v] = (label[v], tuple(profile))
        canon = {t: i for i, t in enumerate(sorted(set(sig.values())))}
        label = {v: canon[sig[v]] for v in g.vertices}
    return label


def _motif_order(motif: Hypergraph) -> list[int]:
    """Static placement order: highest degree first, then greedy by placed co-edge ties."""
    remaining = set(motif.vertices)
    order: list[int] = []
    adj = {v: motif.co_edge_neighbors(v) for v in motif.vertices}
    while remaining:
        if order:
            placed = set(order)
            best = max(remaining,
                       key=lambda v: (len(adj[v] & placed), motif.degree(v), -v))
        else:
            best = max(remaining, key=lambda v: (motif.degree(v), -v))
        order.append(best)
        remaining.discard(best)
    return order


def _iter_embeddings(motif: Hypergraph, host: Hypergraph, *, exact: bool,
                     fixed: Mapping[int, int] | None = None) -> Iterator[dict[int, int]]:
    """Injective maps sending every motif edge to a host edge.

    exact=True additionally requires a bijection with e(motif) = e(host), which
    together with forward edge preservation forces an isomorphism.
    """
    if motif.s != host.s:
        raise ValueError("arity mismatch between motif and host")
    if exact and (motif.num_vertices != host.num_vertices
                  or motif.num_edges != host.num_edges):
        return
    if motif.num_vertices > host.num_vertices or motif.num_edges > host.num_edges:
        return

    order = _motif_order(motif)
    fixed = dict(fixed or {})
    host_adj = {v: host.co_edge_neighbors(v) for v in host.vertices}
    motif_adj = {v: motif.co_edge_neighbors(v) for v in motif.vertices}
    host_deg = {v: host.degree(v) for v in host.vertices}
    if exact:
        inv_m = _invariants(motif)
        inv_h = _invariants(host)

    # edges fully determined once the i-th vertex of `order` is placed
    pos = {v: i for i, v in enumerate(order)}
    edge_ready: list[list[frozenset[int]]] = [[] for _ in order]
    for e in motif.edges:
        edge_ready[max(pos[v] for v in e)].append(e)

    host_edges = host.edges
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def place(i: int) -> Iterator[dict[int, int]]:
        if i == len(order):
            yield dict(mapping)
            return
        mv = order[i]
        if mv in fixed:
            cands: Iterable[int] = [fixed[mv]]
        else:
            placed_nbrs = [mapping[u] for u in motif_adj[mv] if u in mapping]
            if placed_nbrs:
                cs = set(host_adj[placed_nbrs[0]])
                for w in placed_nbrs[1:]:
                    cs &= host_adj[w]
                cands = sorted(cs)
            else:
                cands = host.sorted_vertices()
        mdeg = motif.degree(mv)
        for hv in cands:
            if hv in used:
                continue
            if exact:
                if inv_h.get(hv) != inv_m[mv]:
                    continue
            elif host_deg[hv] < mdeg:
                continue
            mapping[mv] = hv
            used.add(hv)
            ok = all(frozenset(mapping[u] for u in e) in host_edges
                     for e in edge_ready[i])
            if ok:
                yield from place(i + 1)
            del mapping[mv]
            used.discard(hv)

    yield from place(0)


def _check_search_cap(g: Hypergraph, cap: int) -> None:
    if g.num_vertices > cap:
        raise CapacityError(f"{g.num_vertices} vertices exceeds the search cap {cap}")


def automorphisms(g: Hypergraph, cap: int = DEFAULT_SEARCH_CAP) -> list[dict[int, int]]:
    """All edge-preserving vertex bijections of g onto itself."""
    _check_search_cap(g, cap)
    return list(_iter_embeddings(g, g, exact=True))


def automorphism_count(g: Hypergraph, cap: int = DEFAULT_SEARCH_CAP) -> int:
    """Exact size of the automorphism group."""
    _check_search_cap(g, cap)
    return sum(1 for _ in _iter_embeddings(g, g, exact=True))


def are_isomorphic(g: Hypergraph, h: Hypergraph, cap: int = DEFAULT_SEARCH_CAP) -> bool:
    _check_search_cap(g, cap)
    return next(_iter_embeddings(g, h, exact=True), None) is not None


def find_isomorphism(g: Hypergraph, h: Hypergraph,
                     cap: int = DEFAULT_SEARCH_CAP) -> dict[int, int] | None:
    _check_search_cap(g, cap)
    return next(_iter_embeddings(g, h, exact=True), None)


def count_embeddings(motif: Hypergraph, host: Hypergraph,
                     cap: int = DEFAULT_SEARCH_CAP) -> int:
    """Injective maps of motif into host sending every motif edge to a host edge."""
    _check_search_cap(motif, cap)
    return sum(1 for _ in _iter_embeddings(motif, host, exact=False))


def count_copies(motif: Hypergraph, host: Hypergraph, cap: int = DEFAULT_SEARCH_CAP,
                 induced: bool = False) -> int:
    """Sub-hypergraphs of host isomorphic to motif.

    Copies are non-induced by default: every motif edge must land on a host
    edge, extra host edges among the image vertices are allowed.  With
    induced=True the image must carry exactly the motif's edges.
    """
    _check_search_cap(motif, cap)
    if induced:
        return len(copy_images(motif, host, cap=cap, induced=True))
    aut = automorphism_count(motif, cap=cap)
    total = sum(1 for _ in _iter_embeddings(motif, host, exact=False))
    assert total % aut == 0
    return total // aut


def copy_images(motif: Hypergraph, host: Hypergraph, cap: int = DEFAULT_SEARCH_CAP,
                induced: bool = False) -> set[tuple[frozenset[int], frozenset[frozenset[int]]]]:
    """Distinct copy images as (vertex set, edge set) pairs."""
    _check_search_cap(motif, cap)
    out: set[tuple[frozenset[int], frozenset[frozenset[int]]]] = set()
    for m in _iter_embeddings(motif, host, exact=False):
        vs = frozenset(m.values())
        es = frozenset(frozenset(m[u] for u in e) for e in motif.edges)
        if induced and any(e <= vs and e not in es for e in host.edges):
            continue
        out.add((vs, es))
    return out


def has_copy(motif: Hypergraph, host: Hypergraph, cap: int = DEFAULT_SEARCH_CAP) -> bool:
    """Early-exit containment test (non-induced copies)."""
    _check_search_cap(motif, cap)
    return next(_iter_embeddings(motif, host, exact=False), None) is not None


# ---------------------------------------------------------------------------
# .shg text format
# ---------------------------------------------------------------------------

def parse_shg(text: str) -> Hypergraph:
    """Parse the .shg format: header `s <arity> n <count>`, one edge per line.

    The vertex set is {1, ..., n}; `#` starts a comment.
    """
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 4 or parts[0] != "s" or parts[2] != "n":
                raise ValueError(f"line {lineno}: expected header 's <arity> n <count>'")
            try:
                header = (int(parts[1]), int(parts[3]))
            except ValueError:
                raise ValueError(f"line {lineno}: non-integer header fields") from None
            continue
        s, n = header
        if len(parts) != s:
            raise ValueError(f"line {lineno}: expected {s} vertex labels, got {len(parts)}")
        try:
            labels = [int(t) for t in parts]
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer vertex label") from None
        if len(set(labels)) != s:
            raise ValueError(f"line {lineno}: repeated vertex in edge")
        if any(not 1 <= v <= n for v in labels):
            raise ValueError(f"line {lineno}: vertex label outside 1..{n}")
        edges.append(frozenset(labels))
    if header is None:
        raise ValueError("missing .shg header")
    s, n = header
    return Hypergraph(s, frozenset(range(1, n + 1)), frozenset(edges))


def to_shg(g: Hypergraph) -> str:
    """Serialize to .shg; requires canonical vertex labels {1..n}."""
    n = g.num_vertices
    if g.vertices != frozenset(range(1, n + 1)):
        raise ValueError("serialization requires vertex labels 1..n; relabel first")
    lines = [f"s {g.s} n {n}"]
    lines.extend(" ".join(str(v) for v in e) for e in g.sorted_edges())
    return "\n".join(lines) + "\n"


def canonical_relabel(g: Hypergraph) -> tuple[Hypergraph, dict[int, int]]:
    """Relabel vertices to 1..n in ascending label order."""
    mapping = {v: i for i, v in enumerate(g.sorted_vertices(), start=1)}
    return g.relabel(mapping), mapping


def read_shg(path: str) -> Hypergraph:
    with open(path, "r", encoding="ascii") as fh:
        return parse_shg(fh.read())


def write_shg(path: str, g: Hypergraph) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(to_shg(g))
