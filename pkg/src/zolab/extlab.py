"""Extension calculus for rooted pairs: the f_alpha classification, strict
extensions, (K, T)-maximality, uncovered-copy counting, and the three cyclic
attachment patterns with their decomposition and maximality notions.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import CapacityError
from .hypercore import (
    DEFAULT_ENUM_CAP,
    DEFAULT_SEARCH_CAP,
    Hypergraph,
    RootedPair,
    automorphisms,
    copy_images,
    max_density,
)


class PairClass(Enum):
    SAFE = "safe"
    RIGID = "rigid"
    NEUTRAL = "neutral"
    OTHER = "other"


def f_alpha(pair: RootedPair, alpha: Fraction) -> Fraction:
    """v(G,H) - alpha * e(G,H), exactly."""
    return Fraction(pair.v_rel) - alpha * pair.e_rel


def _relative_profile(pair: RootedPair, cap: int) -> tuple[np.ndarray, np.ndarray, int, bool]:
    """Edge counts of G induced on V(H) + S over all subsets S of V(G) - V(H).

    Returns (v_rel array, e_rel array, d, inner_is_induced) indexed by the
    subset bitmask over the difference vertices; e_rel is relative to e(H).
    Every W contains all of V(H), so only an edge's difference part decides
    membership and d (not v(G)) bounds the bitmask width.
    """
    g = pair.outer
    h_img = pair.inner_image
    diff = [v for v in g.sorted_vertices() if v not in h_img.vertices]
    d = len(diff)
    if d > cap:
        raise CapacityError(f"2^{d} intermediate sub-hypergraphs exceed the cap 2^{cap}")
    pos = {v: i for i, v in enumerate(diff)}
    x = np.arange(1 << d, dtype=np.uint64)
    e_w = np.zeros(1 << d, dtype=np.int64)
    base_edges = 0
    for e in g.edges:
        dmask = sum(1 << pos[v] for v in e if v in pos)
        if dmask == 0:
            base_edges += 1
        else:
            dm = np.uint64(dmask)
            e_w += (x & dm) == dm
    e_w += base_edges
    v_rel = np.bitwise_count(x).astype(np.int64)
    e_h = h_img.num_edges
    induced = base_edges == e_h
    return v_rel, e_w - e_h, d, induced


def classify_pair(pair: RootedPair, alpha: Fraction,
                  cap: int = DEFAULT_ENUM_CAP) -> PairClass:
    """Exhaustive sign classification of f_alpha over intermediate sub-hypergraphs.

    Safe:    f_alpha(K, H) > 0 for every K with H < K <= G.
    Rigid:   f_alpha(G, K) < 0 for every K with H <= K < G.
    Neutral: f_alpha(K, H) > 0 strictly between, and f_alpha(G, H) = 0.
    Anything else is Other.  Checking induced K per vertex superset suffices:
    it is the extremal edge count for each sign condition.
    """
    an, ad = alpha.numerator, alpha.denominator
    if max(an, ad) >= 1 << 40:
        raise ValueError("alpha too large for vectorised classification")
    v_rel, e_rel, d, induced = _relative_profile(pair, cap)
    full = (1 << d) - 1
    vg_rel = pair.outer.num_vertices - pair.inner.num_vertices
    eg_rel = pair.outer.num_edges - pair.inner.num_edges

    f_kh = v_rel * ad - an * e_rel
    f_gk = (vg_rel - v_rel) * ad - an * (eg_rel - e_rel)

    if induced and bool(np.all(f_kh[1:] > 0)):
        return PairClass.SAFE
    if bool(np.all(f_gk[:full] < 0)):
        return PairClass.RIGID
    if induced and int(f_kh[full]) == 0 and bool(np.all(f_kh[1:full] > 0)):
        return PairClass.NEUTRAL
    return PairClass.OTHER


def is_pair_strictly_balanced(pair: RootedPair, cap: int = DEFAULT_ENUM_CAP) -> bool:
    """rho(G,H) > rho(K,H) for every K strictly between H and G."""
    if pair.v_rel == 0:
        return False
    v_rel, e_rel, d, induced = _relative_profile(pair, cap)
    if not induced:
        return False
    full = (1 << d) - 1
    vg_rel, eg_rel = pair.v_rel, pair.e_rel
    mid = slice(1, full)
    return bool(np.all(e_rel[mid] * vg_rel < eg_rel * v_rel[mid]))


# ---------------------------------------------------------------------------
# strict extensions
# ---------------------------------------------------------------------------

def _correspondence_checks(candidate: RootedPair, template: RootedPair,
                           correspondence: Mapping[int, int]) -> dict[int, int]:
    corr = dict(correspondence)
    if set(corr) != template.outer.vertices:
        raise ValueError("correspondence must cover the template outer vertex set")
    if len(set(corr.values())) != len(corr):
        raise ValueError("correspondence is not injective")
    if set(corr.values()) != candidate.outer.vertices:
        raise ValueError("correspondence must cover the candidate outer vertex set")
    t_inner = template.inner_image.vertices
    c_inner = candidate.inner_image.vertices
    if {corr[v] for v in t_inner} != c_inner:
        raise ValueError("correspondence must map inner vertices onto inner vertices")
    return corr


def is_extension(candidate: RootedPair, template: RootedPair,
                 correspondence: Mapping[int, int]) -> bool:
    """One-directional variant: template-new edges map into candidate-new edges."""
    corr = _correspondence_checks(candidate, template, correspondence)
    t_new = template.outer.edges - template.inner_image.edges
    c_new = candidate.outer.edges - candidate.inner_image.edges
    return all(frozenset(corr[v] for v in e) in c_new for e in t_new)


def is_strict_extension(candidate: RootedPair, template: RootedPair,
                        correspondence: Mapping[int, int]) -> bool:
    """Both directions: new edges correspond exactly under the vertex map."""
    corr = _correspondence_checks(candidate, template, correspondence)
    t_new = template.outer.edges - template.inner_image.edges
    c_new = candidate.outer.edges - candidate.inner_image.edges
    return {frozenset(corr[v] for v in e) for e in t_new} == c_new


def _iter_strict_extensions(template: RootedPair, host: Hypergraph,
                            anchor: tuple[int, ...],
                            anchor_edges: frozenset[frozenset[int]]) -> Iterator[dict[int, int]]:
    """Maps realizing a strict extension of the anchor tuple inside host.

    The sorted inner vertices of the template correspond positionally to the
    anchor.  The realized extension carries exactly the images of the
    template's new edges on top of `anchor_edges`.
    """
    inner_sorted = sorted(template.inner.vertices)
    if len(anchor) != len(inner_sorted):
        raise ValueError("anchor length must equal the template inner size")
    if len(set(anchor)) != len(anchor) or not set(anchor) <= host.vertices:
        raise ValueError("anchor must be distinct host vertices")
    emb = template.embedding_map
    mapping = {emb[v]: anchor[i] for i, v in enumerate(inner_sorted)}
    inner_outer_labels = set(mapping)
    new_vts = sorted(template.outer.vertices - inner_outer_labels)
    new_edges = sorted(
        tuple(sorted(e)) for e in template.outer.edges - template.inner_image.edges)
    anchor_set = frozenset(anchor)

    ready: list[list[tuple[int, ...]]] = [[] for _ in new_vts]
    immediate: list[tuple[int, ...]] = []
    pos = {v: i for i, v in enumerate(new_vts)}
    for e in new_edges:
        outside = [v for v in e if v in pos]
        if outside:
            ready[max(pos[v] for v in outside)].append(e)
        else:
            immediate.append(e)

    def ok_edge(e: tuple[int, ...]) -> bool:
        img = frozenset(mapping[v] for v in e)
        if img not in host.edges:
            return False
        return not (img <= anchor_set and img in anchor_edges)

    if not all(ok_edge(e) for e in immediate):
        return

    used = set(anchor)

    def place(i: int) -> Iterator[dict[int, int]]:
        if i == len(new_vts):
            yield dict(mapping)
            return
        mv = new_vts[i]
        for hv in host.sorted_vertices():
            if hv in used:
                continue
            mapping[mv] = hv
            used.add(hv)
            if all(ok_edge(e) for e in ready[i]):
                yield from place(i + 1)
            del mapping[mv]
            used.discard(hv)

    yield from place(0)


# ---------------------------------------------------------------------------
# (K, T)-maximality and the maximal-extension counter
# ---------------------------------------------------------------------------

def is_kt_maximal(pair: RootedPair, kt: RootedPair, host: Hypergraph,
                  cap: int = DEFAULT_SEARCH_CAP) -> bool:
    """No strict (K, T)-extension attaches to the pair inside the host.

    Quantifies over sub-hypergraphs T' of the outer graph with v(T) vertices
    that are not contained in the inner graph; an attachment counts only when
    the host carries no edges joining the extension body to the rest of the
    outer graph except through T' (the empty-edge-set side condition, read on
    the host-induced union).
    """
    g_t, h_t = pair.outer, pair.inner_image
    if not g_t.is_subhypergraph_of(host):
        raise ValueError("pair outer must be a sub-hypergraph of the host")
    v_t = kt.inner.num_vertices
    if v_t > g_t.num_vertices:
        return True
    if kt.outer.num_vertices - v_t > cap:
        raise CapacityError("extension template exceeds the search cap")

    g_verts = g_t.sorted_vertices()
    for t_tuple in itertools.permutations(g_verts, v_t):
        t_set = frozenset(t_tuple)
        inside = [e for e in g_t.edges if e <= t_set]
        for r in range(len(inside) + 1):
            for chosen in itertools.combinations(inside, r):
                t_edges = frozenset(chosen)
                if t_set <= h_t.vertices and t_edges <= h_t.edges:
                    continue  # T' inside the inner graph does not count
                if t_set == g_t.vertices and t_edges == g_t.edges:
                    continue  # T' must be a proper sub-hypergraph
                removed = g_t.vertices - t_set
                punct = Hypergraph(
                    host.s, host.vertices - removed,
                    frozenset(e for e in host.edges if not e & removed))
                for phi in _iter_strict_extensions(kt, punct, t_tuple, t_edges):
                    k_verts = frozenset(phi.values())
                    w = (k_verts | g_t.vertices) - t_set
                    k_out = {frozenset(phi[v] for v in e)
                             for e in kt.outer.edges - kt.inner_image.edges}
                    k_out = {e for e in k_out if not e & t_set}
                    g_out = {e for e in g_t.edges if not e & t_set}
                    if all(f in k_out or f in g_out
                           for f in host.edges if f <= w):
                        return False
    return True


def count_maximal_extensions(template: RootedPair, host: Hypergraph,
                             anchor: tuple[int, ...],
                             kt_pairs: Iterable[RootedPair] = (),
                             cap: int = DEFAULT_SEARCH_CAP) -> int:
    """Strict extensions of the anchor tuple that are (K, T)-maximal for every
    given pair.  The anchor's carried edges are those induced by the host.
    """
    if template.outer.num_vertices - template.inner.num_vertices > cap:
        raise CapacityError("extension template exceeds the search cap")
    h_tilde = host.induced(anchor)
    realized: set[tuple[frozenset[int], frozenset[frozenset[int]]]] = set()
    new_edges = template.outer.edges - template.inner_image.edges
    for phi in _iter_strict_extensions(template, host, anchor, h_tilde.edges):
        verts = frozenset(phi.values())
        edges = frozenset(frozenset(phi[v] for v in e) for e in new_edges) | h_tilde.edges
        realized.add((verts, edges))
    kt_list = list(kt_pairs)
    count = 0
    for verts, edges in sorted(realized, key=lambda t: (sorted(t[0]), sorted(map(sorted, t[1])))):
        g_tilde = Hypergraph(host.s, verts, edges)
        pair = RootedPair.identity(g_tilde, h_tilde)
        if all(is_kt_maximal(pair, kt, host, cap=cap) for kt in kt_list):
            count += 1
    return count


# ---------------------------------------------------------------------------
# uncovered copies and the limiting-parameter ingredients
# ---------------------------------------------------------------------------

def count_uncovered_copies(h: Hypergraph, g: Hypergraph, host: Hypergraph,
                           cap: int = DEFAULT_SEARCH_CAP) -> int:
    """Copies of h in host that are not sub-hypergraphs of any copy of g."""
    h_copies = copy_images(h, host, cap=cap)
    if not h_copies:
        return 0
    g_copies = copy_images(g, host, cap=cap)
    count = 0
    for hv, he in h_copies:
        if not any(hv <= gv and he <= ge for gv, ge in g_copies):
            count += 1
    return count


@dataclass(frozen=True)
class Prop1Parameter:
    """Ingredients of the limiting Poisson rate for uncovered copies."""

    a: int    # automorphisms of the inner graph
    a1: int   # inner automorphisms extendable to the outer graph
    a2: int   # outer automorphisms fixing the inner vertices pointwise

    @property
    def rate_inverse(self) -> Fraction:
        return Fraction(1, self.a)

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.a, self.a1 * self.a2)

    def rate(self) -> float:
        import math
        return float(self.rate_inverse) * math.exp(-float(self.exponent))


def prop1_poisson_parameter(pair: RootedPair,
                            cap: int = DEFAULT_ENUM_CAP) -> Prop1Parameter:
    """Brute-forced (a(H), a_1, a_2) for the pair; the caller forms the rate
    (1/a) * exp(-a / (a1 * a2)).
    """
    h_img = pair.inner_image
    g = pair.outer
    aut_h = automorphisms(h_img, cap=cap)
    aut_g = automorphisms(g, cap=cap)
    order = sorted(h_img.vertices)
    restrictions = {
        tuple(sig[v] for v in order)
        for sig in aut_g
        if all(sig[v] in h_img.vertices for v in order)
    }
    a1 = sum(1 for tau in aut_h if tuple(tau[v] for v in order) in restrictions)
    a2 = sum(1 for sig in aut_g if all(sig[v] == v for v in order))
    return Prop1Parameter(a=len(aut_h), a1=a1, a2=a2)


# ---------------------------------------------------------------------------
# cyclic attachment patterns
# ---------------------------------------------------------------------------

FIRST_TYPE = "first_type"
SECOND_TYPE_PATH = "second_type_path"
SECOND_TYPE_EDGE = "second_type_edge"


@dataclass(frozen=True)
class CyclicPattern:
    """A matched attachment template with its witness assignment."""

    kind: str
    k: int                                  # path length; 0 for the single-edge type
    l: int                                  # fresh closing vertices
    contacts: tuple[int, ...]               # base vertices the attachment touches
    edges: tuple[frozenset[int], ...]       # path edges in order, closing edge last
    new_vertices: frozenset[int]


def density_bound(s: int, m: int) -> Fraction:
    return Fraction(m, m * (s - 1) - 1)


def _iter_attachments(base_verts: frozenset[int], base_edges: frozenset[frozenset[int]],
                      host: Hypergraph, m: int) -> Iterator[CyclicPattern]:
    """All template-shaped attachments to the base inside the host.

    Enumerated deterministically; the density side condition is NOT applied
    here (it depends on which outer graph the caller forms).
    """
    s = host.s
    avail = [e for e in host.edges if e not in base_edges]
    avail.sort(key=lambda e: tuple(sorted(e)))

    # second type, single edge: l >= 2 base contacts, at least one new vertex
    for e in avail:
        xs = e & base_verts
        ys = e - base_verts
        if 2 <= len(xs) <= s - 1 and ys:
            yield CyclicPattern(SECOND_TYPE_EDGE, 0, len(xs),
                                tuple(sorted(xs)), (e,), frozenset(ys))

    if m < 2:
        return

    def closings(x1: int, path: list[frozenset[int]], path_verts: set[int],
                 last_fresh: set[int]) -> Iterator[CyclicPattern]:
        k = len(path)
        for ec in avail:
            if ec in path:
                continue
            ends = ec & last_fresh
            if not ends:
                continue
            base_touch = ec & base_verts
            zs = ec - base_verts - path_verts
            l = len(zs)
            # first type: closes back onto the path or x1
            if base_touch <= {x1} and l <= s - 2:
                yield CyclicPattern(
                    FIRST_TYPE, k, l, (x1,), tuple(path) + (ec,),
                    frozenset(path_verts) | zs)
            # second type: closes onto a second base vertex
            if len(base_touch) == 1 and x1 not in ec and l <= s - 2:
                x2 = next(iter(base_touch))
                yield CyclicPattern(
                    SECOND_TYPE_PATH, k, l, (x1, x2), tuple(path) + (ec,),
                    frozenset(path_verts) | zs)

    def extend(x1: int, path: list[frozenset[int]], path_verts: set[int],
               last_fresh: set[int]) -> Iterator[CyclicPattern]:
        yield from closings(x1, path, path_verts, last_fresh)
        if len(path) >= m - 1:
            return
        for e in avail:
            if e in path or e & base_verts:
                continue
            joint = e & path_verts
            if len(joint) != 1:
                continue
            w = next(iter(joint))
            if w not in last_fresh:
                continue
            fresh = e - {w}
            yield from extend(x1, path + [e], path_verts | fresh, set(fresh))

    for x1 in sorted(base_verts):
        for e1 in avail:
            if x1 not in e1:
                continue
            if e1 & base_verts != {x1}:
                continue
            fresh = e1 - {x1}
            yield from extend(x1, [e1], set(fresh), set(fresh))


_PATTERN_ORDER = {FIRST_TYPE: 0, SECOND_TYPE_PATH: 1, SECOND_TYPE_EDGE: 2}


def match_cyclic_extension(pair: RootedPair, m: int,
                           cap: int = DEFAULT_ENUM_CAP) -> CyclicPattern | None:
    """Match the pair's new edges against the three attachment templates.

    Requires max density of the outer graph below m / (m(s-1) - 1), the new
    edge set to realize one template exactly, and the new vertex set to be
    covered by it.  First type wins over second type path wins over second
    type edge; within a type the first witness in canonical edge order wins.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    g = pair.outer
    h_img = pair.inner_image
    new_edges = g.edges - h_img.edges
    if not new_edges:
        return None
    if any(e <= h_img.vertices for e in new_edges):
        return None  # every template edge leaves the base
    rho_max, _ = max_density(g, cap=cap)
    if rho_max >= density_bound(g.s, m):
        return None
    new_verts = g.vertices - h_img.vertices
    sub_host = Hypergraph(g.s, g.vertices, new_edges)
    best: CyclicPattern | None = None
    for pat in _iter_attachments(h_img.vertices, frozenset(), sub_host, m):
        if frozenset(pat.edges) != new_edges or pat.new_vertices != new_verts:
            continue
        if best is None or _PATTERN_ORDER[pat.kind] < _PATTERN_ORDER[best.kind]:
            best = pat
            if _PATTERN_ORDER[best.kind] == 0:
                break
    return best


def find_m_decomposition(g: Hypergraph, m: int, root: int,
                         cap: int = DEFAULT_ENUM_CAP) -> list[Hypergraph] | None:
    """A chain of cyclic m-extensions growing from the root vertex.

    Returns [G_0, ..., G_t] with G_0 the bare root, each step a cyclic
    m-extension, and V(G_t) = V(g); edges of g missing from G_t are reachable
    by edge completion and are the caller's density concern.  None when no
    chain covers the vertex set.
    """
    if root not in g.vertices:
        raise ValueError("root must be a vertex of g")
    if m < 1:
        raise ValueError("m must be >= 1")
    if g.num_vertices > cap:
        raise CapacityError(f"{g.num_vertices} vertices exceeds the cap {cap}")
    start = Hypergraph(g.s, frozenset([root]), frozenset())
    if g.num_vertices == 1:
        return [start]
    bound = density_bound(g.s, m)
    seen: set[tuple[frozenset[int], frozenset[frozenset[int]]]] = set()
    queue: deque[list[Hypergraph]] = deque([[start]])
    seen.add((start.vertices, start.edges))
    while queue:
        chain = queue.popleft()
        cur = chain[-1]
        for pat in _iter_attachments(cur.vertices, cur.edges, g, m):
            nxt = Hypergraph(g.s, cur.vertices | pat.new_vertices,
                             cur.edges | frozenset(pat.edges))
            key = (nxt.vertices, nxt.edges)
            if key in seen:
                continue
            seen.add(key)
            if max_density(nxt, cap=cap)[0] >= bound:
                continue
            new_chain = chain + [nxt]
            if nxt.vertices == g.vertices:
                return new_chain
            queue.append(new_chain)
    return None


def is_cyclically_m_maximal(pair: RootedPair, host: Hypergraph, m: int,
                            cap: int = DEFAULT_ENUM_CAP) -> bool:
    """No cyclic m-extension attaches to the outer graph in the host unless the
    same attachment is also a cyclic m-extension of the inner graph.
    """
    g = pair.outer
    h_img = pair.inner_image
    if not g.is_subhypergraph_of(host):
        raise ValueError("pair outer must be a sub-hypergraph of the host")
    bound = density_bound(host.s, m)
    seen: set[frozenset[frozenset[int]]] = set()
    for pat in _iter_attachments(g.vertices, g.edges, host, m):
        key = frozenset(pat.edges)
        if key in seen:
            continue
        seen.add(key)
        extended = Hypergraph(host.s, g.vertices | pat.new_vertices,
                              g.edges | frozenset(pat.edges))
        if max_density(extended, cap=cap)[0] >= bound:
            continue  # not a cyclic m-extension of the outer graph
        h_ext = Hypergraph(
            host.s,
            h_img.vertices | frozenset(v for e in pat.edges for v in e),
            h_img.edges | frozenset(pat.edges))
        h_pair = RootedPair.identity(h_ext, h_img)
        if match_cyclic_extension(h_pair, m, cap=cap) is None:
            return False
    return True
