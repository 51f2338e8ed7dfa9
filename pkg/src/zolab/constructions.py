"""Deterministic builders for the witness hypergraphs used by the spectrum
arguments, with built-in verification of the density identities they must
satisfy.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapacityError, VerificationError
from .extlab import is_pair_strictly_balanced
from .hypercore import (
    DEFAULT_ENUM_CAP,
    Hypergraph,
    RootedPair,
    density,
    is_strictly_balanced,
    max_density,
)


class _Labels:
    def __init__(self, start: int = 1):
        self.counter = itertools.count(start)

    def take(self, k: int = 1) -> list[int]:
        return [next(self.counter) for _ in range(k)]


def _path_between(s: int, length: int, u: int, w: int, labels: _Labels
                  ) -> tuple[list[frozenset[int]], list[int]]:
    """Edges of a loose path from u to w plus its chain vertices (u..w)."""
    if length < 1:
        raise ValueError("path length must be >= 1")
    chain = [u] + labels.take(length - 1) + [w]
    edges = []
    for j in range(length):
        pendants = labels.take(s - 2)
        edges.append(frozenset([chain[j], *pendants, chain[j + 1]]))
    return edges, chain


def loose_path(s: int, length: int, endpoints: tuple[int, int] = (1, 2)) -> Hypergraph:
    """t edges, consecutive ones sharing exactly one vertex; v = t(s-1) + 1."""
    if s < 3:
        raise ValueError("arity must be >= 3")
    a, b = endpoints
    if a == b:
        raise ValueError("endpoints must be distinct")
    labels = _Labels(max(a, b) + 1)
    edges, _ = _path_between(s, length, a, b, labels)
    return Hypergraph.from_edges(s, edges)


@dataclass(frozen=True)
class Theorem6Witness:
    """Double path bundle: inner H joins a, b by 2m loose paths of length 2^l;
    outer G adds a hub joined to the first m midpoints by fresh paths."""

    pair: RootedPair
    alpha: Fraction
    endpoints: tuple[int, int]
    midpoints: tuple[int, ...]
    hub: int

    @property
    def h(self) -> Hypergraph:
        return self.pair.inner

    @property
    def g(self) -> Hypergraph:
        return self.pair.outer


def theorem6_pair(s: int, l: int, m: int, verify: bool = True,
                  balance_cap: int = DEFAULT_ENUM_CAP) -> Theorem6Witness:
    """Build the bundle pair; verifies rho(H) = rho(G,H) = 1/alpha exactly and,
    within the cap, strict balance of H and of the pair.

    alpha = s - 1 - 1/2^l + 1/(2^l m); requires m >= 2 so alpha < s - 1 stays
    meaningful as a spectrum point.
    """
    if s < 3:
        raise ValueError("arity must be >= 3")
    if l < 1:
        raise ValueError("l must be >= 1")
    if m < 2:
        raise ValueError("m must be >= 2")
    t = 1 << l
    a, b = 1, 2
    labels = _Labels(3)
    h_edges: list[frozenset[int]] = []
    midpoints: list[int] = []
    for _ in range(2 * m):
        edges, chain = _path_between(s, t, a, b, labels)
        h_edges.extend(edges)
        midpoints.append(chain[t // 2])
    h = Hypergraph.from_edges(s, h_edges)
    (hub,) = labels.take(1)
    g_edges = list(h_edges)
    for i in range(m):
        edges, _ = _path_between(s, t, hub, midpoints[i], labels)
        g_edges.extend(edges)
    g = Hypergraph.from_edges(s, g_edges)
    pair = RootedPair.identity(g, h)
    alpha = Fraction(s - 1) - Fraction(1, t) + Fraction(1, t * m)

    if verify:
        if density(h) != 1 / alpha:
            raise VerificationError(f"rho(H) = {density(h)} != 1/alpha = {1 / alpha}")
        if pair.rel_density() != 1 / alpha:
            raise VerificationError(
                f"rho(G,H) = {pair.rel_density()} != 1/alpha = {1 / alpha}")
        expected_vrel = m * (t * (s - 1) - 1) + 1
        if pair.v_rel != expected_vrel:
            raise VerificationError(
                f"v(G,H) = {pair.v_rel}, expected {expected_vrel}")
        if pair.v_rel <= balance_cap and not is_pair_strictly_balanced(pair, cap=balance_cap):
            raise VerificationError("the pair is not strictly balanced")
        if h.num_vertices <= balance_cap and not is_strictly_balanced(h, cap=balance_cap):
            raise VerificationError("H is not strictly balanced")
    return Theorem6Witness(pair=pair, alpha=alpha, endpoints=(a, b),
                           midpoints=tuple(midpoints), hub=hub)


@dataclass(frozen=True)
class Theorem8Witness:
    """Two short circuits joined through a center: the containment witness for
    the non-convergence point alpha = s - 1 - 1/(2^(k-s+1) + a)."""

    h: Hypergraph
    part1: Hypergraph
    part2: Hypergraph
    a: int
    alpha: Fraction
    center: int


def _two_edge_circuit(s: int, labels: _Labels) -> Hypergraph:
    v = labels.take(2 * (s - 1))
    e1 = frozenset(v[0:s])
    e2 = frozenset(v[s - 1:] + [v[0]])
    return Hypergraph.from_edges(s, [e1, e2])


def _three_edge_circuit(s: int, labels: _Labels) -> Hypergraph:
    v = labels.take(3 * (s - 1))
    e1 = frozenset(v[0:s])
    e2 = frozenset(v[s - 1:2 * s - 1])
    e3 = frozenset(v[2 * s - 2:] + [v[0]])
    return Hypergraph.from_edges(s, [e1, e2, e3])


def theorem8_witnesses(s: int, k: int, a1: int | None = None, a2: int | None = None,
                       verify: bool = True,
                       balance_cap: int = DEFAULT_ENUM_CAP) -> Theorem8Witness:
    """Exact witness edge sets; verifies 1/rho(H) = alpha = s-1-1/(2^(k-s+1)+a).

    For k >= s + 2 a split a1 + a2 = a + 3 with a1, a2 in {1..2^(k-s)} must be
    supplied (the choice changes H); for k = s + 1 the parameters are fixed.
    """
    if s < 3:
        raise ValueError("arity must be >= 3")
    if k < s + 1:
        raise ValueError(f"need k >= s + 1, got s={s}, k={k}")

    if k == s + 1:
        if a1 is not None or a2 is not None:
            raise ValueError("a1/a2 are fixed for k = s + 1; omit them")
        a = 1
        labels = _Labels(1)
        (x,) = labels.take(1)
        p1 = labels.take(2 * (s - 1) - 1)       # x^1_2 .. x^1_{2(s-1)}
        p2 = labels.take(3 * (s - 1) - 1)       # x^2_2 .. x^2_{3(s-1)}
        edges = [
            frozenset([x] + p1[: s - 1]),
            frozenset(p1[s - 2:] + [x]),
            frozenset([x] + p2[: s - 1]),
            frozenset(p2[s - 2: 2 * s - 2]),
            frozenset(p2[2 * s - 3:] + [x]),
        ]
        h = Hypergraph.from_edges(s, edges)
        part1 = Hypergraph.from_edges(s, edges[:2])
        part2 = Hypergraph.from_edges(s, edges[2:])
        center = x
    else:
        lim = 1 << (k - s)
        if a1 is None or a2 is None:
            raise ValueError("a1 and a2 are required for k >= s + 2")
        if not (1 <= a1 <= lim and 1 <= a2 <= lim):
            raise ValueError(f"a1, a2 must lie in 1..{lim}")
        a = a1 + a2 - 3
        if not (1 <= a <= (1 << (k - s + 1)) - 3):
            raise ValueError(
                f"a = a1 + a2 - 3 = {a} outside 1..{(1 << (k - s + 1)) - 3}")
        labels = _Labels(1)
        part1 = _two_edge_circuit(s, labels)
        part2 = _three_edge_circuit(s, labels)
        (x,) = labels.take(1)
        t1 = a1 + (1 << (k - s)) - 4
        t2 = a2 + (1 << (k - s)) - 4
        e_path1, _ = _path_between(s, t1, x, min(part1.vertices), labels)
        e_path2, _ = _path_between(s, t2, x, min(part2.vertices), labels)
        h = Hypergraph.from_edges(
            s, list(part1.edges) + list(part2.edges) + e_path1 + e_path2)
        center = x

    alpha = Fraction(s - 1) - Fraction(1, (1 << (k - s + 1)) + a)
    if verify:
        expected_e = (1 << (k - s + 1)) + a
        if h.num_edges != expected_e:
            raise VerificationError(f"e(H) = {h.num_edges}, expected {expected_e}")
        if h.num_vertices != expected_e * (s - 1) - 1:
            raise VerificationError(
                f"v(H) = {h.num_vertices}, expected {expected_e * (s - 1) - 1}")
        if 1 / density(h) != alpha:
            raise VerificationError(f"1/rho(H) = {1 / density(h)} != alpha = {alpha}")
        if h.num_vertices <= balance_cap:
            rho_max, _ = max_density(h, cap=balance_cap)
            if rho_max != density(h):
                raise VerificationError("H is not its own densest sub-hypergraph")
    return Theorem8Witness(h=h, part1=part1, part2=part2, a=a, alpha=alpha,
                           center=center)


def omega_tilde_check(g: Hypergraph, alpha: Fraction, size_cap: int,
                      cap: int = DEFAULT_ENUM_CAP) -> bool:
    """True iff g has no sub-hypergraph on <= size_cap vertices denser than 1/alpha.

    Isolated vertices never raise density, so the walk restricts to subsets of
    edge-covered vertices.
    """
    if not g.edges:
        return True
    covered = sorted({v for e in g.edges for v in e})
    if len(covered) > cap:
        raise CapacityError(
            f"{len(covered)} edge-covered vertices exceed the enumeration cap {cap}")
    an, ad = alpha.numerator, alpha.denominator  # density > 1/alpha <=> e*an > v*ad
    limit = min(size_cap, len(covered))
    for size in range(g.s, limit + 1):
        for subset in itertools.combinations(covered, size):
            roster = frozenset(subset)
            e_count = sum(1 for e in g.edges if e <= roster)
            if e_count * an > size * ad:
                return False
    return True
