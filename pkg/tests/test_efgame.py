import itertools
import random

import pytest

from helpers import random_hypergraph
from zolab.efgame import (
    GameState,
    distinguishing_formula,
    duplicator_wins,
    is_partial_isomorphism,
)
from zolab.errors import CapacityError
from zolab.folang import evaluate, quantifier_depth, random_formula
from zolab.hypercore import Hypergraph

EDGE = Hypergraph.make(3, [1, 2, 3], [(1, 2, 3)])
BARE = Hypergraph.make(3, [1, 2, 3], [])
H1 = Hypergraph.make(3, range(1, 5), [(1, 2, 3), (3, 4, 1)])
H2 = Hypergraph.make(3, range(1, 7), [(1, 2, 3), (3, 4, 5), (5, 6, 1)])


def test_basic_outcomes():
    for k in range(4):
        assert duplicator_wins(EDGE, EDGE, k)
        assert duplicator_wins(H1, H1, k)
    assert duplicator_wins(EDGE, BARE, 0)
    assert duplicator_wins(EDGE, BARE, 2)  # atoms need 3 pebbles
    assert not duplicator_wins(EDGE, BARE, 3)
    with pytest.raises(ValueError):
        duplicator_wins(EDGE, Hypergraph.make(4, range(1, 5), [(1, 2, 3, 4)]), 1)
    with pytest.raises(CapacityError):
        duplicator_wins(Hypergraph.make(3, range(1, 12), []), BARE, 1)


def test_formula_extraction_edge_vs_bare():
    f = distinguishing_formula(EDGE, BARE, 3)
    assert f is not None
    assert quantifier_depth(f) <= 3
    assert evaluate(f, EDGE) and not evaluate(f, BARE)
    assert distinguishing_formula(EDGE, EDGE, 3) is None


def test_h1_h2_example():
    # with 2 rounds no atom is decidable, so Duplicator survives
    assert duplicator_wins(H1, H2, 2)
    out = distinguishing_formula(H1, H2, 2)
    assert out is None
    f = distinguishing_formula(H1, H2, 3)
    if f is not None:
        assert quantifier_depth(f) <= 3
        assert evaluate(f, H1) != evaluate(f, H2)
    assert (f is None) == duplicator_wins(H1, H2, 3)


def test_monotonicity_in_rounds():
    rng = random.Random(55)
    for _ in range(25):
        g = random_hypergraph(rng, rng.randint(2, 4), p=0.4)
        h = random_hypergraph(rng, rng.randint(2, 4), p=0.4)
        results = [duplicator_wins(g, h, k) for k in range(4)]
        # once Spoiler wins he keeps winning with more rounds
        for a, b in zip(results, results[1:]):
            assert not (not a and b)


def test_symmetry():
    rng = random.Random(56)
    for _ in range(25):
        g = random_hypergraph(rng, rng.randint(2, 5), p=0.4)
        h = random_hypergraph(rng, rng.randint(2, 5), p=0.4)
        for k in (1, 2, 3):
            assert duplicator_wins(g, h, k) == duplicator_wins(h, g, k)


def test_soundness_random_pairs():
    rng = random.Random(57)
    for _ in range(40):
        g = random_hypergraph(rng, rng.randint(2, 5), p=0.4)
        h = random_hypergraph(rng, rng.randint(2, 5), p=0.4)
        k = rng.randint(1, 3)
        f = distinguishing_formula(g, h, k)
        assert (f is None) == duplicator_wins(g, h, k)
        if f is not None:
            assert quantifier_depth(f) <= k
            assert evaluate(f, g) and not evaluate(f, h)


def test_agreement_when_duplicator_wins():
    rng = random.Random(58)
    pairs_checked = 0
    while pairs_checked < 8:
        g = random_hypergraph(rng, rng.randint(3, 5), p=0.3)
        h = random_hypergraph(rng, rng.randint(3, 5), p=0.3)
        k = rng.randint(1, 3)
        if not duplicator_wins(g, h, k):
            continue
        pairs_checked += 1
        for _ in range(100):
            f = random_formula(rng, s=3, max_depth=k)
            assert evaluate(f, g) == evaluate(f, h)


def test_edgeless_structures_exact_law():
    # with no edges only equality is visible: k-round equivalence holds iff
    # the structures have equal size or both have at least k vertices
    for a in range(1, 6):
        for b in range(1, 6):
            for k in range(5):
                ga = Hypergraph.make(3, range(1, a + 1), [])
                gb = Hypergraph.make(3, range(1, b + 1), [])
                want = (a == b) or (a >= k and b >= k)
                assert duplicator_wins(ga, gb, k) == want, (a, b, k)


def test_cap_scale_game_terminates_fast():
    rng = random.Random(7)
    pool = [random_hypergraph(rng, 8, p=0.25) for _ in range(4)]
    for g in pool:
        for h in pool:
            duplicator_wins(g, h, 4)


def test_empty_structure_games():
    empty = Hypergraph.make(3, [], [])
    assert duplicator_wins(empty, empty, 3)
    assert not duplicator_wins(EDGE, empty, 1)
    f = distinguishing_formula(EDGE, empty, 1)
    assert f is not None
    assert evaluate(f, EDGE) and not evaluate(f, empty)


def test_game_state_type():
    st = GameState.start(3)
    assert st.rounds_left == 3 and st.pebbles_g == ()
    st2 = st.after(1, 2).after(3, 3)
    assert st2.rounds_left == 1
    assert st2.pebbles_g == (1, 3) and st2.pebbles_h == (2, 3)
    with pytest.raises(ValueError):
        GameState(1, (1,), (2, 3))
    with pytest.raises(ValueError):
        GameState.start(0).after(1, 1)
    # partial isomorphism on the empty map, and a broken edge correspondence
    assert is_partial_isomorphism(GameState.start(2), EDGE, BARE)
    full = GameState(0, (1, 2, 3), (1, 2, 3))
    assert is_partial_isomorphism(full, EDGE, EDGE)
    assert not is_partial_isomorphism(full, EDGE, BARE)


def test_equivalence_relation_on_pool():
    pool = [
        BARE,
        EDGE,
        Hypergraph.make(3, range(1, 5), []),
        Hypergraph.make(3, range(1, 5), [(1, 2, 3)]),
        Hypergraph.make(3, range(1, 5), [(1, 2, 3), (1, 2, 4)]),
        Hypergraph.make(3, range(1, 6), [(1, 2, 3), (3, 4, 5)]),
        H1,
    ]
    for k in (1, 2, 3):
        rel = {}
        for i, g in enumerate(pool):
            for j, h in enumerate(pool):
                rel[i, j] = duplicator_wins(g, h, k)
        for i, j, l in itertools.product(range(len(pool)), repeat=3):
            assert rel[i, i]
            assert rel[i, j] == rel[j, i]
            if rel[i, j] and rel[j, l]:
                assert rel[i, l]
