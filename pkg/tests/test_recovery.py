import random
from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minfill import (
    DistanceMatrix,
    DomainError,
    NotAdditiveError,
    NotRealizedError,
    WeightDistribution,
    apply_T,
    emit_newick,
    enumerate_labeled_topologies,
    enumerate_topology_classes,
    is_additive,
    is_isomorphic,
    parse_newick,
    reconstruct_topology,
    recover_weights,
)
from minfill.recovery import four_point_violation

from strategies import fractions, labeled_trees, split_system


def split_weights(t, w):
    leaves = frozenset(t.leaves)
    return {s if 1 not in s else leaves - s: x for s, x in zip(t.splits, w.weights)}


def violates_at(rho, quad):
    """Independent check that ``quad`` breaks the triangle or four-point rule."""
    p, q, r, s = quad
    if r == s:
        return rho[p, q] > rho[p, r] + rho[q, r]
    sums = sorted([rho[p, q] + rho[r, s], rho[p, r] + rho[q, s], rho[p, s] + rho[q, r]])
    return sums[1] != sums[2]


def realizable(rho):
    """Brute force: some labeled tree realizes rho with nonnegative weights."""
    for t in enumerate_labeled_topologies(rho.n):
        try:
            recover_weights(t, rho)
            return True
        except NotRealizedError:
            pass
    return False


@settings(max_examples=120, deadline=None)
@given(labeled_trees(max_n=8), st.data())
def test_recover_round_trip(t, data):
    w = data.draw(st.lists(fractions, min_size=t.m, max_size=t.m))
    assert recover_weights(t, apply_T(t, w)).weights == tuple(w)


@settings(max_examples=80, deadline=None)
@given(labeled_trees(max_n=8), st.data())
def test_reconstruct_positive_weights(t, data):
    w = data.draw(st.lists(fractions.filter(bool), min_size=t.m, max_size=t.m))
    w = WeightDistribution(t, w)
    t2, w2 = reconstruct_topology(apply_T(t, w))
    assert is_isomorphic(t, t2, respect_labels=True)
    assert split_system(t) == split_system(t2)
    assert split_weights(t, w) == split_weights(t2, w2)


@settings(max_examples=60, deadline=None)
@given(labeled_trees(max_n=7), st.data())
def test_reconstruct_with_zero_edges(t, data):
    w = data.draw(st.lists(st.sampled_from([F(0), F(1), F(3, 2)]), min_size=t.m, max_size=t.m))
    rho = apply_T(t, w)
    t2, w2 = reconstruct_topology(rho)
    assert apply_T(t2, w2) == rho
    positive = {s: x for s, x in split_weights(t, WeightDistribution(t, w)).items() if x}
    assert positive == {s: x for s, x in split_weights(t2, w2).items() if x}
    # ties between refinements are broken the same way every time
    again, _ = reconstruct_topology(DistanceMatrix(rho.n, rho.upper))
    assert emit_newick(again) == emit_newick(t2)


def test_zero_matrix_reconstructs():
    t, w = reconstruct_topology(DistanceMatrix(5, (0,) * 10))
    assert t.n == 5 and all(x == 0 for x in w.weights)


def test_all_equal_quartet():
    rho = DistanceMatrix(4, (2,) * 6)
    t, w = reconstruct_topology(rho)
    assert emit_newick(t) == "((1,2),(3,4));"
    assert sorted(w.weights) == [0, 1, 1, 1, 1]


def test_recover_rejects_wrong_topology():
    t = parse_newick("((1,2),(3,4),(5,6));")
    rho = apply_T(t, range(1, 10))
    wrong = parse_newick("((1,3),(2,4),(5,6));")
    with pytest.raises(NotRealizedError) as info:
        recover_weights(wrong, rho)
    assert info.value.edge is not None or info.value.pair is not None
    with pytest.raises(DomainError):
        recover_weights(parse_newick("(1,2,(3,4));"), rho)


def test_recover_small_cases():
    assert recover_weights(parse_newick("(1,2,3);"), DistanceMatrix(3, (1, 1, 1))).weights == (F(1, 2),) * 3
    quartet = parse_newick("((1,2),(3,4));")
    assert recover_weights(quartet, DistanceMatrix(4, (2, 3, 3, 3, 3, 2))).weights == (1,) * 5
    with pytest.raises(NotRealizedError) as info:
        recover_weights(quartet, DistanceMatrix(4, (2, 3, 4, 3, 3, 2)))
    assert info.value.pair is not None


def test_small_example_is_additive():
    # rho12 = rho34 = 1 and every other distance 10 splits as ((1,2),(3,4))
    rho = DistanceMatrix(4, (1, 10, 10, 10, 10, 1))
    assert is_additive(rho)
    t, w = reconstruct_topology(rho)
    assert emit_newick(t) == "((1,2),(3,4));"
    assert sorted(w.weights) == [F(1, 2)] * 4 + [9]


def test_brute_force_violator_gets_witness():
    found = None
    for vals in product(range(1, 4), repeat=6):
        rho = DistanceMatrix(4, vals)
        if not realizable(rho):
            found = rho
            break
    assert found is not None
    report = is_additive(found)
    assert not report
    assert violates_at(found, report.witness)
    with pytest.raises(NotAdditiveError) as info:
        reconstruct_topology(found)
    assert info.value.witness == report.witness


def test_triangle_witness():
    rho = DistanceMatrix(3, (5, 1, 1))
    report = is_additive(rho)
    assert not report
    p, q, r, s = report.witness
    assert r == s and violates_at(rho, report.witness)


@pytest.mark.parametrize("n", [4, 5])
def test_additivity_agrees_with_realizability(n):
    rng = random.Random(n)
    for _ in range(150):
        rho = DistanceMatrix(n, tuple(rng.randint(0, 4) for _ in range(n * (n - 1) // 2)))
        report = is_additive(rho)
        assert bool(report) == realizable(rho)
        if not report:
            assert violates_at(rho, report.witness)


@settings(max_examples=50, deadline=None)
@given(labeled_trees(max_n=7), st.data())
def test_additivity_invariant_under_relabeling(t, data):
    w = data.draw(st.lists(fractions, min_size=t.m, max_size=t.m))
    rho = apply_T(t, w)
    noise = data.draw(st.lists(st.integers(0, 2), min_size=len(rho.upper), max_size=len(rho.upper)))
    rho = DistanceMatrix(t.n, tuple(x + y for x, y in zip(rho.upper, noise)))
    perm = data.draw(st.permutations(range(1, t.n + 1)))
    moved = rho.relabel({p: perm[p - 1] for p in range(1, t.n + 1)})
    assert bool(is_additive(rho)) == bool(is_additive(moved))


def test_four_point_on_integers():
    assert four_point_violation([[0, 1], [1, 0]]) is None
    D = [[0, 2, 2, 2], [2, 0, 2, 2], [2, 2, 0, 2], [2, 2, 2, 0]]
    assert four_point_violation(D) is None
    D[0][1] = D[1][0] = 3
    D[2][3] = D[3][2] = 3
    assert four_point_violation(D) == (1, 2, 3, 4)


def test_reconstruct_needs_three_points():
    with pytest.raises(DomainError):
        reconstruct_topology(DistanceMatrix(2, (1,)))


@pytest.mark.parametrize("n", range(4, 8))
def test_round_trip_every_class(n):
    rng = random.Random(n)
    for c in enumerate_topology_classes(n):
        t = c.representative
        for _ in range(20):
            w = WeightDistribution(t, [F(rng.randint(1, 30), rng.randint(1, 7)) for _ in range(t.m)])
            rho = apply_T(t, w)
            assert recover_weights(t, rho) == w
            t2, _ = reconstruct_topology(rho)
            assert emit_newick(t2) == emit_newick(t)

