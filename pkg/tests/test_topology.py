import math
from collections import Counter
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minfill import (
    DomainError,
    NewickParseError,
    Topology,
    automorphism_order,
    emit_newick,
    enumerate_labeled_topologies,
    enumerate_topology_classes,
    is_isomorphic,
    labeled_topology_count,
    parse_newick,
)
from minfill.topology import center_view, centroids, mustache_count, shape_key

from strategies import canonical_side, labeled_trees, split_system


def brute_automorphisms(t):
    """Leaf permutations preserving the split system."""
    splits = split_system(t)
    count = 0
    for perm in permutations(t.leaves):
        image = {canonical_side(t.n, (perm[p - 1] for p in s)) for s in splits}
        count += image == splits
    return count


@pytest.mark.parametrize("n, expected", [(3, 1), (4, 3), (5, 15), (6, 105), (7, 945), (8, 10395)])
def test_labeled_counts(n, expected):
    assert labeled_topology_count(n) == expected
    trees = list(enumerate_labeled_topologies(n))
    assert len(trees) == expected
    assert len({split_system(t) for t in trees}) == expected


def test_count_rejects_small_n():
    with pytest.raises(DomainError):
        labeled_topology_count(2)
    with pytest.raises(DomainError):
        enumerate_labeled_topologies(1)


@pytest.mark.parametrize("n, classes", [(3, 1), (4, 1), (5, 1), (6, 2), (7, 2), (8, 4), (9, 6), (10, 11)])
def test_class_counts(n, classes):
    found = enumerate_topology_classes(n)
    assert len(found) == classes
    assert len({c.shape for c in found}) == classes
    assert sum(c.labeled_count for c in found) == labeled_topology_count(n)


@pytest.mark.parametrize("n", range(3, 9))
def test_classes_match_grouped_labeled_trees(n):
    grouped = Counter(shape_key(t) for t in enumerate_labeled_topologies(n))
    assert grouped == {c.shape: c.labeled_count for c in enumerate_topology_classes(n)}


@pytest.mark.parametrize("n", range(3, 8))
def test_automorphisms_against_brute_force(n):
    for c in enumerate_topology_classes(n):
        assert c.simm == brute_automorphisms(c.representative)
        assert c.labeled_count * c.simm == math.factorial(n)


def test_n6_shapes(caterpillar, snowflake):
    assert automorphism_order(caterpillar) == 8
    assert automorphism_order(snowflake) == 48
    assert mustache_count(caterpillar) == 2
    assert mustache_count(snowflake) == 3
    assert not is_isomorphic(caterpillar, snowflake)
    assert [c.simm for c in enumerate_topology_classes(6)] == [8, 48]


def test_validation_errors():
    with pytest.raises(DomainError):
        Topology(4, ((5, 1), (5, 2), (6, 3), (6, 4)))  # disconnected
    with pytest.raises(DomainError):
        Topology(4, ((5, 1), (5, 2), (5, 6), (6, 3), (6, 4), (5, 4)))
    with pytest.raises(DomainError):
        Topology(3, ((4, 1), (4, 2), (4, 3), (4, 5)))
    with pytest.raises(DomainError):
        Topology(3, ((4, 1), (4, 2), (1, 3)))


def test_splits_and_paths(caterpillar):
    t = caterpillar
    assert t.splits[4] == frozenset({4, 5, 6})
    assert t.leaf_paths[1, 2] == (0, 1)
    assert t.leaf_paths[1, 6] == (0, 2, 4, 6, 8)
    assert len(t.leaf_paths) == 15


def test_centroids():
    cat = parse_newick("(((1,2),3),(4,(5,6)));")
    assert len(centroids(cat)) == 2
    snow = parse_newick("((1,2),(3,4),(5,6));")
    (c,) = centroids(snow)
    assert all(not snow.is_leaf(y) for y, _ in snow.adjacency[c])


def test_center_view(snowflake):
    view = center_view(snowflake, 7)
    assert sorted(view.center_edges) == [3, 4, 6]
    assert sorted(view.sibling_pairs()) == [(0, 1), (2, 5), (7, 8)]
    assert view.level[3] == 0 and view.level[0] == 1
    assert view.subtree_count[3] == 2 and view.subtree_count[0] == 1
    with pytest.raises(DomainError):
        center_view(snowflake, 1)


@pytest.mark.parametrize(
    "text",
    ["(1,2,3);", "((1,2),(3,4));", "((1,2),3,4);", "((1:0.5,2:1e-3),(3,4):2,(5,6));"],
)
def test_parse_accepts(text):
    t = parse_newick(text)
    assert is_isomorphic(t, parse_newick(emit_newick(t)), respect_labels=True)


@pytest.mark.parametrize(
    "text, pos",
    [
        ("((1,2),3", 8),
        ("((1,2),(3,3));", None),
        ("((1,2),(3,5));", None),
        ("((1,2,3),4,5);", None),
        ("(1,2);", None),
        ("((1,2)x,3,4);", None),
        ("((1,2),3,4); extra", None),
        ("((1:a,2),3,4);", None),
    ],
)
def test_parse_rejects(text, pos):
    with pytest.raises(NewickParseError) as info:
        parse_newick(text)
    assert isinstance(info.value.position, int)
    if pos is not None:
        assert info.value.position == pos


def test_two_child_root_is_suppressed():
    a = parse_newick("((1,2),(3,4));")
    b = parse_newick("((3,4),(2,1));")
    assert a.m == 5
    assert emit_newick(a) == emit_newick(b)


def test_emit_is_label_canonical():
    a = parse_newick("((1,2),(3,4),(5,6));")
    b = parse_newick("((6,5),(2,1),(4,3));")
    c = parse_newick("((1,3),(2,4),(5,6));")
    assert emit_newick(a) == emit_newick(b)
    assert emit_newick(a) != emit_newick(c)
    assert is_isomorphic(a, c) and not is_isomorphic(a, c, respect_labels=True)


@settings(max_examples=150, deadline=None)
@given(labeled_trees())
def test_newick_round_trip(t):
    back = parse_newick(emit_newick(t))
    assert split_system(back) == split_system(t)
    assert emit_newick(back) == emit_newick(t)
    assert shape_key(back) == shape_key(t)


@settings(max_examples=100, deadline=None)
@given(labeled_trees(max_n=8), st.data())
def test_relabel_preserves_shape(t, data):
    perm = data.draw(st.permutations(range(1, t.n + 1)))
    r = t.relabel({p: perm[p - 1] for p in t.leaves})
    assert is_isomorphic(t, r)
    assert automorphism_order(r) == automorphism_order(t)
    assert split_system(r) == {canonical_side(t.n, (perm[p - 1] for p in s)) for s in split_system(t)}
