"""Unrooted binary trees with labeled leaves.

Vertices are integers.  Leaf ``p`` carries label ``p`` (``1..n``), internal
vertices are numbered ``n+1 .. 2n-2``.  Edges are kept in a fixed order and
are referred to by their 0-based position in ``Topology.edges``.
"""
from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterator, List, Tuple

from .errors import DomainError, NewickParseError

Edge = Tuple[int, int]


def labeled_topology_count(n: int) -> int:
    """Number of labeled unrooted binary trees on ``n`` leaves, (2n-5)!!."""
    _check_n(n)
    return math.prod(range(1, 2 * n - 4, 2))


def _check_n(n):
    if not isinstance(n, int) or n < 3:
        raise DomainError(f"binary trees need at least 3 leaves, got n={n!r}")


@dataclass(frozen=True)
class Topology:
    """An unrooted binary tree whose leaves are labeled ``1..n``."""

    n: int
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        _validate(self.n, self.edges)

    @classmethod
    def _trusted(cls, n: int, edges: Tuple[Edge, ...]) -> "Topology":
        # skips validation; only for edge lists produced by leaf insertion
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "edges", edges)
        return obj

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def leaves(self) -> range:
        return range(1, self.n + 1)

    @property
    def internal_vertices(self) -> range:
        return range(self.n + 1, 2 * self.n - 1)

    def is_leaf(self, v: int) -> bool:
        return 1 <= v <= self.n

    @cached_property
    def adjacency(self) -> Dict[int, Tuple[Tuple[int, int], ...]]:
        """Map vertex -> ((neighbor, edge index), ...) in edge order."""
        return {v: tuple(nbrs) for v, nbrs in _adjacency(self.edges).items()}

    @cached_property
    def splits(self) -> Tuple[frozenset, ...]:
        """Leaves on the side of ``edges[i][1]`` once edge ``i`` is removed."""
        out = []
        for u, v in self.edges:
            out.append(frozenset(_side_leaves(self.adjacency, v, u, self.n)))
        return tuple(out)

    @cached_property
    def leaf_paths(self) -> Dict[Tuple[int, int], Tuple[int, ...]]:
        """Edge indices on the path between leaves ``p < q``."""
        paths = {}
        adj = self.adjacency
        for p in self.leaves:
            via = {p: None}
            queue = deque([p])
            while queue:
                x = queue.popleft()
                for y, e in adj[x]:
                    if y not in via:
                        via[y] = (x, e)
                        queue.append(y)
            for q in range(p + 1, self.n + 1):
                path = []
                x = q
                while via[x] is not None:
                    x, e = via[x]
                    path.append(e)
                paths[(p, q)] = tuple(sorted(path))
        return paths

    def relabel(self, mapping) -> "Topology":
        """Return the tree with leaf ``p`` renamed ``mapping[p]``."""
        mp = {v: v for v in range(1, 2 * self.n - 1)}
        for p in self.leaves:
            mp[p] = mapping[p]
        return Topology(self.n, tuple((mp[u], mp[v]) for u, v in self.edges))

    def __str__(self):
        return emit_newick(self)


def _adjacency(edges) -> Dict[int, List[Tuple[int, int]]]:
    adj: Dict[int, List[Tuple[int, int]]] = {}
    for i, (u, v) in enumerate(edges):
        adj.setdefault(u, []).append((v, i))
        adj.setdefault(v, []).append((u, i))
    return adj


def _side_leaves(adj, start, avoid, n):
    found = []
    stack = [(start, avoid)]
    while stack:
        x, parent = stack.pop()
        if x <= n:
            found.append(x)
        for y, _ in adj[x]:
            if y != parent:
                stack.append((y, x))
    return found


def _validate(n, edges):
    _check_n(n)
    m = 2 * n - 3
    if len(edges) != m:
        raise DomainError(f"a binary tree on {n} leaves has {m} edges, got {len(edges)}")
    adj = _adjacency(edges)
    expected = set(range(1, 2 * n - 1))
    if set(adj) != expected:
        raise DomainError("vertices must be leaves 1..n and internal vertices n+1..2n-2")
    for v, nbrs in adj.items():
        want = 1 if v <= n else 3
        if len(nbrs) != want:
            kind = "leaf" if v <= n else "internal vertex"
            raise DomainError(f"{kind} {v} has degree {len(nbrs)}, expected {want}")
    seen = {1}
    stack = [1]
    while stack:
        x = stack.pop()
        for y, _ in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if seen != expected:
        raise DomainError("edges do not form a connected tree")


# --- canonical forms -------------------------------------------------------
#
# A rooted subtree is summarised by (shape, min_leaf, newick, aut):
# shape is the AHU string ignoring labels, newick the labeled form with
# children ordered by (shape, min_leaf), aut the rooted automorphism count.


def _rooted(adj, v, parent, n):
    if v <= n:
        return ("x", v, str(v), 1)
    parts = sorted(_rooted(adj, y, v, n) for y, _ in adj[v] if y != parent)
    return _combine(parts)


def _combine(parts):
    shape = "(" + ",".join(p[0] for p in parts) + ")"
    newick = "(" + ",".join(p[2] for p in parts) + ")"
    aut = math.prod(p[3] for p in parts)
    for count in Counter(p[0] for p in parts).values():
        aut *= math.factorial(count)
    return (shape, min(p[1] for p in parts), newick, aut)


def _centroids(adj):
    root = next(iter(adj))
    order = []
    parent = {root: None}
    stack = [root]
    while stack:
        x = stack.pop()
        order.append(x)
        for y, _ in adj[x]:
            if y not in parent:
                parent[y] = x
                stack.append(y)
    size = {}
    total = len(adj)
    worst = {}
    for x in reversed(order):
        size[x] = 1 + sum(size[y] for y, _ in adj[x] if parent.get(y) == x and y != parent[x])
    for x in order:
        parts = [size[y] for y, _ in adj[x] if y != parent[x]]
        parts.append(total - size[x])
        worst[x] = max(parts)
    best = min(worst.values())
    return sorted(v for v, w in worst.items() if w == best)


def _root_summary(adj, n):
    cents = _centroids(adj)
    if len(cents) == 1:
        c = cents[0]
        parts = [_rooted(adj, y, c, n) for y, _ in adj[c]]
    else:
        a, b = cents
        parts = [_rooted(adj, a, b, n), _rooted(adj, b, a, n)]
    return _combine(sorted(parts))


def _shape_key(adj, n):
    return _root_summary(adj, n)[0]


def centroids(t: Topology) -> List[int]:
    """Centroid vertices of ``t`` (one vertex, or the two ends of an edge)."""
    return _centroids(t.adjacency)


def shape_key(t: Topology) -> str:
    """Canonical string of the unlabeled tree shape."""
    return _shape_key(t.adjacency, t.n)


def automorphism_order(t: Topology) -> int:
    """Order of the automorphism group of the tree with leaf labels ignored."""
    return _root_summary(t.adjacency, t.n)[3]


def is_isomorphic(a: Topology, b: Topology, respect_labels: bool = False) -> bool:
    if a.n != b.n:
        return False
    if respect_labels:
        return emit_newick(a) == emit_newick(b)
    return shape_key(a) == shape_key(b)


def mustache_count(t: Topology) -> int:
    """Number of internal vertices adjacent to exactly two leaves."""
    adj = t.adjacency
    return sum(
        1 for v in t.internal_vertices if sum(1 for y, _ in adj[v] if y <= t.n) == 2
    )


# --- center views -----------------------------------------------------------


@dataclass(frozen=True)
class CenterView:
    """Levels and leaf counts of every edge as seen from an internal vertex.

    ``level[i]`` is the distance from the center to the nearer end of edge
    ``i``; ``subtree_count[i]`` counts leaves beyond edge ``i``.
    """

    center: int
    level: Dict[int, int]
    subtree_count: Dict[int, int]
    main_branches: Tuple[Tuple[int, ...], ...]
    child_edges: Dict[int, Tuple[int, ...]]
    far_vertex: Dict[int, int]

    @property
    def center_edges(self) -> Tuple[int, ...]:
        return tuple(branch[0] for branch in self.main_branches)

    def sibling_pairs(self) -> List[Tuple[int, int]]:
        """Adjacent edge pairs (j, k) with equal nonzero level."""
        return [kids for v, kids in self.child_edges.items() if v != self.center and len(kids) == 2]


def center_view(t: Topology, center: int) -> CenterView:
    if center not in t.internal_vertices:
        raise DomainError(f"center must be an internal vertex, got {center}")
    adj = t.adjacency
    depth = {center: 0}
    far = {}
    child_edges = {}
    order = []
    queue = deque([center])
    while queue:
        x = queue.popleft()
        order.append(x)
        kids = []
        for y, e in adj[x]:
            if y not in depth:
                depth[y] = depth[x] + 1
                far[e] = y
                kids.append(e)
                queue.append(y)
        child_edges[x] = tuple(kids)
    leaves_below = {}
    for x in reversed(order):
        kids = child_edges[x]
        leaves_below[x] = 1 if t.is_leaf(x) else sum(leaves_below[far[e]] for e in kids)
    level = {e: depth[far[e]] - 1 for e in far}
    count = {e: leaves_below[far[e]] for e in far}

    branches = []
    for e in child_edges[center]:
        members = []
        stack = [e]
        while stack:
            f = stack.pop()
            members.append(f)
            stack.extend(reversed(child_edges[far[f]]))
        branches.append(tuple(members))
    internal_kids = {v: k for v, k in child_edges.items() if k}
    return CenterView(center, level, count, tuple(branches), internal_kids, far)


# --- newick -----------------------------------------------------------------


def emit_newick(t: Topology) -> str:
    """Canonical Newick string rooted at the centroid.

    Children are ordered by unlabeled subtree shape, then by smallest leaf
    label, so label-preserving isomorphic trees give identical strings.
    """
    return _root_summary(t.adjacency, t.n)[2] + ";"


class _NewickReader:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, message, pos=None):
        return NewickParseError(message, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def node(self):
        """Return (label or None, children, start position)."""
        start = self.pos
        if self.peek() == "(":
            self.pos += 1
            children = [self.node()]
            while self.peek() == ",":
                self.pos += 1
                children.append(self.node())
            if self.peek() != ")":
                raise self.error("expected ',' or ')'")
            self.pos += 1
            if self.peek() not in ("", ":", ",", ")", ";"):
                raise self.error("internal node labels are not supported")
            self.length()
            return (None, children, start)
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in "(),:;" and not self.text[self.pos].isspace():
            self.pos += 1
        token = self.text[start:self.pos]
        if not token:
            raise self.error("expected a leaf label or '('")
        if not token.isdigit():
            raise self.error(f"leaf label {token!r} is not a positive integer", start)
        self.length()
        return (int(token), [], start)

    def length(self):
        # branch lengths are accepted and discarded
        if self.peek() == ":":
            self.pos += 1
            self.skip()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos] not in "(),;" and not self.text[self.pos].isspace():
                self.pos += 1
            token = self.text[start:self.pos]
            try:
                Fraction(token)
            except (ValueError, ZeroDivisionError):
                raise self.error(f"bad branch length {token!r}", start) from None


def parse_newick(text: str) -> Topology:
    """Parse a Newick string whose leaves are the integers ``1..n``.

    The root may have three children, or two children in which case it is
    suppressed.  Every other internal node must have exactly two children.
    """
    reader = _NewickReader(text)
    root = reader.node()
    if reader.peek() != ";":
        raise reader.error("expected ';'")
    reader.pos += 1
    if reader.peek() != "":
        raise reader.error("trailing text after ';'")
    label, children, _ = root
    if label is not None:
        raise reader.error("a tree needs at least 3 leaves", 0)
    if len(children) not in (2, 3):
        raise reader.error(f"root has {len(children)} children, expected 2 or 3", root[2])

    labels = []

    def collect(nd, is_root):
        lab, kids, pos = nd
        if lab is not None:
            labels.append((lab, pos))
            return
        if not is_root and len(kids) != 2:
            raise reader.error(f"non-binary internal node with {len(kids)} children", pos)
        for k in kids:
            collect(k, False)

    collect(root, True)
    n = len(labels)
    if n < 3:
        raise reader.error("a tree needs at least 3 leaves", 0)
    seen = set()
    for lab, pos in labels:
        if lab in seen:
            raise reader.error(f"duplicate leaf label {lab}", pos)
        if not 1 <= lab <= n:
            raise reader.error(f"leaf label {lab} outside 1..{n}", pos)
        seen.add(lab)

    edges = []
    counter = iter(range(n + 1, 2 * n - 1))

    def build(nd):
        lab, kids, _ = nd
        if lab is not None:
            return lab
        v = next(counter)
        for k in kids:
            edges.append((v, build(k)))
        return v

    if len(children) == 3:
        build(root)
    else:
        a, b = (build(c) for c in children)
        edges.append((a, b))
    return Topology(n, tuple(edges))


# --- enumeration --------------------------------------------------------------


def _star_edges(n):
    return [(n + 1, 1), (n + 1, 2), (n + 1, 3)]


def _insert(edges, i, leaf, n):
    w = n + leaf - 2
    u, v = edges[i]
    new = list(edges)
    new[i] = (u, w)
    new.append((w, v))
    new.append((w, leaf))
    return new


def enumerate_labeled_topologies(n: int) -> Iterator[Topology]:
    """Yield all (2n-5)!! labeled binary trees by sequential leaf insertion.

    Leaf ``k+1`` is inserted into every edge of every ``k``-leaf tree, edges
    taken in index order, so the sequence is deterministic.
    """
    _check_n(n)

    def grow(edges, leaf):
        if leaf > n:
            yield Topology._trusted(n, tuple(edges))
            return
        for i in range(len(edges)):
            yield from grow(_insert(edges, i, leaf, n), leaf + 1)

    return grow(_star_edges(n), 4)


@dataclass(frozen=True)
class TopologyClass:
    """Isomorphism class of labeled trees sharing one unlabeled shape."""

    representative: Topology
    simm: int
    labeled_count: int

    @property
    def n(self) -> int:
        return self.representative.n

    @property
    def shape(self) -> str:
        return shape_key(self.representative)


def enumerate_topology_classes(n: int) -> List[TopologyClass]:
    """Unlabeled shapes on ``n`` leaves, each with its symmetry order.

    Shapes are grown by inserting leaves into representatives and keeping
    one tree per canonical shape; every representative is a member of
    :func:`enumerate_labeled_topologies`.
    """
    _check_n(n)
    level = [_star_edges(n)]
    for leaf in range(4, n + 1):
        found = {}
        for edges in level:
            for i in range(len(edges)):
                new = _insert(edges, i, leaf, n)
                found.setdefault(_shape_key(_adjacency(new), n), new)
        level = list(found.values())
    classes = []
    total = math.factorial(n)
    for edges in level:
        t = Topology(n, tuple(edges))
        simm = automorphism_order(t)
        classes.append(TopologyClass(t, simm, total // simm))
    return classes
