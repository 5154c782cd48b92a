"""Recovering weights and trees from additive distance matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from .embedding import DistanceMatrix, WeightDistribution, apply_T, pair_order
from .errors import DomainError, NotAdditiveError, NotRealizedError
from .topology import Topology, emit_newick, enumerate_labeled_topologies


def recover_weights(t: Topology, rho: DistanceMatrix) -> WeightDistribution:
    """The unique nonnegative weights on ``t`` that realize ``rho``.

    Leaves are stripped one at a time (smallest vertex first).  The edge
    from leaf p to a non-boundary neighbour q gets
    (rho(p, q1) + rho(p, q2) - rho(q1, q2)) / 2, where q1 and q2 are the
    smallest boundary vertices in the two other branches at q; q then
    becomes a boundary vertex at distance rho(p, r) - w from every r.

    Raises ``NotRealizedError`` if a weight comes out negative or the
    result does not reproduce ``rho``.
    """
    if rho.n != t.n:
        raise DomainError(f"matrix has {rho.n} points, topology has {t.n} leaves")
    adj = {v: {y: e for y, e in nbrs} for v, nbrs in t.adjacency.items()}
    dist: Dict[Tuple[int, int], Fraction] = {}
    for (p, q), x in rho.as_dict().items():
        dist[p, q] = dist[q, p] = x
    boundary = set(t.leaves)
    weights: List[Optional[Fraction]] = [None] * t.m

    while len(adj) > 2:
        p = min(v for v, nbrs in adj.items() if len(nbrs) == 1)
        (q, e), = adj[p].items()
        if q in boundary:
            w = dist[p, q]
        else:
            reps = sorted(
                _smallest_boundary(adj, y, q, boundary) for y in adj[q] if y != p
            )
            q1, q2 = reps[0], reps[1]
            w = (dist[p, q1] + dist[p, q2] - dist[q1, q2]) / 2
        if w < 0:
            raise NotRealizedError(
                f"edge {e} {t.edges[e]} would need negative weight {w}", edge=e
            )
        weights[e] = w
        del adj[q][p]
        del adj[p]
        boundary.discard(p)
        if q not in boundary:
            for r in boundary:
                dist[q, r] = dist[r, q] = dist[p, r] - w
            boundary.add(q)
    a = min(adj)
    (b, e), = adj[a].items()
    w = dist[a, b]
    if w < 0:
        raise NotRealizedError(f"edge {e} {t.edges[e]} would need negative weight {w}", edge=e)
    weights[e] = w

    result = WeightDistribution(t, weights)
    image = apply_T(t, result)
    for pq, want, got in zip(pair_order(t.n), rho.upper, image.upper):
        if want != got:
            raise NotRealizedError(
                f"matrix is not realized by this topology: pair {pq} has "
                f"distance {want} but the recovered weights give {got}",
                pair=pq,
            )
    return result


def _smallest_boundary(adj, start, avoid, boundary):
    best = None
    stack = [(start, avoid)]
    while stack:
        x, parent = stack.pop()
        if x in boundary and (best is None or x < best):
            best = x
        for y in adj[x]:
            if y != parent:
                stack.append((y, x))
    return best


# --- additivity -----------------------------------------------------------------


@dataclass(frozen=True)
class AdditivityReport:
    is_additive: bool
    witness: Optional[Tuple[int, int, int, int]] = None

    def __bool__(self):
        return self.is_additive


def _integer_rows(rho: DistanceMatrix) -> List[List[int]]:
    den = math.lcm(*(x.denominator for x in rho.upper))
    n = rho.n
    rows = [[0] * n for _ in range(n)]
    for (p, q), x in zip(pair_order(n), rho.upper):
        rows[p - 1][q - 1] = rows[q - 1][p - 1] = x.numerator * (den // x.denominator)
    return rows


def four_point_violation(D) -> Optional[Tuple[int, int, int, int]]:
    """First violating quadruple (1-based) of a square matrix, or None.

    Triangle inequality failures are reported as (p, q, r, r).  Works on
    any exactly comparable numbers; callers pass integers for speed.
    """
    n = len(D)
    for i, j, k in combinations(range(n), 3):
        a, b, c = D[i][j], D[i][k], D[j][k]
        if a > b + c:
            return (i + 1, j + 1, k + 1, k + 1)
        if b > a + c:
            return (i + 1, k + 1, j + 1, j + 1)
        if c > a + b:
            return (j + 1, k + 1, i + 1, i + 1)
    for i, j, k, l in combinations(range(n), 4):
        s1 = D[i][j] + D[k][l]
        s2 = D[i][k] + D[j][l]
        s3 = D[i][l] + D[j][k]
        if s1 >= s2:
            hi, mid = (s1, max(s2, s3)) if s1 >= s3 else (s3, s1)
        else:
            hi, mid = (s2, max(s1, s3)) if s2 >= s3 else (s3, s2)
        if hi != mid:
            return (i + 1, j + 1, k + 1, l + 1)
    return None


def is_additive(rho: DistanceMatrix) -> AdditivityReport:
    """Exact four-point test over every quadruple (and triangle)."""
    witness = four_point_violation(_integer_rows(rho))
    return AdditivityReport(witness is None, witness)


# --- reconstruction ---------------------------------------------------------------


class _Tree:
    """Weighted tree of arbitrary degree used while reconstructing."""

    def __init__(self):
        self.nbr: Dict[int, Dict[int, Fraction]] = {}
        self.labels: Dict[int, set] = {}
        self._next = 0

    def fresh(self):
        self._next -= 1
        self.nbr[self._next] = {}
        self.labels[self._next] = set()
        return self._next

    def add_point(self, p):
        self.nbr[p] = {}
        self.labels[p] = {p}

    def link(self, u, v, w):
        self.nbr[u][v] = w
        self.nbr[v][u] = w

    def path(self, a, b):
        via = {a: None}
        stack = [a]
        while stack:
            x = stack.pop()
            for y in self.nbr[x]:
                if y not in via:
                    via[y] = x
                    stack.append(y)
        out = [b]
        while out[-1] != a:
            out.append(via[out[-1]])
        return out[::-1]

    def contract_zero_edges(self):
        while True:
            edge = next(((u, v) for u in self.nbr for v, w in self.nbr[u].items() if w == 0), None)
            if edge is None:
                return
            u, v = edge
            for y, w in self.nbr[v].items():
                if y != u:
                    del self.nbr[y][v]
                    self.link(u, y, w)
            del self.nbr[u][v]
            del self.nbr[v]
            self.labels[u] |= self.labels.pop(v)


def _place_points(rho: DistanceMatrix) -> _Tree:
    d = rho.__getitem__
    tree = _Tree()
    for p in (1, 2, 3):
        tree.add_point(p)
    c = tree.fresh()
    tree.link(c, 1, (d((1, 2)) + d((1, 3)) - d((2, 3))) / 2)
    tree.link(c, 2, (d((1, 2)) + d((2, 3)) - d((1, 3))) / 2)
    tree.link(c, 3, (d((1, 3)) + d((2, 3)) - d((1, 2))) / 2)
    for x in range(4, rho.n + 1):
        best = None
        for a, b in combinations(range(1, x), 2):
            gap = (d((a, x)) + d((b, x)) - d((a, b))) / 2
            if best is None or gap < best[0]:
                best = (gap, a, b)
        gap, a, b = best
        offset = d((a, x)) - gap
        route = tree.path(a, b)
        spot = route[-1]
        walked = Fraction(0)
        for u, v in zip(route, route[1:]):
            w = tree.nbr[u][v]
            if offset == walked:
                spot = u
                break
            if offset < walked + w:
                spot = tree.fresh()
                del tree.nbr[u][v], tree.nbr[v][u]
                tree.link(u, spot, offset - walked)
                tree.link(spot, v, walked + w - offset)
                break
            walked += w
        tree.add_point(x)
        tree.link(spot, x, gap)
    return tree


def _resolutions(k):
    """Every binary tree on ports 0..k-1 as (internal edges, port -> node)."""
    if k == 3:
        yield [], {0: 0, 1: 0, 2: 0}
        return
    for t in enumerate_labeled_topologies(k):
        inner = [(u - k - 1, v - k - 1) for u, v in t.edges if u > k and v > k]
        attach = {}
        for u, v in t.edges:
            if u <= k:
                attach[u - 1] = v - k - 1
            elif v <= k:
                attach[v - 1] = u - k - 1
        yield inner, attach


def _refinements(tree: _Tree, n: int):
    """Binary trees (edges with weights) refining a contracted tree."""
    options = []
    hubs = []
    for v in sorted(tree.nbr):
        labels = sorted(tree.labels[v])
        nbrs = sorted(tree.nbr[v])
        if len(labels) == 1 and len(nbrs) == 1:
            continue
        ports = [("v", y) for y in nbrs] + [("p", p) for p in labels]
        hubs.append((v, ports))
        options.append(list(_resolutions(len(ports))))

    def assemble(choice):
        edges: List[Tuple[int, int, Fraction]] = []
        handle: Dict[Tuple[int, int], int] = {}
        next_id = n + 1
        for (v, ports), (inner, attach) in zip(hubs, choice):
            base = next_id
            next_id += len(ports) - 2
            for a, b in inner:
                edges.append((base + a, base + b, Fraction(0)))
            for idx, (kind, x) in enumerate(ports):
                node = base + attach[idx]
                if kind == "p":
                    edges.append((node, x, Fraction(0)))
                else:
                    handle[v, x] = node
        for u in tree.nbr:
            for v, w in tree.nbr[u].items():
                if u < v:
                    a = handle.get((u, v), u)
                    b = handle.get((v, u), v)
                    edges.append((a, b, w))
        return edges

    def walk(i, choice):
        if i == len(options):
            yield assemble(choice)
            return
        for opt in options[i]:
            yield from walk(i + 1, choice + [opt])

    yield from walk(0, [])


def reconstruct_topology(rho: DistanceMatrix) -> Tuple[Topology, WeightDistribution]:
    """Binary generating tree and weights of an additive matrix.

    When some edges have zero weight several binary trees realize
    ``rho``; the one with the smallest canonical Newick string is returned.
    Raises ``NotAdditiveError`` with a four-point witness otherwise.
    """
    if rho.n < 3:
        raise DomainError("reconstruction needs at least 3 points")
    report = is_additive(rho)
    if not report:
        raise NotAdditiveError(
            f"matrix violates the four-point condition at {report.witness}", report.witness
        )
    tree = _place_points(rho)
    tree.contract_zero_edges()
    best = None
    for edges in _refinements(tree, rho.n):
        t = Topology(rho.n, tuple((u, v) for u, v, _ in edges))
        key = emit_newick(t)
        if best is None or key < best[0]:
            best = (key, t, [w for _, _, w in edges])
    _, t, ws = best
    weights = WeightDistribution(t, ws)
    if apply_T(t, weights) != rho:
        raise NotRealizedError("reconstructed tree does not reproduce the matrix")
    return t, weights
