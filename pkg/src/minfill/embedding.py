"""The linear map from edge weights to leaf distance matrices.

Everything here is exact: weights, distances and Gram entries are
:class:`fractions.Fraction`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from .errors import DomainError
from .topology import Topology


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class WeightDistribution:
    """Nonnegative exact weight on every edge of ``topology``."""

    topology: Topology
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        ws = tuple(_frac(w) for w in self.weights)
        if len(ws) != self.topology.m:
            raise DomainError(
                f"expected {self.topology.m} edge weights, got {len(ws)}"
            )
        for i, w in enumerate(ws):
            if w < 0:
                raise DomainError(f"edge {i} has negative weight {w}")
        object.__setattr__(self, "weights", ws)

    def __getitem__(self, i):
        return self.weights[i]

    def __add__(self, other):
        if other.topology != self.topology:
            return NotImplemented
        return WeightDistribution(self.topology, [a + b for a, b in zip(self.weights, other.weights)])

    def scale(self, factor) -> "WeightDistribution":
        return WeightDistribution(self.topology, [factor * w for w in self.weights])


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric matrix with zero diagonal, stored as its upper triangle.

    ``upper`` lists rho(p, q) for 1 <= p < q <= n in lexicographic order.
    """

    n: int
    upper: Tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(_frac(x) for x in self.upper)
        if self.n < 2:
            raise DomainError("a distance matrix needs at least 2 points")
        if len(vals) != self.n * (self.n - 1) // 2:
            raise DomainError(f"expected {self.n * (self.n - 1) // 2} entries, got {len(vals)}")
        for x in vals:
            if x < 0:
                raise DomainError(f"negative distance {x}")
        object.__setattr__(self, "upper", vals)

    @classmethod
    def from_pairs(cls, n: int, values: Dict[Tuple[int, int], object]) -> "DistanceMatrix":
        """Build from ``{(p, q): rho}``; missing pairs raise ``DomainError``."""
        out = []
        for p, q in pair_order(n):
            if (p, q) in values:
                out.append(values[(p, q)])
            elif (q, p) in values:
                out.append(values[(q, p)])
            else:
                raise DomainError(f"missing distance for pair ({p}, {q})")
        return cls(n, tuple(out))

    @classmethod
    def from_square(cls, rows: Sequence[Sequence[object]]) -> "DistanceMatrix":
        n = len(rows)
        mat = [[_frac(x) for x in row] for row in rows]
        for p in range(n):
            if len(mat[p]) != n:
                raise DomainError("distance matrix is not square")
            if mat[p][p] != 0:
                raise DomainError(f"diagonal entry {p + 1} is not zero")
            for q in range(p + 1, n):
                if mat[p][q] != mat[q][p]:
                    raise DomainError(f"matrix is not symmetric at ({p + 1}, {q + 1})")
        return cls(n, tuple(mat[p][q] for p in range(n) for q in range(p + 1, n)))

    def __getitem__(self, pq) -> Fraction:
        p, q = pq
        if p == q:
            return Fraction(0)
        if p > q:
            p, q = q, p
        n = self.n
        # offset of row p in the packed upper triangle
        return self.upper[(p - 1) * n - (p - 1) * p // 2 + (q - p - 1)]

    def as_dict(self) -> Dict[Tuple[int, int], Fraction]:
        return dict(zip(pair_order(self.n), self.upper))

    def to_square(self) -> List[List[Fraction]]:
        return [[self[p, q] for q in range(1, self.n + 1)] for p in range(1, self.n + 1)]

    def relabel(self, mapping) -> "DistanceMatrix":
        """Matrix whose point ``mapping[p]`` plays the role of ``p``."""
        return DistanceMatrix.from_pairs(
            self.n, {(mapping[p], mapping[q]): self[p, q] for p, q in pair_order(self.n)}
        )

    @property
    def norm_l1(self) -> Fraction:
        """Sum of the entries above the diagonal."""
        return sum(self.upper, Fraction(0))


def pair_order(n: int) -> List[Tuple[int, int]]:
    """Leaf pairs (p, q), p < q, in lexicographic order."""
    return list(combinations(range(1, n + 1), 2))


def apply_T(t: Topology, w) -> DistanceMatrix:
    """Distance matrix realized by weights ``w`` on ``t`` (path sums)."""
    if not isinstance(w, WeightDistribution):
        w = WeightDistribution(t, w)
    elif w.topology != t:
        raise DomainError("weight distribution belongs to a different topology")
    ws = w.weights
    paths = t.leaf_paths
    return DistanceMatrix(
        t.n, tuple(sum((ws[e] for e in paths[pq]), Fraction(0)) for pq in pair_order(t.n))
    )


def path_counts(t: Topology) -> Tuple[int, ...]:
    """How many leaf pairs route through each edge: n(i) * (n - n(i))."""
    return tuple(len(s) * (t.n - len(s)) for s in t.splits)


def simplex_vertex_weights(t: Topology) -> List[WeightDistribution]:
    """The m distributions with a single nonzero weight 1/q_i on edge i.

    Each one maps to a distance matrix of l1 norm exactly 1.  Together
    with the zero distribution they span the simplex whose image is the
    part of the cone inside the unit ball.
    """
    q = path_counts(t)
    out = []
    for i in range(t.m):
        ws = [Fraction(0)] * t.m
        ws[i] = Fraction(1, q[i])
        out.append(WeightDistribution(t, ws))
    return out


def build_W(t: Topology) -> List[List[Fraction]]:
    """Rows are the vectorized images of the simplex vertex weights.

    Columns follow :func:`pair_order`.
    """
    q = path_counts(t)
    paths = t.leaf_paths
    rows = [[Fraction(0)] * len(paths) for _ in range(t.m)]
    for col, pq in enumerate(pair_order(t.n)):
        for e in paths[pq]:
            rows[e][col] = Fraction(1, q[e])
    return rows


def shared_pair_count(t: Topology, i: int, j: int) -> int:
    """Number of leaf pairs whose path uses both edges ``i`` and ``j``."""
    si, sj = t.splits[i], t.splits[j]
    if i == j:
        return len(si) * (t.n - len(si))
    leaves = frozenset(t.leaves)
    # distinct tree splits are compatible: exactly one side of i misses one
    # side of j, and those two sides are where the shared paths start and end
    for a in (si, leaves - si):
        for b in (sj, leaves - sj):
            if not a & b:
                return len(a) * len(b)
    raise AssertionError(f"edges {i} and {j} give incompatible splits")


def gram_matrix(t: Topology) -> List[List[Fraction]]:
    """Exact Gram matrix of the simplex vertex vectors.

    Entry (i, j) is the number of leaf pairs using both edges divided by
    q_i * q_j, computed from leaf splits rather than from the rows of W.
    """
    q = path_counts(t)
    m = t.m
    Q = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            val = Fraction(shared_pair_count(t, i, j), q[i] * q[j])
            Q[i][j] = Q[j][i] = val
    return Q
