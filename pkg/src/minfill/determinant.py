"""Exact Gram determinants, by elimination and by the product formula."""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .embedding import gram_matrix
from .topology import CenterView, Topology, center_view, centroids


def det_exact(Q: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant of a rational matrix by fraction-free elimination.

    Each row is scaled to integers first; Bareiss elimination then keeps
    every intermediate value an integer.
    """
    m = len(Q)
    if m == 0:
        return Fraction(1)
    rows = []
    scale = 1
    for row in Q:
        if len(row) != m:
            raise ValueError("matrix is not square")
        row = [Fraction(x) for x in row]
        den = math.lcm(*(x.denominator for x in row))
        scale *= den
        rows.append([x.numerator * (den // x.denominator) for x in row])
    sign = 1
    prev = 1
    for k in range(m - 1):
        if rows[k][k] == 0:
            swap = next((r for r in range(k + 1, m) if rows[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        pivot = rows[k][k]
        for i in range(k + 1, m):
            ri = rows[i]
            rk = rows[k]
            a = ri[k]
            for j in range(k + 1, m):
                ri[j] = (pivot * ri[j] - a * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return Fraction(sign * rows[m - 1][m - 1], scale)


def pair_factor(n: int, nj: int, nk: int) -> Fraction:
    """Contribution 4(n/(n(j)+n(k)) - 1) of one sibling pair."""
    return 4 * (Fraction(n, nj + nk) - 1)


def det_closed_form(t: Topology, center: int) -> Fraction:
    """Gram determinant from leaf counts seen from ``center``.

    4 / prod_i (n - n(i))^2 times, for each pair of sibling edges below
    the center, 4 (n / (n(j) + n(k)) - 1).
    """
    view = center_view(t, center)
    return _closed_form(t.n, view)


def _closed_form(n: int, view: CenterView) -> Fraction:
    denom = math.prod((n - c) ** 2 for c in view.subtree_count.values())
    result = Fraction(4, denom)
    for j, k in view.sibling_pairs():
        result *= pair_factor(n, view.subtree_count[j], view.subtree_count[k])
    return result


def default_center(t: Topology) -> int:
    """Smallest centroid vertex; always internal for n >= 3."""
    return centroids(t)[0]


def det_closed_form_any_center(t: Topology, verify: bool = False) -> Fraction:
    """Closed-form determinant at the default center.

    With ``verify`` every internal vertex is tried as center and an
    ``AssertionError`` is raised if any value differs.
    """
    value = det_closed_form(t, default_center(t))
    if verify:
        for c in t.internal_vertices:
            other = det_closed_form(t, c)
            if other != value:
                raise AssertionError(
                    f"center {c} gives {other}, default center gives {value}"
                )
    return value


def pair_block_determinant(n: int, nj: int, nk: int) -> Fraction:
    """Determinant of the reduced 2x2 block of sibling rows j, k.

    Written with n(i) = n(j) + n(k) for the parent edge i.
    """
    ni = nj + nk
    n_ = Fraction(n)
    core = (n_ / nk - n_ / ni) * (n_ / nj - n_ / ni) - (2 - n_ / ni) ** 2
    return core / ((n - nj) ** 2 * (n - nk) ** 2)


def eliminate_sibling_pair(
    Q: Sequence[Sequence[Fraction]], view: CenterView, j: int, k: int
) -> Tuple[List[List[Fraction]], List[List[Fraction]]]:
    """Reduce rows ``j`` and ``k`` against the row of their parent edge.

    Row j loses (n - n(i)) / (n - n(j)) times row i, row k likewise.
    Returns the updated matrix and its 2x2 block on rows/columns (k, j).
    """
    parent = next((p for p, kids in view.child_edges.items() if j in kids and k in kids), None)
    if parent is None or parent == view.center:
        raise ValueError("edges must be siblings below the center")
    i = next(e for e, v in view.far_vertex.items() if v == parent)
    n = sum(view.subtree_count[e] for e in view.center_edges)
    out = [list(map(Fraction, row)) for row in Q]
    for r in (j, k):
        coef = Fraction(n - view.subtree_count[i], n - view.subtree_count[r])
        out[r] = [a - coef * b for a, b in zip(out[r], out[i])]
    block = [[out[k][k], out[k][j]], [out[j][k], out[j][j]]]
    return out, block


@dataclass(frozen=True)
class VolumeValue:
    """Simplex volume kept exact as sqrt(det) / m!."""

    det: Fraction
    m: int

    @property
    def volume_squared(self) -> Fraction:
        return self.det / math.factorial(self.m) ** 2

    def exact_volume(self) -> Optional[Fraction]:
        """The volume as a fraction when ``det`` is a rational square."""
        root = _rational_sqrt(self.det)
        return None if root is None else root / math.factorial(self.m)

    def volume(self, digits: int = 30) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = digits + 5
            v = (Decimal(self.det.numerator) / Decimal(self.det.denominator)).sqrt()
            v /= Decimal(math.factorial(self.m))
            ctx.prec = digits
            return +v


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


def simplex_volume(t: Topology) -> VolumeValue:
    return VolumeValue(det_exact(gram_matrix(t)), t.m)
