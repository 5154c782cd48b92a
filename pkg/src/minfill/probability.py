"""Probability measure over topology classes and the three-mustache families."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import List, NamedTuple, Union

from .determinant import VolumeValue, det_closed_form_any_center
from .errors import DomainError
from .topology import (
    Topology,
    TopologyClass,
    automorphism_order,
    enumerate_topology_classes,
)

DEFAULT_MAX_N = 10
DECIMAL_DIGITS = 40


class Convention(enum.Enum):
    """How the per-labeled-tree measure is derived from det Q.

    PAPER_DET uses det Q itself, which reproduces the published n=6
    numbers.  VOLUME uses sqrt(det Q) / m!, the simplex volume.
    """

    PAPER_DET = "paper-det"
    VOLUME = "volume"

    @classmethod
    def parse(cls, value) -> "Convention":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("_", "-"))
        except ValueError:
            raise DomainError(f"unknown convention {value!r}") from None


def _split_square(k: int, limit: int = 10_000):
    """Write k = a^2 * b with b free of squares of primes below ``limit``."""
    a, b = 1, k
    p = 2
    while p < limit and p * p <= b:
        while b % (p * p) == 0:
            b //= p * p
            a *= p
        p += 1 if p == 2 else 2
    return a, b


@dataclass(frozen=True, eq=False)
class SqrtRational:
    """The exact real number ``coefficient * sqrt(radicand)``."""

    coefficient: Fraction
    radicand: Fraction

    def __post_init__(self):
        if self.radicand < 0:
            raise DomainError("radicand must be nonnegative")
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        object.__setattr__(self, "radicand", Fraction(self.radicand))

    def _signed_square(self):
        c = self.coefficient
        sq = c * c * self.radicand
        return sq if c >= 0 else -sq

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SqrtRational(Fraction(other), Fraction(1))
        if not isinstance(other, SqrtRational):
            return NotImplemented
        return self._signed_square() == other._signed_square()

    def __lt__(self, other):
        return self._signed_square() < other._signed_square()

    def __hash__(self):
        return hash(self._signed_square())

    def __mul__(self, other):
        if isinstance(other, SqrtRational):
            return SqrtRational(self.coefficient * other.coefficient, self.radicand * other.radicand)
        return SqrtRational(self.coefficient * other, self.radicand)

    __rmul__ = __mul__

    def simplified(self) -> "SqrtRational":
        """Pull square factors out of the radicand; sqrt(a/b) = sqrt(ab)/b."""
        r = self.radicand
        a, b = _split_square(r.numerator * r.denominator)
        return SqrtRational(self.coefficient * Fraction(a, r.denominator), Fraction(b))

    def to_decimal(self, digits: int = DECIMAL_DIGITS) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = digits + 5
            r = Decimal(self.radicand.numerator) / Decimal(self.radicand.denominator)
            c = Decimal(self.coefficient.numerator) / Decimal(self.coefficient.denominator)
            out = c * r.sqrt()
            ctx.prec = digits
            return +out

    def __float__(self):
        return float(self.to_decimal(20))

    def __str__(self):
        s = self.simplified()
        if s.radicand == 1:
            return str(s.coefficient)
        if s.radicand == 0:
            return "0"
        return f"{s.coefficient}*sqrt({s.radicand})"

    def __repr__(self):
        return f"SqrtRational({self.coefficient!s}, {self.radicand!s})"


Probability = Union[Fraction, Decimal]


@dataclass(frozen=True)
class TopologyReport:
    """Measure contribution of one topology class.

    ``weight_paper`` is det * n!/simm, ``weight_volume`` is
    sqrt(det)/m! * n!/simm; ``probability`` is normalized under
    ``convention`` (a Fraction for PAPER_DET, a Decimal for VOLUME).
    """

    topology_class: TopologyClass
    det: Fraction
    volume: VolumeValue
    weight_paper: Fraction
    weight_volume: SqrtRational
    probability: Probability
    convention: Convention

    @property
    def simm(self) -> int:
        return self.topology_class.simm


def _normalize(weights, convention):
    if convention is Convention.PAPER_DET:
        total = sum(weights, Fraction(0))
        return [w / total for w in weights]
    with localcontext() as ctx:
        ctx.prec = DECIMAL_DIGITS + 10
        decs = [w.to_decimal(DECIMAL_DIGITS + 10) for w in weights]
        total = sum(decs, Decimal(0))
        out = [d / total for d in decs]
        ctx.prec = DECIMAL_DIGITS
        return [+p for p in out]


def class_reports(classes: List[TopologyClass], convention=Convention.PAPER_DET) -> List[TopologyReport]:
    convention = Convention.parse(convention)
    staged = []
    for cls in classes:
        t = cls.representative
        det = det_closed_form_any_center(t)
        mult = Fraction(math.factorial(t.n), cls.simm)
        vw = SqrtRational(mult / math.factorial(t.m), det)
        staged.append((cls, det, det * mult, vw))
    weights = [s[2] if convention is Convention.PAPER_DET else s[3] for s in staged]
    probs = _normalize(weights, convention)
    return [
        TopologyReport(cls, det, VolumeValue(det, cls.representative.m), wp, wv, p, convention)
        for (cls, det, wp, wv), p in zip(staged, probs)
    ]


def topology_probabilities(
    n: int, convention=Convention.PAPER_DET, max_n: int = DEFAULT_MAX_N
) -> List[TopologyReport]:
    """One report per unlabeled shape on ``n`` leaves, probabilities summing to 1."""
    if not isinstance(n, int) or n < 3 or n > max_n:
        raise DomainError(f"n must be in 3..{max_n}, got {n!r}")
    return class_reports(enumerate_topology_classes(n), convention)


def probability_ratio(t1: Topology, t2: Topology, convention=Convention.PAPER_DET):
    """P(shape of t1) / P(shape of t2).

    A Fraction under PAPER_DET, a :class:`SqrtRational` under VOLUME.
    """
    convention = Convention.parse(convention)
    if t1.n != t2.n:
        raise DomainError(f"topologies have different leaf counts {t1.n} and {t2.n}")
    det_ratio = det_closed_form_any_center(t1) / det_closed_form_any_center(t2)
    simm_ratio = Fraction(automorphism_order(t2), automorphism_order(t1))
    if convention is Convention.PAPER_DET:
        return det_ratio * simm_ratio
    return SqrtRational(simm_ratio, det_ratio)


# --- three-mustache families --------------------------------------------------------
#
# Two mustaches sit at the ends of a path; a third hangs off the k-th
# internal vertex of the path; every other path vertex carries one leaf.


def three_mustache_tree(n: int, k: int) -> Topology:
    """Path-family tree with the middle mustache after the k-th path edge.

    The path runs from a leaf of the first end mustache to a leaf of the
    other; 2 <= k <= n-4.
    """
    if not isinstance(n, int) or n < 6:
        raise DomainError(f"three-mustache trees need n >= 6, got {n!r}")
    if not 2 <= k <= n - 4:
        raise DomainError(f"k must lie in 2..{n - 4}, got {k}")
    spine = [n + i for i in range(1, n - 2)]
    hub = 2 * n - 2
    labels = iter(range(1, n + 1))
    edges = [(spine[0], next(labels)), (spine[0], next(labels))]
    edges += [(a, b) for a, b in zip(spine, spine[1:])]
    for i in range(2, n - 3):
        if i == k:
            edges += [(spine[i - 1], hub), (hub, next(labels)), (hub, next(labels))]
        else:
            edges.append((spine[i - 1], next(labels)))
    edges += [(spine[-1], next(labels)), (spine[-1], next(labels))]
    return Topology(n, tuple(edges))


def _check_even(n, low):
    if not isinstance(n, int) or n % 2 or n < low:
        raise DomainError(f"n must be even and at least {low}, got {n!r}")


def symmetric_three_mustache_tree(n: int) -> Topology:
    """Middle mustache halfway along the path (n even)."""
    _check_even(n, 6)
    return three_mustache_tree(n, n // 2 - 1)


def family_det_three_mustache_symmetric(n: int) -> Fraction:
    """Published closed form 4^(n-3) n^2 / (2 (n-1)^(2n) (n-2) ((n-2)!)^2)."""
    _check_even(n, 6)
    return Fraction(
        4 ** (n - 3) * n * n,
        2 * (n - 1) ** (2 * n) * (n - 2) * math.factorial(n - 2) ** 2,
    )


def published_det_second_family(n: int) -> Fraction:
    """Published closed form for the tree with the middle mustache at k = 2."""
    _check_even(n, 8)
    return Fraction(
        4 ** (n - 3) * 6,
        (n - 1) ** (2 * n) * (n - 2) ** 2 * math.factorial(n - 4) * math.factorial(n - 2),
    )


def published_det_three_mustache_path(n: int, k: int, squared_factorial: bool = False) -> Fraction:
    """4^(n-2) (k+1)(n-k-1) / (2 (n-1)^(2n) (n-2)! (n-2)).

    With ``squared_factorial`` the factorial in the denominator is
    squared, which is the reading that agrees with constructed trees and
    with the symmetric-family formula.
    """
    three_mustache_tree(n, k)
    fact = math.factorial(n - 2)
    if squared_factorial:
        fact *= fact
    return Fraction(4 ** (n - 2) * (k + 1) * (n - k - 1), 2 * (n - 1) ** (2 * n) * fact * (n - 2))


class FamilyDeterminant(NamedTuple):
    published: Fraction
    constructed: Fraction

    @property
    def discrepancy(self) -> Fraction:
        """constructed / published; 1 when the printed formula holds."""
        return self.constructed / self.published


def family_det_three_mustache_path(n: int, k: int) -> FamilyDeterminant:
    """Published value next to the determinant of the constructed tree."""
    return FamilyDeterminant(
        published_det_three_mustache_path(n, k),
        det_closed_form_any_center(three_mustache_tree(n, k)),
    )


def family_ratio_law(n: int, k1: int, k2: int) -> Fraction:
    """(k1+1)(n-k1-1) / ((k2+1)(n-k2-1))."""
    return Fraction((k1 + 1) * (n - k1 - 1), (k2 + 1) * (n - k2 - 1))


def asymptotic_ratio_symmetric_vs_path(n: int) -> Fraction:
    """det of the symmetric tree over det of the k = 2 tree, from the trees."""
    _check_even(n, 8)
    sym = det_closed_form_any_center(symmetric_three_mustache_tree(n))
    edge = det_closed_form_any_center(three_mustache_tree(n, 2))
    return sym / edge


def published_asymptotic_ratio(n: int) -> Fraction:
    """n^2 / (12 (n - 3))."""
    _check_even(n, 8)
    return Fraction(n * n, 12 * (n - 3))
