"""Floating-point and Monte-Carlo cross-checks of the exact pipeline."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .embedding import WeightDistribution, apply_T, pair_order, path_counts
from .errors import DomainError
from .probability import Convention, class_reports
from .recovery import four_point_violation, reconstruct_topology
from .topology import Topology, enumerate_topology_classes, is_isomorphic, shape_key


@dataclass(frozen=True)
class OracleConfig:
    seed: int = 0
    samples: int = 100_000
    float_tolerance: float = 1e-9
    # run full tree reconstruction on every k-th sample
    round_trip_stride: int = 50

    def __post_init__(self):
        if self.samples < 1:
            raise DomainError("samples must be at least 1")
        if not self.float_tolerance > 0:
            raise DomainError("float_tolerance must be positive")
        if self.round_trip_stride < 1:
            raise DomainError("round_trip_stride must be at least 1")


def float_W(t: Topology) -> np.ndarray:
    q = np.array(path_counts(t), dtype=float)
    pairs = pair_order(t.n)
    W = np.zeros((t.m, len(pairs)))
    for col, pq in enumerate(pairs):
        for e in t.leaf_paths[pq]:
            W[e, col] = 1.0 / q[e]
    return W


def float_gram_det(t: Topology) -> float:
    """det(W W^T) in double precision (LU with partial pivoting)."""
    W = float_W(t)
    return float(np.linalg.det(W @ W.T))


def numeric_rank(t: Topology, threshold: float = 1e-8) -> int:
    """Singular values of W above ``threshold``."""
    return int(np.sum(np.linalg.svd(float_W(t), compute_uv=False) > threshold))


def relative_error(approx: float, exact: Fraction) -> float:
    return abs(Fraction(approx) - exact) / abs(exact)


def _exact_exponentials(rng, m):
    draws = np.asarray(rng.standard_exponential(m), dtype=float)
    return [Fraction(float(x)) for x in draws]


def sample_simplex_weights(t: Topology, rng) -> WeightDistribution:
    """Uniform point of the unit-norm simplex, as exact weights.

    Barycentric coordinates are normalized exponential draws; the float
    draws are taken as exact dyadic rationals, so the image has l1 norm
    exactly 1.
    """
    e = _exact_exponentials(rng, t.m)
    total = sum(e, Fraction(0))
    q = path_counts(t)
    return WeightDistribution(t, [x / total / qi for x, qi in zip(e, q)])


def _split_weights(t: Topology, w: WeightDistribution):
    out = {}
    leaves = frozenset(t.leaves)
    for s, x in zip(t.splits, w.weights):
        side = s if 1 not in s else leaves - s
        out[side] = x
    return out


def round_trip_trial(t: Topology, rng, zero_edge: Optional[int] = None) -> bool:
    """Sample weights, map to distances, reconstruct, compare.

    With ``zero_edge`` that weight is forced to 0; the trial then succeeds
    when the reconstruction realizes the matrix exactly and agrees with
    ``t`` on every edge of positive weight.
    """
    w = sample_simplex_weights(t, rng)
    if zero_edge is not None:
        ws = list(w.weights)
        ws[zero_edge] = Fraction(0)
        w = WeightDistribution(t, ws)
    rho = apply_T(t, w)
    t2, w2 = reconstruct_topology(rho)
    if zero_edge is None:
        return is_isomorphic(t, t2, respect_labels=True) and _split_weights(t, w) == _split_weights(t2, w2)
    if apply_T(t2, w2) != rho:
        return False
    positive = {s: x for s, x in _split_weights(t, w).items() if x > 0}
    positive2 = {s: x for s, x in _split_weights(t2, w2).items() if x > 0}
    return positive == positive2


@dataclass(frozen=True)
class SimulationResult:
    n: int
    convention: str
    seed: int
    samples: int
    shapes: Tuple[str, ...]
    counts: Tuple[int, ...]
    analytic: Tuple[float, ...]
    chi_square: float
    additive_failures: int
    round_trips: int
    round_trip_failures: int
    max_det_relative_error: float

    @property
    def frequencies(self) -> Tuple[float, ...]:
        return tuple(c / self.samples for c in self.counts)

    def standard_errors(self) -> Tuple[float, ...]:
        return tuple(math.sqrt(p * (1 - p) / self.samples) for p in self.analytic)

    def within_sigma(self, k: float = 3.0) -> bool:
        return all(
            abs(f - p) <= k * se
            for f, p, se in zip(self.frequencies, self.analytic, self.standard_errors())
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["frequencies"] = list(self.frequencies)
        return d


def simulate_class_frequencies(
    n: int, convention=Convention.PAPER_DET, cfg: Optional[OracleConfig] = None
) -> SimulationResult:
    """Sample additive spaces class by class and tally shapes.

    Labeled trees are drawn in proportion to their analytic measure and
    given a uniform point of their unit simplex.  Every sampled distance
    matrix is checked for exact additivity; every ``round_trip_stride``-th
    one is also reconstructed and compared with the drawn tree.  The
    class weights themselves are cross-checked against float determinants.
    """
    cfg = cfg or OracleConfig()
    convention = Convention.parse(convention)
    if not isinstance(n, int) or not 3 <= n <= 9:
        raise DomainError(f"n must be in 3..9, got {n!r}")

    classes = enumerate_topology_classes(n)
    reports = class_reports(classes, convention)
    max_err = 0.0
    for rep in reports:
        err = float(relative_error(float_gram_det(rep.topology_class.representative), rep.det))
        max_err = max(max_err, err)
    analytic = np.array([float(r.probability) for r in reports])
    analytic = analytic / analytic.sum()

    rng = np.random.default_rng(cfg.seed)
    draws = rng.choice(len(classes), size=cfg.samples, p=analytic)
    counts = np.bincount(draws, minlength=len(classes))

    pairs = pair_order(n)
    layouts = []
    for cls in classes:
        t = cls.representative
        q = path_counts(t)
        lcm = math.lcm(*q)
        layouts.append((t, [lcm // x for x in q], [t.leaf_paths[pq] for pq in pairs]))

    additive_failures = 0
    round_trips = 0
    round_trip_failures = 0
    for s, c in enumerate(draws):
        t, scale, paths = layouts[c]
        perm = rng.permutation(n) + 1
        exps = rng.standard_exponential(t.m)
        # exact dyadic draws on a common power-of-two grid
        ratios = [float(x).as_integer_ratio() for x in exps]
        den = max(d for _, d in ratios)
        ints = [a * (den // d) for a, d in ratios]
        w = [a * k for a, k in zip(ints, scale)]
        D = [[0] * n for _ in range(n)]
        for (p, q), path in zip(pairs, paths):
            x = sum(w[e] for e in path)
            a, b = perm[p - 1] - 1, perm[q - 1] - 1
            D[a][b] = D[b][a] = x
        if four_point_violation(D) is not None:
            additive_failures += 1
        if s % cfg.round_trip_stride == 0:
            round_trips += 1
            if not _round_trip_sample(t, perm, ints):
                round_trip_failures += 1

    expected = analytic * cfg.samples
    chi = float(np.sum((counts - expected) ** 2 / expected))
    return SimulationResult(
        n=n,
        convention=convention.value,
        seed=cfg.seed,
        samples=cfg.samples,
        shapes=tuple(shape_key(c.representative) for c in classes),
        counts=tuple(int(x) for x in counts),
        analytic=tuple(float(x) for x in analytic),
        chi_square=chi,
        additive_failures=additive_failures,
        round_trips=round_trips,
        round_trip_failures=round_trip_failures,
        max_det_relative_error=max_err,
    )


def _round_trip_sample(t, perm, ints):
    total = sum(ints)
    q = path_counts(t)
    w = WeightDistribution(t, [Fraction(a, total * qi) for a, qi in zip(ints, q)])
    labeled = t.relabel({p: int(perm[p - 1]) for p in t.leaves})
    w_labeled = WeightDistribution(labeled, w.weights)
    rho = apply_T(labeled, w_labeled)
    if rho.norm_l1 != 1:
        return False
    t2, w2 = reconstruct_topology(rho)
    return is_isomorphic(labeled, t2, respect_labels=True) and _split_weights(
        labeled, w_labeled
    ) == _split_weights(t2, w2)
