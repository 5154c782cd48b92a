"""Text formats: topology JSON, distance matrix CSV/JSON, report JSON/CSV.

Exact rationals are always written as ``"p/q"`` strings (``"p"`` when the
denominator is 1).
"""
from __future__ import annotations

import csv
import io
import json
from decimal import Decimal
from fractions import Fraction
from typing import List, Optional

from .determinant import VolumeValue
from .embedding import DistanceMatrix, WeightDistribution, pair_order
from .errors import DomainError
from .oracle import SimulationResult
from .probability import Convention, SqrtRational, TopologyReport
from .topology import Topology, TopologyClass, emit_newick, parse_newick, shape_key


def frac_str(x: Fraction) -> str:
    return str(Fraction(x))


def parse_frac(text) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"not a rational number: {text!r}") from None


def _factor(k: int):
    out = {}
    p = 2
    while p * p <= k and p < 100_000:
        while k % p == 0:
            out[p] = out.get(p, 0) + 1
            k //= p
        p += 1 if p == 2 else 2
    if k > 1:
        out[k] = out.get(k, 0) + 1
    return out


def format_factored(x: Fraction, min_power: int = 4) -> str:
    """Render e.g. 1/(2 * 5^12) as ``"1/2 * 5^-12"``.

    The prime with the largest exponent is pulled out when that exponent
    reaches ``min_power``; otherwise the plain fraction is returned.
    """
    x = Fraction(x)
    if x == 0:
        return "0"
    powers = {p: e for p, e in _factor(abs(x.numerator)).items()}
    for p, e in _factor(x.denominator).items():
        powers[p] = powers.get(p, 0) - e
    if not powers:
        return str(x)
    p, e = max(powers.items(), key=lambda pe: (abs(pe[1]), -pe[0]))
    if abs(e) < min_power:
        return str(x)
    rest = x / Fraction(p) ** e
    return f"{rest} * {p}^{e}"


# --- topologies ---------------------------------------------------------------


def topology_to_dict(t: Topology) -> dict:
    return {
        "n": t.n,
        "vertices": list(range(1, 2 * t.n - 1)),
        "boundary": {str(p): p for p in t.leaves},
        "edges": [list(e) for e in t.edges],
        "newick": emit_newick(t),
    }


def topology_from_dict(d: dict) -> Topology:
    try:
        return Topology(int(d["n"]), tuple(tuple(e) for e in d["edges"]))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed topology JSON: {exc}") from None


def weights_to_dict(w: WeightDistribution) -> dict:
    return {"topology": topology_to_dict(w.topology), "weights": [frac_str(x) for x in w.weights]}


def weights_from_dict(d: dict) -> WeightDistribution:
    t = topology_from_dict(d["topology"])
    return WeightDistribution(t, [parse_frac(x) for x in d["weights"]])


# --- distance matrices ----------------------------------------------------------


def distance_to_csv(rho: DistanceMatrix) -> str:
    """``n`` on the first line, then row p holds rho(p, q) for q > p."""
    lines = [str(rho.n)]
    for p in range(1, rho.n):
        lines.append(",".join(frac_str(rho[p, q]) for q in range(p + 1, rho.n + 1)))
    return "\n".join(lines) + "\n"


def distance_from_csv(text: str) -> DistanceMatrix:
    """Read the upper-triangle layout, or a plain square matrix."""
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise DomainError("empty distance matrix file")
    first = [c.strip() for c in rows[0] if c.strip()]
    if len(first) == 1 and first[0].isdigit() and len(rows) - 1 == int(first[0]) - 1:
        n = int(first[0])
        values = []
        for p, row in enumerate(rows[1:], start=1):
            cells = [c for c in row if c.strip()]
            if len(cells) != n - p:
                raise DomainError(f"row {p} should have {n - p} entries, got {len(cells)}")
            values.extend(parse_frac(c) for c in cells)
        return DistanceMatrix(n, tuple(values))
    return DistanceMatrix.from_square([[parse_frac(c) for c in row if c.strip()] for row in rows])


def distance_to_dict(rho: DistanceMatrix) -> dict:
    return {
        "n": rho.n,
        "pairs": [list(pq) for pq in pair_order(rho.n)],
        "upper": [frac_str(x) for x in rho.upper],
    }


def distance_from_dict(d: dict) -> DistanceMatrix:
    if "upper" in d:
        return DistanceMatrix(int(d["n"]), tuple(parse_frac(x) for x in d["upper"]))
    if "matrix" in d:
        return DistanceMatrix.from_square([[parse_frac(x) for x in row] for row in d["matrix"]])
    raise DomainError("distance JSON needs an 'upper' or 'matrix' field")


def read_distance(text: str) -> DistanceMatrix:
    """Parse JSON or CSV, whichever the text looks like."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return distance_from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise DomainError(f"bad JSON: {exc}") from None
    return distance_from_csv(text)


# --- reports ------------------------------------------------------------------------


def report_to_dict(r: TopologyReport) -> dict:
    t = r.topology_class.representative
    prob = r.probability
    return {
        "shape": shape_key(t),
        "newick": emit_newick(t),
        "simm": r.topology_class.simm,
        "labeled_count": r.topology_class.labeled_count,
        "m": r.volume.m,
        "det": frac_str(r.det),
        "weight_paper": frac_str(r.weight_paper),
        "weight_volume": {
            "coefficient": frac_str(r.weight_volume.coefficient),
            "radicand": frac_str(r.weight_volume.radicand),
        },
        "probability": frac_str(prob) if isinstance(prob, Fraction) else str(prob),
        "convention": r.convention.value,
    }


def report_from_dict(d: dict) -> TopologyReport:
    conv = Convention.parse(d["convention"])
    t = parse_newick(d["newick"])
    cls = TopologyClass(t, int(d["simm"]), int(d["labeled_count"]))
    det = parse_frac(d["det"])
    wv = d["weight_volume"]
    prob = parse_frac(d["probability"]) if conv is Convention.PAPER_DET else Decimal(d["probability"])
    return TopologyReport(
        cls,
        det,
        VolumeValue(det, int(d["m"])),
        parse_frac(d["weight_paper"]),
        SqrtRational(parse_frac(wv["coefficient"]), parse_frac(wv["radicand"])),
        prob,
        conv,
    )


def reports_to_json(reports: List[TopologyReport], indent: Optional[int] = 2) -> str:
    return json.dumps([report_to_dict(r) for r in reports], indent=indent)


def reports_from_json(text: str) -> List[TopologyReport]:
    return [report_from_dict(d) for d in json.loads(text)]


REPORT_CSV_FIELDS = ["index", "newick", "simm", "labeled_count", "det", "probability", "convention"]


def reports_to_csv(reports: List[TopologyReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for i, r in enumerate(reports):
        d = report_to_dict(r)
        writer.writerow({"index": i, **{k: d[k] for k in REPORT_CSV_FIELDS[1:]}})
    return buf.getvalue()


# --- simulation results -----------------------------------------------------------------


def simulation_to_json(res: SimulationResult, indent: Optional[int] = 2) -> str:
    return json.dumps(res.to_dict(), indent=indent)


def simulation_from_json(text: str) -> SimulationResult:
    d = json.loads(text)
    d.pop("frequencies", None)
    for key in ("shapes", "counts", "analytic"):
        d[key] = tuple(d[key])
    return SimulationResult(**d)
