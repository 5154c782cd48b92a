import json
from fractions import Fraction as F

import pytest

from minfill import DistanceMatrix, DomainError, WeightDistribution, apply_T, topology_probabilities
from minfill import formats
from minfill.oracle import OracleConfig, simulate_class_frequencies


def test_frac_helpers():
    assert formats.frac_str(F(6, 4)) == "3/2"
    assert formats.parse_frac(" 3/9 ") == F(1, 3)
    assert formats.parse_frac("0.25") == F(1, 4)
    with pytest.raises(DomainError):
        formats.parse_frac("x")
    with pytest.raises(DomainError):
        formats.parse_frac("1/0")


@pytest.mark.parametrize(
    "value, text",
    [
        (F(1, 2 * 5**12), "1/2 * 5^-12"),
        (F(4, 9 * 5**12), "4/9 * 5^-12"),
        (F(3, 7), "3/7"),
        (F(0), "0"),
        (F(2**10), "1 * 2^10"),
    ],
)
def test_format_factored(value, text):
    assert formats.format_factored(value) == text


def test_topology_and_weights(caterpillar):
    d = formats.topology_to_dict(caterpillar)
    assert formats.topology_from_dict(json.loads(json.dumps(d))) == caterpillar
    w = WeightDistribution(caterpillar, [F(i, 3) for i in range(9)])
    assert formats.weights_from_dict(formats.weights_to_dict(w)) == w
    with pytest.raises(DomainError):
        formats.topology_from_dict({"n": 3})


def test_distance_round_trips(snowflake):
    rho = apply_T(snowflake, [F(i + 1, 7) for i in range(9)])
    assert formats.distance_from_csv(formats.distance_to_csv(rho)) == rho
    assert formats.read_distance(json.dumps(formats.distance_to_dict(rho))) == rho
    square = "\n".join(",".join(str(x) for x in row) for row in rho.to_square())
    assert formats.read_distance(square) == rho
    assert formats.read_distance(json.dumps({"matrix": [[str(x) for x in r] for r in rho.to_square()]})) == rho


def test_distance_errors():
    with pytest.raises(DomainError):
        formats.read_distance("")
    with pytest.raises(DomainError):
        formats.read_distance("3\n1,2\n1,2\n")
    with pytest.raises(DomainError):
        formats.read_distance("{bad json")
    with pytest.raises(DomainError):
        formats.read_distance('{"n": 3}')
    assert formats.read_distance("3\n1,2\n3\n") == DistanceMatrix(3, (1, 2, 3))


@pytest.mark.parametrize("conv", ["paper-det", "volume"])
def test_report_round_trip(conv):
    reports = topology_probabilities(7, conv)
    back = formats.reports_from_json(formats.reports_to_json(reports))
    assert [r.probability for r in back] == [r.probability for r in reports]
    assert [r.det for r in back] == [r.det for r in reports]
    assert [r.weight_volume for r in back] == [r.weight_volume for r in reports]
    csv_text = formats.reports_to_csv(reports)
    lines = csv_text.strip().splitlines()
    assert lines[0].split(",") == formats.REPORT_CSV_FIELDS
    assert len(lines) == 3 and lines[1].startswith("0,")


def test_simulation_round_trip():
    res = simulate_class_frequencies(5, cfg=OracleConfig(samples=50, round_trip_stride=25))
    assert formats.simulation_from_json(formats.simulation_to_json(res)) == res
