import json
import random
from fractions import Fraction

import pytest

from flopdt.checks import random_lattice, random_series
from flopdt.config import parse_config
from flopdt.curves import FlopCurveData
from flopdt.errors import ChamberError, DomainError, ParseError, UsageError
from flopdt.modular import ThetaArgument, default_lattice, eta_series, theta_sum
from flopdt.serialize import (
    parse_fraction,
    render_rows,
    series_from_json,
    series_rows,
    series_to_json,
)


def round_trip(s, label=None):
    back, got_label = series_from_json(series_to_json(s, label))
    assert back == s and back.lattice == s.lattice and back.valid_to == s.valid_to
    assert got_label == label


@pytest.mark.parametrize("seed", range(10))
def test_random_round_trip(seed):
    rng = random.Random(seed)
    lat = random_lattice(rng)
    round_trip(random_series(rng, lat, 3, rational=seed % 2 == 0), "P")


def test_cyclotomic_round_trip():
    e = theta_sum(1, 1, ThetaArgument(twist=Fraction(1, 3)), 3, default_lattice())
    assert not e.is_rational()
    round_trip(e)
    round_trip(eta_series(5))


def test_document_is_exact_and_sorted():
    text = series_to_json(eta_series(3))
    doc = json.loads(text)
    assert doc["valid_to"] == "3/1"
    assert doc["grading_weights"] == {"q": "1/1", "t": []}
    assert [t[0] for t in doc["terms"]] == sorted(t[0] for t in doc["terms"])
    assert "." not in text


@pytest.mark.parametrize(
    "patch,field",
    [
        ({"valid_to": 1.5}, "valid_to"),
        ({"lattice_rank": "1"}, "lattice_rank"),
        ({"terms": [[1, [], ["x"]]]}, "terms[0]"),
        ({"terms": [[1, [2], ["1/1"]]]}, "terms[0]"),
    ],
)
def test_series_parse_errors(patch, field):
    doc = json.loads(series_to_json(eta_series(2)))
    doc.update(patch)
    with pytest.raises(ParseError) as exc:
        series_from_json(json.dumps(doc))
    assert exc.value.field == field


def test_parse_fraction():
    assert parse_fraction("-3/6") == Fraction(-1, 2)
    assert parse_fraction(4) == 4
    for bad in (0.5, True, "1/0", "abc", None):
        with pytest.raises(ParseError):
            parse_fraction(bad)


def test_rows_and_rendering():
    header, rows = series_rows(eta_series(2), float_report=True)
    assert header == ["q", "grade", "coefficient", "approx"]
    assert rows[0] == ["1/24", "1/24", "1", "1"]
    csv_text = render_rows(header, rows, "csv")
    assert csv_text.splitlines()[0] == "q,grade,coefficient,approx"
    table = render_rows(header, rows, "table").splitlines()
    assert len({len(line) for line in table}) == 1


GEOMETRY = """
order = "3"
seed = 5
format = "csv"
[geometry]
l = 2
n = [1, 2]
p_dot_c = -1
[geometry.grading]
w_c = "-1/5"
"""


def test_parse_config_toml_and_json():
    cfg = parse_config(GEOMETRY)
    assert cfg.order == 3 and cfg.seed == 5 and cfg.format == "csv"
    assert cfg.geometry.curve.n == (1, 2) and cfg.geometry.lattice.w_t == (Fraction(-1, 5),)
    js = parse_config(json.dumps({"l": 1, "n": [2], "width": 2, "variant": "euler", "order": "5/2"}))
    assert js.geometry.curve.euler_width() == 2 and js.order == Fraction(5, 2)
    over = parse_config(GEOMETRY, order=Fraction(2), format="json")
    assert over.geometry.order == 2 and over.format == "json"


@pytest.mark.parametrize(
    "text,exc,field",
    [
        ("l = 7\nn = [1,1,1,1,1,1,1]", ParseError, "l"),
        ("l = 2\nn = [1]", ParseError, "n"),
        ("l = 1\nn = [2]\nwidth = 3", ParseError, "width"),
        ("l = 2\nn = [1, 1]\nwidth = 1", ParseError, "width"),
        ("l = 1\nn = [1]\norder = 0.5", ParseError, "order"),
        ("l = 1\nn = [1]\n[grading]\nw_c = 1.0", ParseError, "grading.w_c"),
        ("l = [", ParseError, "document"),
    ],
)
def test_config_errors(text, exc, field):
    with pytest.raises(exc) as info:
        parse_config(text)
    assert info.value.field == field


def test_config_domain_errors():
    with pytest.raises(ChamberError):
        parse_config('l = 2\nn = [1, 1]\n[grading]\nw_c = "-1/2"')
    with pytest.raises(UsageError):
        parse_config('l = 2\nn = [1, 1]\nvariant = "euler"')
    with pytest.raises(UsageError):
        parse_config('format = "xml"')
    with pytest.raises(DomainError):
        FlopCurveData(1, (1,), h_dot_c=0)
