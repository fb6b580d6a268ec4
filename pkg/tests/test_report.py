from __future__ import annotations

import json
from fractions import Fraction

import pytest

from monoclt.errors import CapacityError, UndefinedStatisticError
from monoclt.joins import census
from monoclt.report import (
    assemble_report,
    clt_ratio,
    clt_ratio_exact,
    dumps,
    fourth_gap,
    report_fields,
    report_json,
)
from monoclt.simulate import simulate

from conftest import index

SCHEMA = [
    "host", "pattern", "c", "copies", "pair2_tuples", "q4_tuples", "good_tuples", "mean_T",
    "variance_T", "fourth_moment_Z", "fourth_gap", "clt_ratio", "clt_ratio_pow", "sandwich",
    "upsilon", "ks_distance", "samples", "seed",
]


@pytest.mark.parametrize("m", [1, 3, 10])
def test_ratio_disjoint_triangles(m):
    rep = census(index("triangle", f"union:complete:3x{m}"))
    assert clt_ratio_exact(rep) == Fraction(1, m)
    assert clt_ratio(rep) == 1 / m


def test_ratio_complete4(k4_triangles):
    assert clt_ratio_exact(census(k4_triangles)) == 1


def test_ratio_undefined_without_copies():
    with pytest.raises(UndefinedStatisticError):
        clt_ratio(census(index("triangle", "path:4")))


def test_fourth_gap_examples():
    assert fourth_gap(index("triangle", "complete:3"), 2).gap == Fraction(-2, 3)
    g50 = fourth_gap(index("triangle", "union:complete:3x50"), 2)
    assert g50.gap == Fraction(-1, 75) and g50.negative
    g20 = fourth_gap(index("triangle", "union:complete:3x20"), 30)
    g40 = fourth_gap(index("triangle", "union:complete:3x40"), 30)
    assert g20.gap > 0 and g40.gap > 0 and g20.large_c
    assert g40.gap == g20.gap / 2


def test_fourth_gap_methods_agree():
    idx = index("cherry", "complete:6")
    assert fourth_gap(idx, 2, "identity").gap == fourth_gap(idx, 2, "brute").gap


def test_fourth_gap_fallback_to_enumeration():
    idx = index("cherry", "complete:7")
    auto = fourth_gap(idx, 2, "auto", max_steps=1000)
    assert auto.method == "brute"
    assert auto.gap == fourth_gap(idx, 2, "identity").gap
    with pytest.raises(CapacityError):
        fourth_gap(idx, 2, "identity", max_steps=1000)


def test_sandwich_complete4(k4_triangles):
    rep = assemble_report(k4_triangles, 2)
    assert (rep.sandwich_low, rep.sandwich_high) == (1, 4)
    assert rep.sandwich_low <= rep.variance_T <= rep.sandwich_high


def test_report_with_simulation():
    idx = index("triangle", "union:complete:3x20")
    sim = simulate(idx, 2, 2000, seed=9)
    rep = assemble_report(idx, 2, sim=sim, host="union:complete:3x20")
    assert rep.ratio == 1 / 20
    assert rep.ks_distance == sim.ks_distance
    assert (rep.samples, rep.seed) == (2000, 9)


def test_json_schema_order_and_formats(k4_triangles):
    text = report_json(assemble_report(k4_triangles, 2, host="complete:4"))
    data = json.loads(text)
    assert list(data)[: len(SCHEMA)] == SCHEMA
    assert data["mean_T"] == "1/1"
    assert data["variance_T"] == "3/2"
    assert data["sandwich"] == ["1/1", "4/1"]
    assert data["ks_distance"] is None


def test_json_is_deterministic():
    idx = index("triangle", "union:complete:3x5")
    a = report_json(assemble_report(idx, 2, sim=simulate(idx, 2, 5000, 1), host="x"))
    b = report_json(assemble_report(idx, 2, sim=simulate(idx, 2, 5000, 1, workers=3), host="x"))
    assert a == b


def test_float_formatting():
    assert dumps({"x": 0.1}) == '{\n  "x": 0.10000000000000001\n}'
    assert dumps([1.0, Fraction(-2, 3), None, True]) == '[1.0, "-2/3", null, true]'


def test_census_overflow_leaves_ratio_empty():
    idx = index("cherry", "complete:9")
    rep = assemble_report(idx, 2, max_steps=1000)
    fields = report_fields(rep)
    assert fields["good_tuples"] is None and fields["clt_ratio"] is None
    assert fields["fourth_method"] == "brute"
