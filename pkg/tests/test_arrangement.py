from itertools import combinations

import pytest

from pillowbraid.arrangement import (
    build_Ctilde, build_Dt, build_pillow, ctilde_lines, disjoint_pairs,
)
from pillowbraid.braid import exponent_sum
from pillowbraid.catalog import parasitic
from pillowbraid.dataset import dump_catalog, load_catalog, validate_catalog
from pillowbraid.disk import doubled_system
from pillowbraid.errors import CatalogError, InvalidParameterError
from pillowbraid.regeneration import RegenerationChoice, apply_rule, build_Ci, regenerated_Dt
from pillowbraid.twists import compile_spec, expand_all, format_spec, parse_spec


@pytest.fixture(scope="module")
def cat():
    return load_catalog()


@pytest.fixture(scope="module")
def arr(cat):
    return build_pillow(cat)


def test_vertex_incidence(arr):
    assert len(arr.lines) == 24
    assert arr.three_points() == [1, 3, 6, 8]
    assert arr.six_points() == [2, 4, 5, 7, 9, 10]
    for v in arr.three_points():
        assert len(arr.lines_at(v)) == 3
    for v in arr.six_points():
        assert len(arr.lines_at(v)) == 6


def test_named_vertices(arr):
    assert arr.lines_at(1) == [1, 3, 19]
    assert arr.lines_at(8) == [11, 12, 24]


def test_two_lines_share_at_most_one_vertex(arr):
    for p, t in combinations(range(1, 25), 2):
        shared = [v for v in range(1, 11) if p in arr.lines_at(v) and t in arr.lines_at(v)]
        assert len(shared) <= 1


def test_disjoint_pairs_brute_force(arr, cat):
    table = disjoint_pairs(arr)
    meeting = sum(len(list(combinations(arr.lines_at(v), 2))) for v in range(1, 11))
    assert meeting == 4 * 3 + 6 * 15 == 102
    assert len(table) == 276 - meeting == 174
    from_tables = {(p, int(t)) for t, rec in cat["degenerate_Dt"].items() for p in rec["indices"]}
    assert from_tables == set(table.pairs)
    assert (2, 3) in table and (1, 3) not in table


def test_degenerate_dt_examples(arr, cat):
    assert build_Dt(arr, 1, cat) == []
    assert [format_spec(s) for s in build_Dt(arr, 5, cat)] == ["Zb^2{3,5}"]
    assert [s.path.endpoint_a for s in build_Dt(arr, 7, cat)] == ["1", "2", "5", "6"]


def test_ctilde_groups(arr, cat):
    assert ctilde_lines(arr, 1) == [1, 3, 19]
    assert ctilde_lines(arr, 9) == ctilde_lines(arr, 10) == []
    assert ctilde_lines(arr, 8) == [24]
    assert build_Ctilde(arr, 9, cat) == []


def test_regenerated_dt_examples(cat):
    assert [format_spec(s) for s in regenerated_Dt(3, cat)] == ["Z^2{2 2',3 3'}"]
    assert [format_spec(s) for s in regenerated_Dt(5, cat)] == ["Z^2{3 3',5 5'}"]


def test_parasitic_nodes(arr, cat):
    system = doubled_system(24)
    simple_nodes = sum(len(expand_all(s, system)) for j in range(1, 11) for s in build_Ci(j, arr, cat))
    assert simple_nodes == 696
    assert build_Ci(9, arr, cat) == build_Ci(10, arr, cat) == []
    total = sum(exponent_sum(compile_spec(s, system)) for j in range(1, 11) for s in build_Ci(j, arr, cat))
    assert total == 1392


def test_c1_covers_d1_d3_d19(arr, cat):
    got = [format_spec(s) for s in build_Ci(1, arr, cat)]
    want = [format_spec(s) for t in (1, 3, 19) for s in regenerated_Dt(t, cat)]
    assert got == want
    assert parasitic(1, arr, cat).census() == {"cusp": 0, "node": 4 * len(want), "branch": 0}


def test_rule_examples():
    first = apply_rule(parse_spec("Z{1,9}"), RegenerationChoice("first"))
    assert [(s.path.endpoint_a, s.path.endpoint_b) for s in first] == [("1", "9'"), ("1'", "9")]
    second = apply_rule(parse_spec("Z^2{2,3}"), RegenerationChoice("second", "ii'_jj'"))
    assert [format_spec(s) for s in second] == ["Z^2{2 2',3 3'}"]
    third = apply_rule(parse_spec("Z^4{3,19}"), RegenerationChoice("third", "ii'_j"))
    assert [format_spec(s) for s in third] == ["Z^3{3 3',19}"]


def test_rule_choice_validation():
    with pytest.raises(InvalidParameterError):
        RegenerationChoice("third", "ii'_jj'")
    with pytest.raises(InvalidParameterError):
        RegenerationChoice("fourth")


def test_catalog_round_trip(cat):
    import json
    assert json.loads(dump_catalog(cat)) == cat
    assert dump_catalog(json.loads(dump_catalog(cat))) == dump_catalog(cat)


def test_catalog_schema_rejects_broken_reference(cat):
    import copy
    bad = copy.deepcopy(cat)
    bad["regenerated_Dt"].pop("5")
    with pytest.raises(CatalogError):
        validate_catalog(bad)
    bad = copy.deepcopy(cat)
    bad["schema_version"] = "x"
    with pytest.raises(CatalogError):
        validate_catalog(bad)
