import json

import pytest

from pillowbraid.braid import burau_equal, compose_permutations, exponent_sum, full_twist, permutation
from pillowbraid.catalog import (
    _pure_or_pairing, assemble_delta48, audit, local_system, parasitic, phi, phi_sub,
)
from pillowbraid.dataset import load_catalog
from pillowbraid.disk import doubled_system
from pillowbraid.errors import InvalidParameterError
from pillowbraid.local import check_ff, check_phi, ff_lines, local_checks
from pillowbraid.twists import format_spec, relabel


@pytest.fixture(scope="module")
def cat():
    return load_catalog()


@pytest.fixture(scope="module")
def total(cat):
    return assemble_delta48(cat)


def test_three_point_degree(cat):
    for m in (1, 3, 6, 8):
        f = phi(m, cat)
        assert f.degree() == 27 == exponent_sum(f.word())
        assert f.census() == {"cusp": 6, "node": 0, "branch": 9}


def test_phi3_is_phi1_relabelled(cat):
    mapping = {"1": "2", "3": "6", "19": "14"}
    want = [format_spec(relabel(x.spec, mapping)) for x in phi(1, cat)]
    assert [format_spec(x.spec) for x in phi(3, cat)] == want


def test_six_point_counts(cat):
    for m in (2, 4, 5, 7, 9, 10):
        f, ff = phi(m, cat), phi_sub(m, "FF*", cat)
        assert f.degree() == 126
        assert ff.degree() == 48
        outside = {k: f.census()[k] - ff.census()[k] for k in ff.census()}
        assert outside == {"cusp": 12, "node": 20, "branch": 2}


def test_phi_kind_checks(cat):
    from pillowbraid.catalog import phi_3point, phi_6point
    with pytest.raises(InvalidParameterError):
        phi_3point(2, cat)
    with pytest.raises(InvalidParameterError):
        phi_6point(1, cat)


def test_assembly_totals(total):
    sub = {}
    for x in total:
        sub[x.group] = sub.get(x.group, 0) + x.degree
    assert sub == {"three_point": 108, "six_point": 756, "parasitic": 1392}
    assert total.census() == {"cusp": 168, "node": 840, "branch": 72}
    c = total.census()
    assert 3 * c["cusp"] + 2 * c["node"] + c["branch"] == 2256


def test_audit_degree_and_census(total):
    r = audit(total, "census")
    assert r.passed and r.degree_total == 2256
    assert "2256 = 108 + 756 + 1392" in r.to_text()
    assert json.loads(r.to_json())["passed"] is True


def test_parasitic_permutation_is_identity(cat):
    system = doubled_system(24)
    for j in range(1, 11):
        p = tuple(range(1, 49))
        for w in parasitic(j, catalog=cat, system=system).compiled():
            p = compose_permutations(p, permutation(w))
        assert p == tuple(range(1, 49))


def test_phi_blocks_pure_or_pairing(cat):
    for m in range(1, 11):
        f = phi(m, cat, local=True)
        p = permutation(f.word())
        assert _pure_or_pairing(p, f.ambient)
        # odd degree: never the identity on its own
        assert p != tuple(range(1, f.ambient.count + 1))


def test_pure_or_pairing_rejects_other_swaps():
    system = local_system([1, 2])
    assert _pure_or_pairing((2, 1, 4, 3), system)
    assert not _pure_or_pairing((3, 2, 1, 4), system)


def test_full_twist_self_comparison():
    assert burau_equal(full_twist(48), full_twist(48))


def test_local_identities_status(cat):
    # the FF* products all match their local identity; whole-block status is recorded
    assert all(check_ff(m, cat)["ok"] for m in (2, 4, 5, 7, 9, 10))
    ok = {m for m in range(1, 11) if check_phi(m, cat)["ok"]}
    assert ok == {1, 3, 5, 6, 8}


def test_ff_lines(cat):
    assert ff_lines(cat["phi"]["2"]) == [1, 2, 13, 20]
    assert ff_lines(cat["phi"]["5"]) == [6, 11, 16, 22]


def test_local_checks_order(cat):
    names = [c["block"] for c in local_checks(cat)]
    assert names[:3] == ["phi1", "phi2:FF*", "phi2"]
    assert len(names) == 16


def test_unknown_audit_level(total):
    with pytest.raises(InvalidParameterError):
        audit(total, "bogus")
