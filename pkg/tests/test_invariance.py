import json

import pytest

from pillowbraid.braid import BraidWord, artin_action, braid_equal, compose, exponent_sum
from pillowbraid.catalog import Factorization, TwistFactor, local_system, phi, phi_sub
from pillowbraid.dataset import load_catalog
from pillowbraid.disk import PunctureSystem, doubled_system
from pillowbraid.errors import InvalidParameterError
from pillowbraid.invariance import (
    Expression, HurwitzMove, InvarianceCertificate, apply_moves, catalog_hints,
    certify_invariance, check_disjoint_commutation, conjugate_factorization, hurwitz_move,
    invariance_lattice, lattice_basis, lattice_intersection, lattice_solve, propagate_classes,
    search_hurwitz_equivalence, six_point_pairs, verify_certificate,
)
from pillowbraid.local import ff_lines
from pillowbraid.regeneration import RegenerationChoice, apply_rule
from pillowbraid.twists import parse_spec
from pillowbraid.vankampen import LINE_CLASSES


def expr(n, *words):
    return Expression(n, tuple(BraidWord(n, tuple(w)) for w in words))


def fact(system, *texts):
    return Factorization(system, tuple(TwistFactor(parse_spec(t), f"t{k}", "t", "test")
                                       for k, t in enumerate(texts)))


# moves ---------------------------------------------------------------------

def test_right_move_formula():
    e = expr(3, (1,), (2,))
    out = hurwitz_move(e, HurwitzMove(1, "right"))
    assert braid_equal(out.factors[0], BraidWord(3, (1, 2, -1)))
    assert out.factors[1].letters == (1,)


def test_move_then_inverse():
    e = expr(4, (1, 2), (-3,), (2, 2))
    m = HurwitzMove(2, "left")
    back = hurwitz_move(hurwitz_move(e, m), m.inverse())
    assert back.key() == e.key()


def test_moves_keep_product():
    e = expr(4, (1,), (2, 3), (-1, 2), (3,))
    moved = apply_moves(e, [HurwitzMove(1, "right"), HurwitzMove(3, "left"), HurwitzMove(2, "right")])
    assert artin_action(moved.product()) == artin_action(e.product())


def test_move_position_checked():
    with pytest.raises(InvalidParameterError):
        HurwitzMove(0, "right")


def test_conjugate_identity_and_sums():
    e = expr(3, (1,), (2, 2))
    assert conjugate_factorization(e, BraidWord.identity(3)).key() == e.key()
    h = BraidWord(3, (2, -1))
    assert [exponent_sum(w) for w in conjugate_factorization(e, h).factors] == [1, 2]


def test_conjugating_specs_keeps_census():
    f = phi(1, local=True)
    g = conjugate_factorization(f, BraidWord(6, (1, 3, -5)))
    assert sorted(exponent_sum(w) for w in g.factors) == sorted(exponent_sum(w) for w in f.compiled())


# search --------------------------------------------------------------------

def test_one_move_witness():
    e = expr(3, (1,), (2,))
    g = hurwitz_move(e, HurwitzMove(1, "right"))
    r = search_hurwitz_equivalence(e, g, 3)
    assert r.status == "witness" and len(r.moves) == 1


def test_different_products_not_equivalent():
    r = search_hurwitz_equivalence(expr(3, (1,), (2,)), expr(3, (2,), (2,)), 3)
    assert r.status == "not_equivalent"


def test_chakiri_toy():
    e = expr(3, (1,), (2,))
    r = search_hurwitz_equivalence(e, conjugate_factorization(e, e.product()), 4)
    assert r.status == "witness" and len(r.moves) <= 4
    assert apply_moves(e, r.moves).key() == conjugate_factorization(e, e.product()).key()


# certificates --------------------------------------------------------------

def test_rule_two_commutation_leaf_normal_form():
    f = fact(PunctureSystem(("1", "2", "2'")), "Z^2{1,2 2'}")
    cert = certify_invariance(f, {2: 1})
    assert cert and verify_certificate(cert, f, "normal_form")


@pytest.mark.parametrize("bar", [False, True])
def test_rule_one_on_regenerated_pair(bar):
    base = parse_spec("Zb{1,2}" if bar else "Z{1,2}")
    specs = apply_rule(base, RegenerationChoice("first"))
    f = Factorization(local_system([1, 2]), tuple(TwistFactor(s, f"r{k}", "r", "test")
                                                   for k, s in enumerate(specs)))
    cert = certify_invariance(f, {1: 1, 2: 1}, partition=[(0, 2)])
    assert cert and cert.kind == "rule" and cert.data["rule"] == 1
    assert verify_certificate(cert, f)


def test_rule_one_fails_without_mark():
    f = fact(local_system([1, 2]), "Z{1,2'}", "Z{1',2}")
    assert not certify_invariance(f, {1: 1, 2: 1}, partition=[(0, 2)])


def test_rule_three_cusp_block():
    f = fact(local_system([1, 2]), "Z^3{1 1',2}")
    cert = certify_invariance(f, {1: -2})
    assert cert and verify_certificate(cert, f)


def test_phi1_local_certificate_and_round_trip():
    f = phi(1, local=True)
    hints = catalog_hints(f)
    cert = certify_invariance(f, {1: 2, 3: -1, 19: 1}, hints=hints)
    assert cert and verify_certificate(cert, f)
    kinds = {c.kind for c in cert.leaves()}
    assert kinds <= {"commutation", "rule", "explicit_hurwitz", "chakiri"}
    again = InvarianceCertificate.from_dict(json.loads(cert.to_json()))
    assert verify_certificate(again, f)


def test_tampered_certificate_rejected():
    f = phi(1, local=True)
    cert = certify_invariance(f, {3: 1}, hints=catalog_hints(f))
    d = json.loads(cert.to_json())

    def bump(node):
        if node["kind"] == "explicit_hurwitz":
            node["data"]["moves"][0][1] = "left" if node["data"]["moves"][0][1] == "right" else "right"
            return True
        return any(bump(c) for c in node["children"])

    assert bump(d)
    assert not verify_certificate(InvarianceCertificate.from_dict(d), f)


def test_three_point_lattice_is_full():
    f = phi(3, local=True)
    basis = invariance_lattice(f, hints=catalog_hints(f))
    assert lattice_basis(basis) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def test_ff_pair_rho_step():
    cat = load_catalog()
    lines = ff_lines(cat["phi"]["2"])
    sub = phi_sub(2, "FF*", cat)
    f = Factorization(local_system(lines), sub.factors)
    n = len(f) // 2
    lat = invariance_lattice(f, partition=[(0, 2 * n)])
    # rho moves lines 13 and 20 once: the block-swap certificate must deliver it
    assert lattice_solve(lat, (0, 0, 1, 1)) is not None
    cert = certify_invariance(f, {13: 1, 20: 1}, partition=[(0, 2 * n)])
    assert cert and verify_certificate(cert, f)
    assert any(c.kind == "block_swap" for c in _walk(cert))


def _walk(cert):
    yield cert
    for c in cert.children:
        yield from _walk(c)


# lattices ------------------------------------------------------------------

def test_lattice_helpers():
    assert lattice_solve([(2, 0), (0, 3)], (4, 3)) == [2, 1]
    assert lattice_solve([(2, 0)], (1, 0)) is None
    inter = lattice_intersection([[(1, 0), (0, 2)], [(2, 0), (0, 1)]], 2)
    assert sorted(lattice_basis(inter)) == [(0, 2), (2, 0)]


# disjointness and classes ---------------------------------------------------

def test_disjoint_commutation_examples():
    system = doubled_system(4)
    assert check_disjoint_commutation(parse_spec("Z{1,1'}"), parse_spec("Z{2,2'}"), system)
    assert not check_disjoint_commutation(parse_spec("Z{1,2}"), parse_spec("Z{2,3}"), system)
    interleaved = check_disjoint_commutation(parse_spec("Z{1,3}"), parse_spec("Z{2,4}"), system)
    assert not interleaved.disjoint and not interleaved.commute


def test_six_point_pairs():
    assert six_point_pairs(5) == {"horizontal": (16, 22), "vertical": (6, 11), "diagonal": (5, 9)}
    with pytest.raises(InvalidParameterError):
        six_point_pairs(1)


def test_class_propagation_matches_listed_classes():
    assert set(propagate_classes()) == set(LINE_CLASSES)
