import random

import pytest

from pillowbraid.braid import BraidWord, braid_equal, compose, conjugate, exponent_sum, permutation
from pillowbraid.disk import Arc, PunctureSystem, base_system, double_system, transport
from pillowbraid.errors import MalformedSpecError
from pillowbraid.twists import (
    LanePath, TwistSpec, _arc_points, apply_braid_to_path, block, block_twist_word, compile_halftwist,
    compile_spec, expand_all, expand_macro, format_spec, parse_spec, render_path, same_path, simple,
)

S3 = base_system(3)
S4 = double_system(base_system(2))  # 1 1' 2 2'


def test_adjacent_direct_path_is_generator():
    assert compile_halftwist(simple("2", "3"), base_system(4)).letters == (2,)


def test_long_path_is_conjugate_of_sigma2():
    w = compile_halftwist(simple("1", "3"), S3)
    assert permutation(w) == (3, 2, 1)
    assert exponent_sum(w) == 1
    assert any(braid_equal(w, conjugate(BraidWord.sigma(3, 2), BraidWord.sigma(3, 1, e))) for e in (1, -1))


def test_half_twist_matches_transport_of_straight_path():
    # image of the straight (2,3) path under sigma_1^-1 is z_13 below 2
    img = apply_braid_to_path(LanePath("2", "3"), BraidWord.sigma(3, 1, -1), S3)
    w = compile_halftwist(simple("1", "3"), S3)
    assert same_path(img, LanePath("1", "3"), S3)
    assert braid_equal(w, conjugate(BraidWord.sigma(3, 2), BraidWord.sigma(3, 1, -1)))


def test_marked_above_equals_bar():
    assert braid_equal(compile_spec(simple("1", "3", marked=("2",)), S3),
                       compile_spec(simple("1", "3", bar=True), S3))


def test_transport_agrees_with_conjugation():
    rng = random.Random(4)
    system = base_system(5)
    for _ in range(20):
        a, b = sorted(rng.sample(range(1, 6), 2))
        above = [str(m) for m in range(a + 1, b) if rng.random() < 0.5]
        path = LanePath(str(a), str(b), marked=tuple(above))
        w = BraidWord(5, tuple(rng.choice((1, -1)) * rng.randint(1, 4) for _ in range(6)))
        img = apply_braid_to_path(path, w, system)
        lhs = compile_halftwist(TwistSpec(img, 1), system)
        rhs = conjugate(compile_halftwist(TwistSpec(path, 1), system), w)
        assert braid_equal(lhs, rhs)


def test_node_block_expansion_order():
    out = expand_macro(block(("1", "1'"), ("2",), 2))
    assert [format_spec(s) for s in out] == ["Z^2{1',2}", "Z^2{1,2}"]


def test_cusp_macro_triple():
    spec = block(("1",), ("2", "2'"), 3)
    out = expand_all(spec, S4)
    assert len(out) == 3
    assert sum(exponent_sum(compile_halftwist(s, S4)) for s in out) == 9


def test_double_block_expands_to_four_nodes():
    spec = block(("1", "1'"), ("2", "2'"), 2)
    out = expand_all(spec, S4)
    assert len(out) == 4 and all(s.is_simple and s.epsilon == 2 for s in out)
    assert braid_equal(compile_spec(spec, S4), block_twist_word(spec, S4))


def test_macro_on_branch_rejected():
    with pytest.raises(MalformedSpecError):
        expand_macro(block(("1", "1'"), ("2",), 1))


def test_parse_format_round_trip():
    for text in ["Z{1,3}(1')", "Zb^-2{1',2 2'}", "Z^2{6',11'} @ [Z^2{11',16 16'} Z^2{6',11}]", "Z^3{3 3',19}"]:
        assert format_spec(parse_spec(text)) == text


def test_parse_rejects_garbage():
    with pytest.raises(MalformedSpecError):
        parse_spec("Z{1,}")


def test_render_direct_path_stays_on_or_below_axis():
    arc = LanePath("3", "4").to_arc(base_system(5))
    assert all(y <= 0 for _, y in _arc_points(arc))


def test_render_conjugated_path_loops_above():
    system = base_system(5)
    path = LanePath("3", "4").conjugated(simple("1", "3", 2, bar=True))
    assert any(y > 0 for _, y in _arc_points(path.to_arc(system)))


def test_render_is_deterministic_and_svg():
    system = base_system(5)
    paths = [LanePath("1", "2"), LanePath("4", "5")]
    a, b = render_path(paths, system, "t"), render_path(paths, system, "t")
    assert a == b and a.startswith("<svg") and a.count("<path") == 2


def test_double_system_order():
    d = double_system(base_system(24))
    assert d.count == 48
    assert d.position("1") == 1 and d.position("1'") == 2
    assert d.position("3'") < d.position("4")


def test_arc_coset_representative():
    a = Arc.make(4, 2, 3, (2, 2, -1, 3))
    assert a.word == (-1,)
    assert transport(a, BraidWord.identity(4)) == a
