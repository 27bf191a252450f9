import random

import pytest

from pillowbraid.braid import (
    MERSENNE_61, BraidWord, artin_action, artin_equal, braid_equal, burau_equal, burau_eval,
    compose, conjugate, exponent_sum, full_twist, is_left_weighted, matmul_mod, normal_form,
    permutation, random_burau_parameters,
)
from pillowbraid.errors import PillowBraidError


def s(n, *letters):
    return BraidWord(n, tuple(letters))


def random_word(n, length, rng):
    return BraidWord(n, tuple(rng.choice([1, -1]) * rng.randint(1, n - 1) for _ in range(length)))


def test_generator_index_bounds():
    with pytest.raises(PillowBraidError):
        BraidWord(3, (3,))
    with pytest.raises(PillowBraidError):
        BraidWord(3, (0,))
    assert BraidWord(3, ()).is_identity_word()


def test_compose_cancels_and_concatenates():
    assert compose([s(3, 1), s(3, -1)]).letters == ()
    assert compose([s(3, 1), s(3, 2)]).letters == (1, 2)


def test_compose_rejects_mixed_ambients():
    with pytest.raises(PillowBraidError):
        compose([s(3, 1), s(4, 1)])


def test_conjugate_literal():
    assert conjugate(s(3, 1), s(3, 2)).letters == (-2, 1, 2)
    assert conjugate(s(3, 1, 2), BraidWord.identity(3)).letters == (1, 2)


def test_conjugation_keeps_exponent_sum():
    rng = random.Random(5)
    for _ in range(20):
        g, h = random_word(5, 9, rng), random_word(5, 7, rng)
        assert exponent_sum(conjugate(g, h)) == exponent_sum(g)


def test_normal_form_braid_relation():
    assert normal_form(s(3, 1, 2, 1)) == normal_form(s(3, 2, 1, 2))


def test_normal_form_mixed_word():
    nf = normal_form(s(3, 1, -2))
    assert not nf.is_identity()
    assert nf.delta_power < 0


def test_normal_form_full_twist_b3():
    nf = normal_form(full_twist(3))
    assert nf.delta_power == 2 and not nf.canonical_factors


def test_normal_form_left_weighted_and_round_trip():
    rng = random.Random(11)
    for _ in range(25):
        w = random_word(5, 15, rng)
        nf = normal_form(w)
        assert is_left_weighted(nf)
        assert braid_equal(nf.to_word(), w)


def test_artin_action_conventions():
    assert artin_action(BraidWord.identity(3)).images == ((1,), (2,), (3,))
    assert artin_action(s(2, 1)).images == ((1, 2, -1), (1,))
    assert artin_action(s(3, 1, 2, 1)) == artin_action(s(3, 2, 1, 2))


def test_artin_preserves_boundary_word():
    rng = random.Random(3)
    w = random_word(4, 12, rng)
    imgs = artin_action(w).images
    prod = []
    for img in imgs:
        prod.extend(img)
    from pillowbraid.braid import free_reduce
    assert free_reduce(prod) == (1, 2, 3, 4)


def test_two_equality_oracles_agree():
    rng = random.Random(7)
    for _ in range(30):
        u = random_word(4, 10, rng)
        v = u * random_word(4, 6, rng) * random_word(4, 0, rng)
        for w in (u, v):
            assert braid_equal(u, w) == artin_equal(u, w)


def test_permutation_examples():
    assert permutation(s(3, 1)) == (2, 1, 3)
    assert permutation(full_twist(6)) == tuple(range(1, 7))
    z13 = s(3, -1, 2, 1)
    assert permutation(z13 * z13) == (1, 2, 3)


def test_exponent_sums():
    assert exponent_sum(full_twist(48)) == 2256
    assert exponent_sum(full_twist(3)) == 6
    assert exponent_sum(BraidWord.identity(5)) == 0


def test_full_twist_small_cases():
    assert full_twist(1).letters == ()
    assert full_twist(2).letters == (1, 1)


def test_full_twist_is_central_b4():
    d = full_twist(4)
    for i in (1, 2, 3):
        g = BraidWord.sigma(4, i)
        assert normal_form(d * g) == normal_form(g * d)


def test_burau_identity_and_relation():
    t = random_burau_parameters(1, seed=2)[0]
    assert burau_eval(BraidWord.identity(3), t) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert burau_eval(s(3, 1, 2, 1), t) == burau_eval(s(3, 2, 1, 2), t)


def test_burau_full_twist_commutes_with_generators():
    t = random_burau_parameters(1, seed=9)[0]
    d = burau_eval(full_twist(4), t)
    for i in (1, 2, 3):
        g = burau_eval(BraidWord.sigma(4, i), t)
        assert matmul_mod(d, g, MERSENNE_61) == matmul_mod(g, d, MERSENNE_61)


def test_burau_detects_difference():
    assert burau_equal(s(3, 1, 2, 1), s(3, 2, 1, 2))
    assert not burau_equal(s(3, 1, 2), s(3, 2, 1))
