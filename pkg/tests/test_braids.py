"""Artin action and the pure-braid relation families, decided exactly."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcs.braids import (
    BraidError,
    abelianized,
    acts_equally,
    alpha_word,
    artin_act,
    braid_invert,
    braid_mul,
    delta_k,
    dk_abelianization_trivial,
    dk_equals_delta_squared,
    free_reduce,
    garside_Dk,
    garside_Dk_braid,
    generator,
    invert_word,
    mul,
    verify_yb3,
    verify_yb4,
    word,
)


def random_free_word(r, n, length=12):
    return free_reduce([(int(r.integers(1, n + 1)), int(r.choice((-1, 1))))
                        for _ in range(length)])


def random_braid(r, n, length=8):
    return tuple((int(r.integers(1, n)), int(r.choice((-1, 1)))) for _ in range(length))


# ---------------------------------------------------------------------------
# free words

@given(st.lists(st.tuples(st.integers(1, 4), st.sampled_from((-1, 1))), max_size=40))
@settings(max_examples=200, deadline=None)
def test_free_reduce_is_idempotent_and_reduced(letters):
    w = free_reduce(letters)
    assert free_reduce(w) == w
    for (g1, e1), (g2, e2) in zip(w, w[1:]):
        assert not (g1 == g2 and e1 == -e2)


@given(st.lists(st.tuples(st.integers(1, 4), st.sampled_from((-1, 1))), max_size=20))
@settings(max_examples=200, deadline=None)
def test_word_times_inverse_cancels(letters):
    w = free_reduce(letters)
    assert mul(w, invert_word(w)) == ()


# ---------------------------------------------------------------------------
# the Artin action

def test_sigma_action_definition():
    assert artin_act(((1, 1),), generator(1), 2) == word((1, 1), (2, 1), (1, -1))
    assert artin_act(((1, 1),), generator(2), 2) == generator(1)
    assert artin_act(((1, 1),), generator(3), 4) == generator(3)


def test_sigma_inverse_action():
    r = np.random.default_rng(2)
    for _ in range(100):
        n = int(r.integers(2, 7))
        w = random_free_word(r, n)
        b = random_braid(r, n, 1)
        assert artin_act(braid_mul(b, braid_invert(b)), w, n) == w


def test_action_respects_composition():
    r = np.random.default_rng(3)
    for _ in range(1000):
        n = int(r.integers(2, 7))
        b1, b2 = random_braid(r, n, 5), random_braid(r, n, 5)
        w = random_free_word(r, n)
        assert artin_act(braid_mul(b1, b2), w, n) == artin_act(b1, artin_act(b2, w, n), n)


def test_pure_generator_fixes_later_strands():
    assert artin_act(alpha_word(1, 2), generator(3), 3) == generator(3)
    for n in range(3, 7):
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                for g in range(1, n + 1):
                    if g < i or g > j:
                        assert artin_act(alpha_word(i, j), generator(g), n) == generator(g)


def test_pure_generator_abelianized_action_is_identity():
    # linking behavior: every image abelianizes back to the same generator
    for n in range(2, 7):
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                for g in range(1, n + 1):
                    img = artin_act(alpha_word(i, j), generator(g), n)
                    assert abelianized(img, n) == abelianized(generator(g), n)


def test_pure_generators_fix_the_full_product():
    for n in range(2, 7):
        prod = mul(*[generator(g) for g in range(1, n + 1)])
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                assert artin_act(alpha_word(i, j), prod, n) == prod


def test_index_guards():
    with pytest.raises(BraidError):
        artin_act(((5, 1),), generator(1), 3)
    with pytest.raises(BraidError):
        alpha_word(3, 2)
    with pytest.raises(BraidError):
        artin_act(((1, 1),), generator(1), 99)


# ---------------------------------------------------------------------------
# relation families

@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_yb3_exhaustive(n):
    rep = verify_yb3(n)
    assert rep.ok
    assert rep.tuples_checked == len(list(__import__("itertools").combinations(range(n), 3)))


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_yb4_exhaustive(n):
    rep = verify_yb4(n)
    assert rep.ok
    expected = 0 if n < 4 else len(list(__import__("itertools").combinations(range(n), 4)))
    assert rep.tuples_checked == expected


def test_yb3_smallest_case_counts():
    rep = verify_yb3(3)
    assert rep.tuples_checked == 1 and rep.identities_checked == 2


def test_corrupted_triple_relation_fails():
    # swap one index: a_12 a_13 a_23 vs a_13 a_23 a_13 acts differently
    lhs = braid_mul(alpha_word(1, 2), alpha_word(1, 3), alpha_word(2, 3))
    rhs = braid_mul(alpha_word(1, 3), alpha_word(2, 3), alpha_word(1, 3))
    assert not acts_equally(lhs, rhs, 3)


def test_corrupted_commutation_fails():
    # [a_13, a_23] is not trivial: i<j<k<l is essential in the fourth family
    from dcs.braids import _commutator

    assert not all(
        artin_act(_commutator(alpha_word(1, 3), alpha_word(2, 3)), generator(g), 3) == generator(g)
        for g in range(1, 4)
    )


# ---------------------------------------------------------------------------
# the full twist

def test_full_twist_word_shape():
    assert garside_Dk(2) == [(1, 2)]
    assert garside_Dk(3) == [(1, 2), (1, 3), (2, 3)]
    for k in range(2, 7):
        assert len(garside_Dk(k)) == k * (k - 1) // 2


def test_full_twist_abelianization():
    for k in range(2, 7):
        assert dk_abelianization_trivial(k)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_full_twist_is_squared_half_twist(k):
    assert dk_equals_delta_squared(k)


def test_delta_word_length():
    for k in range(2, 7):
        assert len(delta_k(k)) == k * (k - 1) // 2


def test_full_twist_central_for_small_k():
    # D_k commutes with every generator braid (it is central), exact check
    for k in range(2, 5):
        dk = garside_Dk_braid(k)
        for i in range(1, k):
            lhs = braid_mul(dk, ((i, 1),))
            rhs = braid_mul(((i, 1),), dk)
            assert acts_equally(lhs, rhs, k)
