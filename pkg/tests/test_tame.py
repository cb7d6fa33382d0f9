import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from galdef.errors import InvalidParameters
from galdef.tame import FiniteGroup, make_group

PAIRS = [(5, 2), (5, 6), (7, 3), (11, 2)]


@pytest.mark.parametrize("ell,q", PAIRS)
def test_order_and_exponent(ell, q):
    G = make_group(ell, q)
    q0 = q % ell
    ordq = next(k for k in range(1, ell) if pow(q0, k, ell) == 1)
    assert G.m == ell * ordq
    assert G.order == G.m * ell


@pytest.mark.parametrize("ell,q", PAIRS)
def test_defining_relations(ell, q):
    G = make_group(ell, q)
    F, tau = G.F, G.tau
    assert F * tau * F.inverse() == tau ** G.q
    assert tau**ell == G.one
    assert F**G.m == G.one


def test_product_law_matches_normal_form():
    G = make_group(5, 2)
    g, h = G.element(2, 3), G.element(3, 4)
    # (i1, a)(i2, b) = (i1 + i2, a q^-i2 + b)
    assert g * h == G.element(5, 3 * pow(3, 3, 5) + 4)


def test_q_is_reduced_mod_ell():
    G = make_group(5, 6)
    assert G.q == 1 and G.is_abelian and G.order == 25


@pytest.mark.parametrize("ell,q", [(4, 2), (5, 10), (3, 2), (2, 1)])
def test_invalid_parameters(ell, q):
    with pytest.raises(InvalidParameters):
        make_group(ell, q)


def test_table_is_a_group_table():
    G = make_group(5, 2).finite
    T = G.table
    n = G.order
    assert all(sorted(T[g]) == list(range(n)) for g in range(n))
    assert np.array_equal(T[G.identity], np.arange(n))
    idx = np.arange(n)
    assert np.array_equal(T[idx, G.inverse], np.full(n, G.identity))


def test_table_associative_exhaustively_on_small_group():
    T = make_group(5, 2).finite.table
    lhs = T[T[:, :, None], np.arange(100)[None, None, :]]
    rhs = T[np.arange(100)[:, None, None], T[None, :, :]]
    assert np.array_equal(lhs, rhs)


@given(st.sampled_from(PAIRS), st.data())
def test_table_agrees_with_element_product(pair, data):
    G = make_group(*pair)
    gi = data.draw(st.integers(0, G.order - 1))
    hi = data.draw(st.integers(0, G.order - 1))
    els = G.enumerate()
    assert G.finite.table[gi, hi] == (els[gi] * els[hi]).index


@given(st.sampled_from(PAIRS), st.integers(), st.integers(), st.integers(-40, 40))
def test_power_and_inverse(pair, i, ip, n):
    G = make_group(*pair)
    g = G.element(i, ip)
    assert g * g.inverse() == G.one
    assert g**n * g ** (-n) == G.one


def test_lazy_table_not_built_for_generator_work():
    G = make_group(23, 2)
    fg = G.finite
    assert "table" not in fg.__dict__
    assert fg.order == 23 * 23 * 11
    assert len(fg.relations) == 3


def test_bfs_words_cover_group():
    G = make_group(7, 3).finite
    words = list(G.bfs_words())
    assert len(words) == G.order - 1
    for g, s, h in words:
        assert G.table[s, h] == g


def test_inertia_subgroup_is_cyclic_of_order_ell():
    G = make_group(7, 3)
    sub, emb = G.inertia_subgroup()
    assert sub.order == 7
    assert set(emb.tolist()) == {G.element(0, k).index for k in range(7)}


def test_finite_group_requires_table_or_builder():
    with pytest.raises(InvalidParameters):
        FiniteGroup()


def test_subgroup_embedding_respects_products():
    G = make_group(5, 2).finite
    sub, emb = G.subgroup([G.generators[0]])
    for a, b in itertools.product(range(sub.order), repeat=2):
        assert emb[sub.table[a, b]] == G.table[emb[a], emb[b]]
