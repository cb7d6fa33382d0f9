import numpy as np
import pytest
from hypothesis import given, strategies as st

from galdef.errors import InvalidParameters
from galdef.modules import (AD0_BASIS, AD_BASIS, ResidualFrobenius, adjoint_action, build_adjoint,
                            coords_to_matrix, fixed_space, lattice_act, matrix_to_coords, mu_module,
                            trivial_module, GaloisModule)
from galdef.tame import make_group


def test_frobenius_ratio_and_level_raising():
    frob = ResidualFrobenius(5, 2, 4, 2)
    assert frob.ratio == 2 and frob.is_level_raising()
    assert not ResidualFrobenius(5, 2, 1, 1).is_level_raising()
    with pytest.raises(InvalidParameters):
        ResidualFrobenius(5, 2, 5, 1)


def test_coordinates_round_trip():
    rng = np.random.default_rng(0)
    for basis in (AD0_BASIS, AD_BASIS):
        x = rng.integers(0, 7, size=(10, len(basis)))
        assert np.array_equal(matrix_to_coords(coords_to_matrix(x, basis, 7), basis, 7), x)


def test_adjoint_action_is_conjugation():
    rho = np.array([[2, 1], [0, 3]])
    A = adjoint_action(rho, AD_BASIS, 7)
    X = np.array([[1, 4], [5, 6]])
    x = matrix_to_coords(X, AD_BASIS, 7)
    rho_inv = np.array([[4, 1], [0, 5]])  # inverse of rho mod 7
    assert np.array_equal(rho @ rho_inv % 7, np.eye(2, dtype=int))
    expected = matrix_to_coords(rho @ X @ rho_inv % 7, AD_BASIS, 7)
    assert np.array_equal(A @ x % 7, expected)


@pytest.mark.parametrize("twist", [False, True])
def test_adjoint_module_is_a_representation(twist):
    mod = build_adjoint(ResidualFrobenius(5, 2, 2, 1), trace_zero=True, twist_by_cyclotomic=twist)
    A, T = mod.matrices, mod.group.table
    prod = np.einsum("gij,hjk->ghik", A, A) % 5
    assert np.array_equal(prod, A[T])


def test_from_generators_rejects_relator_violation():
    G = make_group(5, 2)
    with pytest.raises(InvalidParameters):
        GaloisModule.from_generators(G.finite, [[[1]], [[2]]], 5)


def test_mu_module_character():
    G = make_group(7, 3)
    mu = mu_module(G)
    i, _ = G.exponents
    assert all(int(mu.matrices[g, 0, 0]) == pow(3, int(i[g]), 7) for g in range(G.order))
    assert fixed_space(mu).shape[0] == 0


def test_trivial_module_fixed_space_is_everything():
    G = make_group(5, 2)
    assert fixed_space(trivial_module(G.finite, 5, 3)).shape[0] == 3


def test_restriction_to_inertia_is_trivial_for_diagonal_rho():
    G = make_group(7, 3)
    mod = build_adjoint(ResidualFrobenius(7, 3, 3, 1))
    sub, emb = G.inertia_subgroup()
    res = mod.restrict(sub, emb)
    assert fixed_space(res).shape[0] == 3


def test_untwisted_recovers_plain_adjoint():
    frob = ResidualFrobenius(5, 2, 2, 1)
    tw = build_adjoint(frob, twist_by_cyclotomic=True)
    assert tw.untwisted().same_as(build_adjoint(frob))
    assert not tw.same_as(build_adjoint(frob))


@given(st.sampled_from([(5, 2), (7, 3), (11, 2)]), st.data())
def test_lattice_action_is_an_action(pair, data):
    G = make_group(*pair)
    g = G.element(data.draw(st.integers()), data.draw(st.integers()))
    h = G.element(data.draw(st.integers()), data.draw(st.integers()))
    x = (data.draw(st.integers(0, G.ell - 1)), data.draw(st.integers(0, G.ell - 1)))
    assert lattice_act(g * h, x) == lattice_act(g, lattice_act(h, x))


def test_large_group_invariants_use_generators_only():
    mod = build_adjoint(ResidualFrobenius(23, 5, 5, 1), twist_by_cyclotomic=True)
    assert fixed_space(mod).shape[0] == 1
    assert "matrices" not in mod.__dict__
