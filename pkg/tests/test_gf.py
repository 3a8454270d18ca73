from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frobsig import gf
from frobsig.errors import ConfigError
from frobsig.gf import GF

FIELDS = [GF(2), GF(3), GF(5), GF(2, 2, [1, 1, 1]), GF(3, 2, [1, 0, 1]), GF(2, 3, [1, 1, 0, 1])]


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_inv_frobenius_round_trip_every_element(F):
    for e in range(1, 2 * F.m + 1):
        for c in F.elements():
            assert F.frobenius(F.inv_frobenius(c, e), e) == c
            assert F.inv_frobenius(F.frobenius(c, e), e) == c


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_field_axioms_exhaustive(F):
    for a in F.elements():
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
        assert F.pow(a, F.q) == a


def test_gf4_multiplication_table():
    F = GF(2, 2, [1, 1, 1])
    w = F.from_coords([0, 1])
    assert F.mul(w, w) == F.add(w, 1)
    assert F.pow(w, 3) == 1


def test_rejects_reducible_modulus_and_nonprime():
    with pytest.raises(ConfigError):
        GF(2, 2, [1, 0, 1])
    with pytest.raises(ConfigError):
        GF(4)
    with pytest.raises(ConfigError):
        GF(2, 2)


def test_primitive_roots():
    F = GF(7)
    z = F.primitive_root_of_unity(3)
    assert F.pow(z, 3) == 1 and z != 1
    with pytest.raises(Exception):
        GF(5).primitive_root_of_unity(3)


def test_rank_kernel_and_solve_small():
    F = GF(3)
    A = F.array([[1, 2, 0], [2, 1, 0]])
    assert gf.rank(F, A) == 1
    K = gf.kernel(F, A)
    assert K.shape[1] == 2
    assert not F.matmul(A, K).any()
    assert gf.solve(F, A, F.array([[1], [1]])) is None
    x = gf.solve(F, A, F.array([[1], [2]]))
    assert (F.matmul(A, x) == F.array([[1], [2]])).all()


@st.composite
def matrices(draw, max_n=5):
    F = draw(st.sampled_from(FIELDS))
    r = draw(st.integers(1, max_n))
    c = draw(st.integers(1, max_n))
    entries = draw(st.lists(st.integers(0, F.q - 1), min_size=r * c, max_size=r * c))
    return F, np.array(entries, dtype=np.int64).reshape(r, c)


@given(matrices())
@settings(max_examples=150, deadline=None)
def test_rank_nullity(data):
    F, A = data
    K = gf.kernel(F, A)
    assert gf.rank(F, A) + K.shape[1] == A.shape[1]
    assert not F.matmul(A, K).any()
    L = gf.left_kernel(F, A)
    assert not F.matmul(L, A).any()


@given(matrices())
@settings(max_examples=100, deadline=None)
def test_inverse_when_square(data):
    F, A = data
    n = min(A.shape)
    B = A[:n, :n]
    if gf.is_invertible(F, B):
        assert (F.matmul(B, gf.inverse(F, B)) == F.eye(n)).all()
    else:
        assert gf.rank(F, B) < n


@given(matrices())
@settings(max_examples=100, deadline=None)
def test_extend_to_basis_is_invertible(data):
    F, A = data
    U = gf.column_basis(F, A)
    B = np.hstack([U, gf.extend_to_basis(F, U, A.shape[0])])
    assert gf.is_invertible(F, B)
