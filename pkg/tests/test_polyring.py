from __future__ import annotations

from math import comb

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from frobsig.gf import GF
from frobsig.groupscheme import enumerate_elements
from frobsig.polyring import (Polynomial, act_on_polynomial, degree_module, monomial_weight, monomials)

F2, F3 = GF(2), GF(3)


def poly(F, n, terms):
    return Polynomial(F, n, {tuple(a): c % F.q for a, c in terms.items()})


def test_sign_action_fixes_even_quadratic():
    g = np.array([[2, 0], [0, 2]])
    f = poly(F3, 2, {(2, 0): 1, (1, 1): 1})
    assert act_on_polynomial(F3, g, f) == f


def test_transvection_on_y_squared():
    # x -> x, y -> x + y
    g = np.array([[1, 1], [0, 1]])
    f = poly(F2, 2, {(0, 2): 1})
    assert act_on_polynomial(F2, g, f) == poly(F2, 2, {(2, 0): 1, (0, 2): 1})


def test_identity_action():
    f = poly(F3, 3, {(1, 2, 0): 2, (0, 0, 3): 1})
    assert act_on_polynomial(F3, np.eye(3, dtype=np.int64), f) == f


def test_degree_pieces_small_cases():
    g = np.array([[2, 0], [0, 2]])
    assert (degree_module(F3, [g], 1, 2).action[0] == g).all()
    P0 = degree_module(F3, [g], 0, 2)
    assert P0.dim == 1 and P0.action[0].tolist() == [[1]]
    P2 = degree_module(F3, [g], 2, 2)
    assert (P2.action[0] == np.eye(3)).all()


def test_monomial_weights():
    W = np.array([[1], [1]])
    assert monomial_weight((1, 1), (2,), W) == (0,)
    assert monomial_weight((2, 1), (2,), W) == (1,)
    assert monomial_weight((2, 1), (), np.zeros((2, 0))) == ()


def test_monomials_count_and_order():
    for d in (1, 2, 3, 4):
        for n in range(6):
            ms = monomials(n, d)
            assert len(ms) == comb(n + d - 1, d - 1)
            assert ms == sorted(ms, reverse=True)


def test_json_round_trip():
    F4 = GF(2, 2, [1, 1, 1])
    f = poly(F4, 2, {(1, 0): 3, (0, 2): 1})
    assert Polynomial.from_json(F4, f.to_json()) == f


S3_GENS = [np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]]), np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1]])]
GROUP = enumerate_elements(F3, S3_GENS, cap=500)


@st.composite
def polynomials(draw):
    n = draw(st.integers(0, 3))
    ms = monomials(n, 3)
    coeffs = draw(st.lists(st.integers(0, 2), min_size=len(ms), max_size=len(ms)))
    return poly(F3, 3, {a: c for a, c in zip(ms, coeffs) if c})


@given(polynomials(), st.integers(0, GROUP.order - 1), st.integers(0, GROUP.order - 1))
@settings(max_examples=60, deadline=None)
def test_action_is_associative(f, i, j):
    g, h = GROUP.elements[i], GROUP.elements[j]
    lhs = act_on_polynomial(F3, g, act_on_polynomial(F3, h, f))
    assert lhs == act_on_polynomial(F3, F3.matmul(g, h), f)
    assert lhs.is_zero() or lhs.is_homogeneous()


def test_degree_piece_is_a_representation():
    for n in range(4):
        piece = degree_module(F3, GROUP.generators, n, 3)
        assert piece.dim == comb(n + 2, 2)
        mats = GROUP.evaluate(list(piece.action), F3)
        T = GROUP.mult_table
        for a in range(GROUP.order):
            for b in range(0, GROUP.order, 5):
                assert (F3.matmul(mats[a], mats[b]) == mats[T[a, b]]).all()


def test_weights_on_product_piece():
    W = np.array([[1], [1]])
    g = np.array([[2, 0], [0, 2]])
    piece = degree_module(GF(5), [g], 3, 2, (2,), W)
    assert all(tuple(w) == (1,) for w in piece.weights)
