from __future__ import annotations

from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frobsig import gf
from frobsig.gf import GF
from frobsig.groupscheme import enumerate_elements
from frobsig.modrep import (MatrixAlgebra, decompose_module, group_algebra_structure, hom_space, is_isomorphic,
                            jacobson_radical, jordan_type, module_from_matrices, regular_module,
                            simples_and_projective_covers, split_module, summand_multiplicity, trivial_module)

F2, F3 = GF(2), GF(3)


def jordan_block(F, k: int) -> np.ndarray:
    J = np.eye(k, dtype=np.int64)
    for i in range(k - 1):
        J[i, i + 1] = 1
    return J


def cyclic_group(F, n_block: int):
    return enumerate_elements(F, [jordan_block(F, n_block)])


def J(G, k: int):
    return module_from_matrices(G, [jordan_block(G.field, k)], f"J{k}")


def z3_group():
    return enumerate_elements(F2, [np.array([[0, 1], [1, 1]])])


def s3_group(F):
    return enumerate_elements(F, [np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]]),
                                  np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]])])


def test_hom_dimensions_small_examples():
    G = cyclic_group(F2, 2)
    assert len(hom_space(trivial_module(G), trivial_module(G))) == 1
    assert len(hom_space(J(G, 2), J(G, 1))) == 1
    assert len(hom_space(J(G, 2), J(G, 2))) == 2
    H = z3_group()
    D = module_from_matrices(H, [np.array([[0, 1], [1, 1]])], "D")
    assert len(hom_space(trivial_module(H), D)) == 0
    assert len(hom_space(D, D)) == 2


def test_homs_commute_with_action():
    G = s3_group(F3)
    M = regular_module(G)
    for h in hom_space(M, M):
        for a in M.action:
            assert (F3.matmul(h, a) == F3.matmul(a, h)).all()


@pytest.mark.parametrize("group, p, rad_dim", [
    (lambda: cyclic_group(F2, 2), 2, 1),
    (lambda: cyclic_group(F2, 4), 2, 3),
    (lambda: z3_group(), 2, 0),
    (lambda: s3_group(F3), 3, 4),
    (lambda: s3_group(F2), 2, 1),
])
def test_radical_dimension_of_group_algebra(group, p, rad_dim):
    G = group()
    R = jacobson_radical(G.field, group_algebra_structure(G))
    assert R.shape[0] == rad_dim


def test_radical_over_extension_field():
    F4 = GF(2, 2, [1, 1, 1])
    G = enumerate_elements(F4, [np.array([[0, 1], [1, 1]])])
    R = jacobson_radical(F4, group_algebra_structure(G))
    assert R.shape[0] == 0
    data = simples_and_projective_covers(G)
    # over F_4 the 2-dimensional simple splits into two characters
    assert sorted(d.simple.dim for d in data) == [1, 1, 1]


def test_simples_z3_over_f2():
    data = simples_and_projective_covers(z3_group())
    assert [(d.label, d.simple.dim, d.end_dim) for d in data] == [("triv", 1, 1), ("V1", 2, 2)]
    assert all(d.projective_is_simple for d in data)


def test_simples_s3_over_f3():
    data = simples_and_projective_covers(s3_group(F3))
    assert [(d.simple.dim, d.projective_cover.dim) for d in data] == [(1, 3), (1, 3)]


def test_simples_s3_over_f2():
    data = simples_and_projective_covers(s3_group(F2))
    dims = sorted((d.simple.dim, d.projective_cover.dim, d.multiplicity) for d in data)
    assert dims == [(1, 2, 1), (2, 2, 2)]


def test_division_algebra_detection():
    F = F2
    H = z3_group()
    D = module_from_matrices(H, [np.array([[0, 1], [1, 1]])], "D")
    assert MatrixAlgebra(F, hom_space(D, D)).is_division()
    G = cyclic_group(F2, 2)
    M = J(G, 1).direct_sum(J(G, 1))
    assert not MatrixAlgebra(F, hom_space(M, M)).is_division()


def test_projective_multiplicity_one():
    for G in (cyclic_group(F2, 2), z3_group(), s3_group(F3), s3_group(F2)):
        for d in simples_and_projective_covers(G):
            assert summand_multiplicity(d.projective_cover, d.projective_cover) == 1
            assert summand_multiplicity(d.projective_cover, regular_module(G)) == d.multiplicity


def test_contragredient_invariance():
    G = cyclic_group(F2, 4)
    M = J(G, 1).direct_sum(J(G, 3)).direct_sum(J(G, 3))
    for k in (1, 2, 3, 4):
        P = J(G, k)
        assert summand_multiplicity(P, M) == summand_multiplicity(P.dual(), M.dual())


def test_decompose_cyclic_p_group():
    G = cyclic_group(F2, 4)
    M = J(G, 2).direct_sum(J(G, 4)).direct_sum(J(G, 2))
    dec = decompose_module(M)
    assert dec.complete
    assert dec.counts == Counter({"J2": 2, "P(triv)": 1})


def test_decompose_semisimple():
    H = z3_group()
    M = regular_module(H).direct_sum(trivial_module(H))
    dec = decompose_module(M)
    assert dec.complete and dec.counts == Counter({"triv": 2, "V1": 1})


def test_split_module_parts_embed():
    G = s3_group(F2)
    M = regular_module(G)
    parts = split_module(M)
    assert sum(X.dim for X in parts) == 6
    B = np.hstack([X.basis for X in parts])
    assert gf.is_invertible(F2, B)


def _conjugate(F, M, seed: int):
    rng = np.random.default_rng(seed)
    while True:
        Q = rng.integers(0, F.q, size=(M.dim, M.dim))
        if gf.is_invertible(F, Q):
            break
    Qi = gf.inverse(F, Q)
    return module_from_matrices(M.group, [F.matmul(F.matmul(Q, a), Qi) for a in M.action], M.name)


Z4 = cyclic_group(F2, 4)


@given(st.lists(st.integers(0, 2), min_size=4, max_size=4), st.integers(0, 2**31))
@settings(max_examples=50, deadline=None)
def test_multiplicity_additive_on_random_sums(mults, seed):
    if not any(mults):
        mults[0] = 1
    M = None
    for k, r in zip((1, 2, 3, 4), mults):
        for _ in range(r):
            M = J(Z4, k) if M is None else M.direct_sum(J(Z4, k))
    M = _conjugate(F2, M, seed)
    for k, r in zip((1, 2, 3, 4), mults):
        assert summand_multiplicity(J(Z4, k), M) == r
    # Jordan form is an independent oracle
    assert jordan_type(M) == Counter({k: r for k, r in zip((1, 2, 3, 4), mults) if r})


def test_isomorphism_after_base_change():
    G = s3_group(F3)
    data = simples_and_projective_covers(G)
    P = data[0].projective_cover
    assert is_isomorphic(P, _conjugate(F3, P, 7))
    assert not is_isomorphic(P, data[1].projective_cover)
