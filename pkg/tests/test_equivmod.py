from __future__ import annotations

from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from frobsig import gf
from frobsig.equivmod import (StandardLabel, ThetaVector, counts_csv, descriptor_standard_module,
                              frobenius_pushforward, graded_hom, polynomial_ring_module, standard_module,
                              summand_count, theta_norm, theta_vector)
from frobsig.errors import NonEtaleError, ResourceCapError
from frobsig.fsig import generator_module
from frobsig.gf import GF
from frobsig.groupscheme import GroupSchemeDescriptor
from frobsig.modrep import decompose_module, module_from_matrices, simples_and_projective_covers, trivial_module

from conftest import mu_desc, veronese_desc, z3_desc


def sign_line_desc():
    return GroupSchemeDescriptor(GF(3), 1, [np.array([[2]])])


def test_trivial_group_pushforward():
    D = GroupSchemeDescriptor(GF(2), 1, [])
    M = frobenius_pushforward(polynomial_ring_module(D), 1)
    assert M.rank == 2
    assert M.degrees == [0, Fraction(1, 2)]


def test_sign_on_a_line():
    D = sign_line_desc()
    M = frobenius_pushforward(polynomial_ring_module(D), 1)
    assert M.degrees == [0, Fraction(1, 3), Fraction(2, 3)]
    assert [r for r, _, _ in M.labels] == [(0,), (1,), (2,)]
    mats = [generator_module(M, deg).action[0][0, 0] for deg in M.degrees]
    assert mats == [1, 2, 1]


@pytest.mark.parametrize("make, e", [(veronese_desc, 1), (veronese_desc, 2), (z3_desc, 1), (z3_desc, 3),
                                     (lambda: GroupSchemeDescriptor(GF(2, 2, [1, 1, 1]), 2,
                                                                    [np.array([[2, 0], [0, 3]])]), 2)])
def test_rank_is_p_to_the_de(make, e):
    D = make()
    M = frobenius_pushforward(polynomial_ring_module(D), e)
    assert M.rank == D.field.p ** (D.dim * e)
    M.verify()


def test_iterated_pushforward_degrees():
    D = veronese_desc()
    S = polynomial_ring_module(D)
    twice = frobenius_pushforward(frobenius_pushforward(S, 1), 1)
    once = frobenius_pushforward(S, 2)
    assert Counter(twice.degrees) == Counter(once.degrees)


def _generator_block(h, D):
    """Component of a degree-0 map between generator spaces in degree D."""
    zero = (0,) * h.src.nvars
    _, isrc = h.src.slice(D)
    _, idst = h.dst.slice(D)
    cols = [isrc[(j, zero)] for j, x in enumerate(h.src.degrees) if x == D]
    rows = [idst[(k, zero)] for k, x in enumerate(h.dst.degrees) if x == D]
    return h.apply_to_slice(D)[np.ix_(rows, cols)]


def test_iterated_pushforward_isomorphic():
    D = veronese_desc()
    F = D.field
    S = polynomial_ring_module(D)
    A = frobenius_pushforward(frobenius_pushforward(S, 1), 1)
    B = frobenius_pushforward(S, 2)
    homs = graded_hom(A, B, 0)
    degs = sorted(set(A.degrees))
    blocks = {deg: [_generator_block(h, deg) for h in homs] for deg in degs}
    # the generator-level images split degree by degree
    flat = np.array([np.concatenate([blocks[deg][t].ravel() for deg in degs]) for t in range(len(homs))])
    per_degree = [gf.rank(F, np.array([b.ravel() for b in blocks[deg]])) for deg in degs]
    assert gf.rank(F, flat) == sum(per_degree)
    # so an isomorphism exists iff each degree admits an invertible block
    rng = np.random.default_rng(3)
    for deg in degs:
        for _ in range(50):
            coeffs = [int(c) for c in rng.integers(0, F.q, size=len(homs))]
            if gf.is_invertible(F, F.lin_comb(coeffs, blocks[deg])):
                break
        else:
            pytest.fail(f"no invertible generator map in degree {deg}")


def test_hom_examples():
    D = veronese_desc()
    S = polynomial_ring_module(D)
    assert len(graded_hom(S, S, 0)) == 1
    assert len(graded_hom(S, S, 1)) == 0
    assert len(graded_hom(S, S, 2)) == 3
    shifted = descriptor_standard_module(D, trivial_module(D.constant_group), 1)
    assert len(graded_hom(S, shifted, 0)) == 0


def test_sign_twist_maps_to_pushforward():
    D = sign_line_desc()
    G = D.constant_group
    sgn = module_from_matrices(G, [np.array([[2]])], "sgn")
    M = frobenius_pushforward(polynomial_ring_module(D), 1)
    assert len(graded_hom(descriptor_standard_module(D, sgn, Fraction(1, 3)), M, 0)) >= 1


def test_standard_module_copies_matrices():
    D = z3_desc()
    data = simples_and_projective_covers(D.constant_group)
    V = data[1].simple
    X = descriptor_standard_module(D, V, 0)
    assert X.rank == 2
    assert (generator_module(X, 0).action[0] == V.action[0]).all()


def test_summand_counts_veronese():
    D = veronese_desc()
    data = simples_and_projective_covers(D.constant_group)
    S = polynomial_ring_module(D)
    for e, expected in ((1, (5, 4)), (2, (41, 40))):
        M = frobenius_pushforward(S, e)
        got = tuple(summand_count(StandardLabel(d.label, d.simple), M).total for d in data)
        assert got == expected


def test_semisimple_counts_match_generator_modules():
    for D, e in ((veronese_desc(), 2), (z3_desc(), 2)):
        data = simples_and_projective_covers(D.constant_group)
        M = frobenius_pushforward(polynomial_ring_module(D), e)
        oracle = Counter()
        for deg in sorted(set(M.degrees)):
            oracle.update(decompose_module(generator_module(M, deg), data).counts)
        total = 0
        for d in data:
            n = summand_count(StandardLabel(d.label, d.simple), M).total
            assert n == oracle[d.label]
            total += n * d.simple.dim
        assert total == M.rank


def test_additivity_over_direct_sums():
    D = z3_desc()
    data = simples_and_projective_covers(D.constant_group)
    M = frobenius_pushforward(polynomial_ring_module(D), 1)
    N = descriptor_standard_module(D, data[1].simple, Fraction(1, 2))
    for d in data:
        std = StandardLabel(d.label, d.simple)
        assert summand_count(std, M.direct_sum(N)).total == \
            summand_count(std, M).total + summand_count(std, N).total


def test_modular_count_on_standard_module():
    D = GroupSchemeDescriptor(GF(2), 2, [np.array([[1, 1], [0, 1]])])
    data = simples_and_projective_covers(D.constant_group)
    P = data[0].projective_cover
    X = descriptor_standard_module(D, P, 0).direct_sum(descriptor_standard_module(D, P, 1))
    sc = summand_count(StandardLabel("P(triv)", P), X)
    assert sc.per_shift == {0: 1, 1: 1}
    assert summand_count(StandardLabel("free", trivial_module(D.constant_group)), X).total == 0


def test_non_etale_requires_flag():
    D = mu_desc(2, [2], [[1], [1]], 2)
    S = polynomial_ring_module(D)
    with pytest.raises(NonEtaleError):
        frobenius_pushforward(S, 1)
    M = frobenius_pushforward(S, 1, allow_infinitesimal=True)
    # 2 chi = -wt(x^r) mod 2 has two solutions for even |r| and none for odd
    assert M.rank == 4


def test_weighted_pushforward_is_homogeneous():
    D = mu_desc(5, [3], [[1], [2]], 2)
    M = frobenius_pushforward(polynomial_ring_module(D), 1)
    assert M.rank == 25
    M.verify()


def test_generator_cap():
    D = veronese_desc()
    with pytest.raises(ResourceCapError):
        frobenius_pushforward(polynomial_ring_module(D), 5, max_generators=1000)


def test_slice_cap():
    D = veronese_desc()
    S = polynomial_ring_module(D, slice_cap=10)
    with pytest.raises(ResourceCapError):
        S.slice(20)


def test_theta_vectors():
    v = theta_vector({"triv": 5, "sgn": 4}, 1, 2, 3)
    assert v.coefficients == {"triv": Fraction(5, 9), "sgn": Fraction(4, 9)}
    assert theta_norm(ThetaVector({"A": 2, "M": -3}, {"A": 1, "M": 2})) == 8
    assert theta_norm(ThetaVector({}, {})) == 0


def test_counts_csv_layout():
    D = veronese_desc()
    data = simples_and_projective_covers(D.constant_group)
    M = frobenius_pushforward(polynomial_ring_module(D), 1)
    rows = [(1, summand_count(StandardLabel(d.label, d.simple), M)) for d in data]
    text = counts_csv(rows, 3, 2)
    lines = text.splitlines()
    assert lines[0] == "e,label,shift,count,normalized"
    assert "1,triv,0,1,0.111111" in lines
