from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frobsig.diagmu import class_label, counts_csv, crosscheck_constant_realization, veronese_summand_counts
from frobsig.equivmod import StandardLabel, frobenius_pushforward, polynomial_ring_module, summand_count
from frobsig.fsig import group_data

from conftest import mu_desc


def test_mu2_char2_exact_half():
    for e in range(1, 5):
        r = veronese_summand_counts((2,), [[1], [1]], 2, 2, e)
        assert r.counts == {(0,): 2 ** (2 * e - 1), (1,): 2 ** (2 * e - 1)}
        assert r.normalized((0,)) == Fraction(1, 2) == r.predicted


def test_parity_counts_p3():
    for e, (a, b) in ((1, (5, 4)), (2, (41, 40)), (3, (365, 364))):
        r = veronese_summand_counts((2,), [[1], [1]], 3, 2, e)
        assert r.counts == {(0,): a, (1,): b}


def test_per_shift_breakdown_sums_to_count():
    r = veronese_summand_counts((3,), [[1], [2]], 2, 2, 2, method="enumerate")
    for chi, n in r.counts.items():
        assert sum(r.per_shift[chi].values()) == n


@given(st.sampled_from([2, 3, 5]), st.lists(st.integers(1, 6), min_size=1, max_size=2),
       st.integers(1, 3), st.integers(1, 3), st.data())
@settings(max_examples=60, deadline=None)
def test_methods_agree_and_partition(p, orders, d, e, data):
    W = [[data.draw(st.integers(0, n - 1)) for n in orders] for _ in range(d)]
    a = veronese_summand_counts(orders, W, p, d, e, method="enumerate")
    b = veronese_summand_counts(orders, W, p, d, e, method="convolve")
    assert a.counts == b.counts
    # when p is prime to every order each residue class a lands in exactly one chi
    if all(n % p for n in orders):
        assert sum(a.counts.values()) == p ** (d * e)


def test_unknown_method():
    with pytest.raises(ValueError):
        veronese_summand_counts((2,), [[1], [1]], 3, 2, 1, method="guess")


def test_labels_and_csv():
    assert class_label((1, 0)) == "chi1,0"
    r = veronese_summand_counts((2,), [[1], [1]], 3, 2, 1)
    assert counts_csv([r]).splitlines() == ["e,class,count,normalized,predicted",
                                           "1,chi0,5,0.555556,0.5", "1,chi1,4,0.444444,0.5"]


def test_crosscheck_mu2_over_f3():
    for e in (1, 2):
        rep = crosscheck_constant_realization(2, [1, 1], 3, e)
        assert rep.agree


def test_crosscheck_mu4_over_f5():
    rep = crosscheck_constant_realization(4, [1, 3], 5, 1)
    assert rep.agree and rep.diag == {"chi0": 7, "chi1": 6, "chi2": 6, "chi3": 6}


def test_weighted_equivariant_pipeline_matches():
    # the same mu_3 descriptor through the weighted pushforward
    D = mu_desc(2, [3], [[1], [2]], 2)
    gd = group_data(D)
    M = frobenius_pushforward(polynomial_ring_module(D), 2)
    direct = veronese_summand_counts((3,), [[1], [2]], 2, 2, 2).labelled()
    for std in gd.labels:
        assert summand_count(std, M).total == direct[std.label]
