from __future__ import annotations

from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from frobsig.equivmod import frobenius_pushforward, polynomial_ring_module
from frobsig.errors import ConfigError, NotSmallError
from frobsig.fsig import (ModuleChoice, decompose_graded, find_regular_summand, generator_decomposition,
                          group_data, measure, predict, worker_count)
from frobsig.gf import GF
from frobsig.groupscheme import GroupSchemeDescriptor

from conftest import j2j2_desc, mu_desc, veronese_desc, z3_desc


def test_predict_veronese():
    pred = predict(veronese_desc())
    assert pred.coefficient("triv") == Fraction(1, 2)
    assert pred.coefficient("V1") == Fraction(1, 2)
    assert pred.s_A == Fraction(1, 2)


def test_predict_z3():
    pred = predict(z3_desc())
    assert [(L.label, L.coefficient) for L in pred.labels] == [("triv", Fraction(1, 3)), ("V1", Fraction(1, 3))]


def test_predict_unipotent():
    pred = predict(j2j2_desc())
    assert pred.s_A == 0
    assert pred.coefficient("P(triv)") == Fraction(1, 2)
    assert pred.coefficient("free") == 0
    assert predict(j2j2_desc(), rank=3).coefficient("P(triv)") == Fraction(3, 2)


def test_predict_refuses_non_small():
    D = GroupSchemeDescriptor(GF(3), 2, [np.array([[2, 0], [0, 1]])])
    with pytest.raises(NotSmallError) as info:
        predict(D)
    assert info.value.exit_code == 2
    with pytest.raises(NotSmallError):
        predict(mu_desc(5, [4], [[1], [2]], 2))
    assert predict(D, override=True).s_A == Fraction(1, 2)


def test_trivial_group_is_regular():
    D = GroupSchemeDescriptor(GF(3), 2, [])
    rep = measure(D, [1, 2])
    assert [r.normalized for r in rep.rows] == [1, 1]
    assert find_regular_summand(D, 0).found


def test_measure_veronese_trend():
    rep = measure(veronese_desc(), [1, 2, 3])
    assert [rep.row(e, "triv").count for e in (1, 2, 3)] == [5, 41, 365]
    assert [rep.row(e, "V1").count for e in (1, 2, 3)] == [4, 40, 364]
    assert all(rep.trend.values())
    assert all(v == 1 for v in rep.accounted.values())


def test_measure_mu_exact():
    rep = measure(mu_desc(2, [2], [[1], [1]], 2), [1, 2, 3])
    assert rep.pipeline == "diagmu"
    assert all(r.deviation == 0 for r in rep.rows)


def test_measure_weighted_pipeline_product():
    g = np.array([[4, 0], [0, 4]])
    D = GroupSchemeDescriptor(GF(5), 2, [g], (3,), np.array([[1], [2]]))
    rep = measure(D, [1], override=True)
    assert rep.pipeline == "equivmod-weighted"
    assert rep.accounted[1] == 1


def test_threads_give_same_rows(monkeypatch):
    a = measure(z3_desc(), [1, 2], threads=1)
    b = measure(z3_desc(), [1, 2], threads=2)
    assert a.to_csv() == b.to_csv()
    monkeypatch.setenv("FROBSIG_THREADS", "0")
    with pytest.raises(ConfigError):
        worker_count()


def test_z3_e1_counts_and_oracle():
    D = z3_desc()
    rep = measure(D, [1])
    assert (rep.row(1, "triv").count, rep.row(1, "V1").count) == (2, 1)
    M = frobenius_pushforward(polynomial_ring_module(D), 1)
    counts, complete = decompose_graded(M, group_data(D))
    assert complete
    assert Counter({lab: 0 for lab in ("triv", "V1")}) + Counter(lab for lab, _ in counts.elements()) \
        == Counter({"triv": 2, "V1": 1})


def test_unipotent_e1_against_graded_oracle():
    D = j2j2_desc()
    rep = measure(D, [1])
    assert rep.row(1, "free").count == 4
    assert rep.row(1, "P(triv)").count == 6
    M = frobenius_pushforward(polynomial_ring_module(D), 1)
    counts, complete = decompose_graded(M, group_data(D))
    assert complete
    by_label = Counter()
    for (lab, _), n in counts.items():
        by_label[lab] += n
    assert by_label == Counter({"free": 4, "P(triv)": 6})


def test_generator_decomposition_semisimple():
    D = veronese_desc()
    M = frobenius_pushforward(polynomial_ring_module(D), 1)
    dec = generator_decomposition(M)
    total = Counter()
    for d in dec.values():
        total.update(d.counts)
    assert total == Counter({"triv": 5, "V1": 4})


@pytest.mark.parametrize("make, r", [(veronese_desc, 1), (z3_desc, 1), (j2j2_desc, 1)])
def test_regular_summand(make, r):
    res = find_regular_summand(make(), 2)
    assert res.found and res.verified and res.r == r


def test_regular_summand_veronese_placement():
    res = find_regular_summand(veronese_desc(), 1)
    assert sorted(res.placements) == [("V1", [1]), ("triv", [0])]


def test_module_choice_parsing():
    assert ModuleChoice.from_config("S").kind == "S"
    assert ModuleChoice.from_config({"label": "V1"}).label == "V1"
    assert ModuleChoice.from_config({"reflexive_rank": 2}).rank == 2
    with pytest.raises(ConfigError):
        ModuleChoice.from_config({"other": 1})


def test_reflexive_is_prediction_only():
    rep = measure(z3_desc(), [1], ModuleChoice("reflexive", rank=2))
    assert rep.rows == [] and rep.pipeline == "prediction-only"
    assert rep.prediction.coefficient("triv") == Fraction(2, 3)


def test_projective_label_module():
    D = z3_desc()
    rep = measure(D, [1], ModuleChoice("label", label="V1"))
    assert rep.accounted[1] == 1
