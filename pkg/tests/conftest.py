from __future__ import annotations

import numpy as np
import pytest

from frobsig.gf import GF
from frobsig.groupscheme import GroupSchemeDescriptor


def veronese_desc() -> GroupSchemeDescriptor:
    F = GF(3)
    return GroupSchemeDescriptor(F, 2, [np.array([[2, 0], [0, 2]])])


def z3_desc() -> GroupSchemeDescriptor:
    return GroupSchemeDescriptor(GF(2), 2, [np.array([[0, 1], [1, 1]])])


def j2j2_desc() -> GroupSchemeDescriptor:
    g = np.array([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1]])
    return GroupSchemeDescriptor(GF(2), 4, [g])


def mu_desc(p: int, orders, W, d: int) -> GroupSchemeDescriptor:
    return GroupSchemeDescriptor(GF(p), d, [], tuple(orders), np.array(W))


@pytest.fixture
def veronese():
    return veronese_desc()


@pytest.fixture
def z3():
    return z3_desc()


@pytest.fixture
def j2j2():
    return j2j2_desc()
