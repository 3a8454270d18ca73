"""Exact weight-class counting for diagonalizable actions.

Let D = mu_{n_1} x ... x mu_{n_r} act on S with weight matrix W and let
A = S^D.  For a in [0, p^e)^d the block of ^eA spanned by the
^e x^(a + p^e b) with x^(a + p^e b) in A is the direct sum of the modules
M_chi (monomials of weight chi) over the characters chi with
p^e chi = -W^T a, componentwise mod n_j: such a b must have weight chi, and
each solution chi occurs exactly once.  When p | n_j a factor has
gcd(p^e, n_j) solutions or none, which is how the infinitesimal part shows up.
So mult(chi) = #{a : p^e chi = -W^T a}.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from math import prod
from typing import Sequence

import numpy as np

from .errors import ConfigError

ENUMERATION_LIMIT = 10**7


@dataclass
class WeightClassCount:
    orders: tuple
    p: int
    d: int
    e: int
    counts: dict  # chi tuple -> multiplicity
    per_shift: dict | None = None  # chi -> {generator degree |a|/p^e: multiplicity}

    @property
    def total_generators(self) -> int:
        return self.p ** (self.d * self.e)

    def normalized(self, chi) -> Fraction:
        return Fraction(self.counts.get(tuple(chi), 0), self.total_generators)

    @property
    def predicted(self) -> Fraction:
        return Fraction(1, prod(self.orders) if self.orders else 1)

    def labelled(self) -> dict:
        return {class_label(chi): n for chi, n in sorted(self.counts.items())}


def class_label(chi: Sequence[int]) -> str:
    return "chi" + ",".join(str(int(c)) for c in chi)


def _solutions(target: tuple, orders: tuple, pe: int) -> list[tuple]:
    per = []
    for t, n in zip(target, orders):
        per.append([c for c in range(n) if (pe * c - t) % n == 0])
    return [tuple(c) for c in iproduct(*per)]


def _normalize(orders, W, d):
    orders = tuple(int(n) for n in orders)
    W = np.asarray(W, dtype=np.int64).reshape(d, len(orders)) if orders else np.zeros((d, 0), dtype=np.int64)
    return orders, W


def _count_by_enumeration(orders, W, p, d, e) -> tuple[Counter, dict]:
    pe = p**e
    counts = Counter()
    shifts: dict = {}
    for a in iproduct(range(pe), repeat=d):
        wt = tuple(int(sum(int(W[i, j]) * a[i] for i in range(d))) % n for j, n in enumerate(orders))
        target = tuple((-w) % n for w, n in zip(wt, orders))
        for chi in _solutions(target, orders, pe):
            counts[chi] += 1
            per = shifts.setdefault(chi, Counter())
            per[Fraction(sum(a), pe)] += 1
    return counts, shifts


def _count_by_convolution(orders, W, p, d, e) -> Counter:
    """Distribution of W^T a over a in [0, p^e)^d by convolving one variable at a time."""
    pe = p**e
    dist = Counter({tuple(0 for _ in orders): 1})
    for i in range(d):
        step = Counter()
        for k in range(pe):
            step[tuple((int(W[i, j]) * k) % n for j, n in enumerate(orders))] += 1
        new = Counter()
        for w1, c1 in dist.items():
            for w2, c2 in step.items():
                new[tuple((x + y) % n for x, y, n in zip(w1, w2, orders))] += c1 * c2
        dist = new
    counts = Counter()
    for wt, c in dist.items():
        target = tuple((-w) % n for w, n in zip(wt, orders))
        for chi in _solutions(target, orders, pe):
            counts[chi] += c
    return counts


def veronese_summand_counts(orders: Sequence[int], W, p: int, d: int, e: int,
                            method: str = "auto") -> WeightClassCount:
    """Multiplicity of each M_chi as a summand of ^eA, A = S^D."""
    orders, W = _normalize(orders, W, d)
    if e < 0:
        raise ConfigError("e must be >= 0")
    if method == "auto":
        method = "enumerate" if p ** (d * e) <= ENUMERATION_LIMIT else "convolve"
    shifts = None
    if method == "enumerate":
        counts, shifts = _count_by_enumeration(orders, W, p, d, e)
    elif method == "convolve":
        counts = _count_by_convolution(orders, W, p, d, e)
    else:
        raise ValueError(f"unknown method {method!r}")
    full = {tuple(chi): counts.get(tuple(chi), 0) for chi in iproduct(*[range(n) for n in orders])}
    if shifts is not None:
        shifts = {chi: dict(sorted(shifts.get(chi, {}).items())) for chi in full}
    return WeightClassCount(orders, p, d, e, full, shifts)


@dataclass
class CrosscheckReport:
    e: int
    diag: dict
    equivariant: dict
    agree: bool

    def to_dict(self) -> dict:
        return {"e": self.e, "diag": self.diag, "equivariant": self.equivariant, "agree": self.agree}


def crosscheck_constant_realization(n: int, W: Sequence[int], p: int, e: int, m: int = 1,
                                    modulus=None) -> CrosscheckReport:
    """Compare the weight-class count with the equivariant pipeline run on the
    constant cyclic group diag(zeta^w_1, ..., zeta^w_d)."""
    from .equivmod import StandardLabel, frobenius_pushforward, polynomial_ring_module, summand_count
    from .gf import GF
    from .groupscheme import GroupSchemeDescriptor
    from .modrep import module_from_matrices

    F = GF(p, m, modulus)
    if (F.q - 1) % n:
        raise ConfigError(f"field of order {F.q} lacks primitive {n}-th roots of unity")
    d = len(W)
    diag = veronese_summand_counts((n,), [[w] for w in W], p, d, e)
    zeta = F.primitive_root_of_unity(n)
    g = np.zeros((d, d), dtype=np.int64)
    for i, w in enumerate(W):
        g[i, i] = F.pow(zeta, int(w) % n)
    desc = GroupSchemeDescriptor(F, d, [g] if n > 1 else [])
    G = desc.constant_group
    M = frobenius_pushforward(polynomial_ring_module(desc), e)
    equiv = {}
    for k in range(n):
        # character on which the chosen generator acts by zeta^k
        mats = [np.array([[F.pow(zeta, k)]], dtype=np.int64)] if n > 1 else []
        P = module_from_matrices(G, mats, f"zeta^{k}")
        chi = (-k) % n
        equiv[class_label((chi,))] = summand_count(StandardLabel(class_label((chi,)), P), M).total
    diag_l = diag.labelled()
    return CrosscheckReport(e, diag_l, dict(sorted(equiv.items())), diag_l == equiv)


def counts_csv(results: Sequence[WeightClassCount]) -> str:
    """CSV with columns e, class, count, normalized, predicted."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["e", "class", "count", "normalized", "predicted"])
    for r in results:
        for chi, n in sorted(r.counts.items()):
            w.writerow([r.e, class_label(chi), n, f"{float(r.normalized(chi)):.6g}", f"{float(r.predicted):.6g}"])
    return buf.getvalue()
