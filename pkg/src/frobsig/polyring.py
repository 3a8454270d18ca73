"""Polynomials over F_q with a linear group action on the variables.

A matrix A acts by substitution: g . x_j = sum_i A[i, j] x_i.  Graded pieces
S_n are listed in descending lexicographic monomial order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .gf import GF

MAX_DEGREE = 64

Exponent = tuple[int, ...]


class Polynomial:
    """Sparse polynomial; ``terms`` maps exponent tuples to nonzero field codes."""

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field: GF, nvars: int, terms: Mapping[Exponent, int] | None = None):
        self.field = field
        self.nvars = nvars
        clean = {}
        for a, c in (terms or {}).items():
            a = tuple(int(x) for x in a)
            if len(a) != nvars or min(a, default=0) < 0:
                raise ValueError(f"bad exponent {a} for {nvars} variables")
            c = int(c) % field.q if field.prime else int(c)
            if c:
                clean[a] = c
        self.terms = clean

    @classmethod
    def monomial(cls, field: GF, a: Sequence[int], coeff: int = 1) -> "Polynomial":
        return cls(field, len(a), {tuple(a): coeff})

    @classmethod
    def variable(cls, field: GF, nvars: int, i: int) -> "Polynomial":
        a = [0] * nvars
        a[i] = 1
        return cls.monomial(field, a)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for a, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(f"x{i + 1}^{k}" if k > 1 else f"x{i + 1}" for i, k in enumerate(a) if k)
            parts.append(f"{c}*{mono}" if mono and c != 1 else (mono or str(c)))
        return " + ".join(parts)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Polynomial") -> "Polynomial":
        F = self.field
        out = dict(self.terms)
        for a, c in other.terms.items():
            s = int(F.add(out.get(a, 0), c))
            if s:
                out[a] = s
            else:
                out.pop(a, None)
        return Polynomial(F, self.nvars, out)

    def __neg__(self) -> "Polynomial":
        return self.scale(self.field.neg(1))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c: int) -> "Polynomial":
        F = self.field
        return Polynomial(F, self.nvars, {a: int(F.mul(v, c)) for a, v in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        F = self.field
        out: dict = {}
        for a, c in self.terms.items():
            for b, e in other.terms.items():
                k = tuple(x + y for x, y in zip(a, b))
                s = int(F.add(out.get(k, 0), F.mul(c, e)))
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return Polynomial(F, self.nvars, out)

    def degrees(self) -> set[int]:
        return {sum(a) for a in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def to_json(self) -> dict:
        F = self.field
        return {f"[{','.join(map(str, a))}]": list(F.coords(c))
                for a, c in sorted(self.terms.items(), reverse=True)}

    @classmethod
    def from_json(cls, field: GF, data: Mapping[str, Sequence[int]]) -> "Polynomial":
        terms = {}
        nvars = None
        for key, coords in data.items():
            a = tuple(int(x) for x in key.strip("[]").split(",") if x.strip())
            nvars = len(a)
            terms[a] = field.from_coords(coords)
        return cls(field, nvars or 0, terms)


def _matrix_key(A: np.ndarray) -> tuple:
    return (A.shape[0],) + tuple(int(x) for x in A.ravel())


class ActionCache:
    """Images of monomials under one matrix, built from cached powers of linear forms."""

    def __init__(self, field: GF, A: np.ndarray):
        self.field = field
        self.A = np.asarray(A, dtype=np.int64)
        self.d = self.A.shape[0]
        self._powers: dict[tuple[int, int], Polynomial] = {}
        self._monos: dict[Exponent, Polynomial] = {}

    def _linear_form(self, j: int) -> Polynomial:
        terms = {}
        for i in range(self.d):
            if self.A[i, j]:
                a = [0] * self.d
                a[i] = 1
                terms[tuple(a)] = int(self.A[i, j])
        return Polynomial(self.field, self.d, terms)

    def power(self, j: int, k: int) -> Polynomial:
        key = (j, k)
        if key not in self._powers:
            if k == 0:
                self._powers[key] = Polynomial.monomial(self.field, [0] * self.d)
            else:
                self._powers[key] = self.power(j, k - 1) * self._linear_form(j)
        return self._powers[key]

    def monomial_image(self, a: Exponent) -> Polynomial:
        a = tuple(a)
        if a not in self._monos:
            out = Polynomial.monomial(self.field, [0] * self.d)
            for j, k in enumerate(a):
                if k:
                    out = out * self.power(j, k)
            self._monos[a] = out
        return self._monos[a]

    def apply(self, f: Polynomial) -> Polynomial:
        out = Polynomial(self.field, self.d)
        for a, c in f.terms.items():
            out = out + self.monomial_image(a).scale(c)
        return out


@lru_cache(maxsize=64)
def _cache_for(field: GF, key: tuple) -> ActionCache:
    d = key[0]
    A = np.array(key[1:], dtype=np.int64).reshape(d, d)
    return ActionCache(field, A)


def action_cache(field: GF, A: np.ndarray) -> ActionCache:
    return _cache_for(field, _matrix_key(np.asarray(A, dtype=np.int64)))


def act_on_polynomial(field: GF, g: np.ndarray, f: Polynomial) -> Polynomial:
    """Substitute x_j -> sum_i g[i, j] x_i in f."""
    return action_cache(field, g).apply(f)


def monomials(n: int, d: int) -> list[Exponent]:
    """Exponent vectors of total degree n in d variables, descending lex order."""
    if n < 0:
        return []
    if d == 0:
        return [()] if n == 0 else []
    out = []
    for combo in combinations_with_replacement(range(d), n):
        a = [0] * d
        for i in combo:
            a[i] += 1
        out.append(tuple(a))
    return sorted(out, reverse=True)


def monomial_weight(a: Sequence[int], orders: Sequence[int], W) -> tuple[int, ...]:
    """(sum_i W[i, j] a_i mod n_j)_j."""
    W = np.asarray(W, dtype=np.int64).reshape(len(a), len(orders)) if len(orders) else None
    return tuple(int(sum(int(W[i, j]) * int(x) for i, x in enumerate(a)) % n)
                 for j, n in enumerate(orders))


@dataclass(frozen=True, eq=False)
class GradedPiece:
    degree: int
    basis: tuple[Exponent, ...]
    action: tuple[np.ndarray, ...]
    weights: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


def action_matrix(field: GF, g: np.ndarray, basis: Sequence[Exponent]) -> np.ndarray:
    """Matrix of g on span(basis); column j is the image of basis[j]."""
    index = {a: i for i, a in enumerate(basis)}
    cache = action_cache(field, g)
    M = np.zeros((len(basis), len(basis)), dtype=np.int64)
    for j, a in enumerate(basis):
        for b, c in cache.monomial_image(a).terms.items():
            M[index[b], j] = c
    return M


def degree_module(field: GF, generators: Sequence[np.ndarray], n: int, d: int,
                  orders: Sequence[int] = (), W=None) -> GradedPiece:
    """S_n with the action of every constant generator and the weight of each monomial."""
    if n > MAX_DEGREE:
        raise ValueError(f"degree {n} exceeds cap {MAX_DEGREE}")
    basis = tuple(monomials(n, d))
    assert len(basis) == comb(n + d - 1, d - 1)
    mats = tuple(action_matrix(field, np.asarray(g, dtype=np.int64), basis) for g in generators)
    weights = tuple(monomial_weight(a, orders, W) for a in basis) if orders else tuple(() for _ in basis)
    return GradedPiece(n, basis, mats, weights)


def linear_combination(field: GF, d: int, coeffs: Iterable[int], basis: Sequence[Exponent]) -> Polynomial:
    return Polynomial(field, d, {a: int(c) for a, c in zip(basis, coeffs) if c})
