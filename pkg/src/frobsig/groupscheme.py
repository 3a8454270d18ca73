"""Finite group schemes of the form (constant group) x (diagonalizable group).

The constant part is a finite matrix group generated by invertible d x d
matrices.  The diagonalizable part is ``mu_{n_1} x ... x mu_{n_r}`` acting
on variable i through the weight row ``W[i]``; in characteristic p a factor
with p | n_j has a nontrivial infinitesimal piece.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd, prod
from typing import Sequence

import numpy as np

from . import gf
from .errors import ConfigError, ResourceCapError
from .gf import GF

DEFAULT_ELEMENT_CAP = 200


def _key(M: np.ndarray) -> tuple:
    return tuple(int(x) for x in M.ravel())


@dataclass(frozen=True, eq=False)
class ConstantGroup:
    """An enumerated matrix group.

    ``words[i]`` lists generator indices ``[s0, s1, ...]`` with
    ``elements[i] == gens[s0] @ gens[s1] @ ...``; any representation can be
    evaluated on element i by multiplying its generator matrices in that order.
    """

    field: GF
    generators: tuple[np.ndarray, ...]
    elements: tuple[np.ndarray, ...]
    words: tuple[tuple[int, ...], ...]
    identity: int
    dim: int

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def _index(self) -> dict:
        return {_key(g): i for i, g in enumerate(self.elements)}

    def index(self, M: np.ndarray) -> int:
        return self._index[_key(np.asarray(M))]

    @cached_property
    def mult_table(self) -> np.ndarray:
        n = self.order
        T = np.zeros((n, n), dtype=np.int64)
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                T[i, j] = self.index(self.field.matmul(a, b))
        return T

    @cached_property
    def inverses(self) -> list[int]:
        T = self.mult_table
        return [int(np.flatnonzero(T[i] == self.identity)[0]) for i in range(self.order)]

    def element_order(self, i: int) -> int:
        k, cur = 1, i
        while cur != self.identity:
            cur = int(self.mult_table[cur, i])
            k += 1
        return k

    def evaluate(self, gen_images: Sequence[np.ndarray], F: GF | None = None) -> list[np.ndarray]:
        """Images of every element under the representation given on generators."""
        F = F or self.field
        n = gen_images[0].shape[0] if gen_images else 1
        out = []
        for w in self.words:
            M = np.eye(n, dtype=np.int64)
            for s in w:
                M = F.matmul(M, gen_images[s])
            out.append(M)
        return out

    def is_cyclic_p_group(self) -> bool:
        p = self.field.p
        n = self.order
        while n % p == 0:
            n //= p
        if n != 1:
            return False
        return any(self.element_order(i) == self.order for i in range(self.order))


def enumerate_elements(F: GF, gens: Sequence[np.ndarray], cap: int = DEFAULT_ELEMENT_CAP,
                       dim: int | None = None) -> ConstantGroup:
    """Breadth-first closure of the generators under left multiplication."""
    if cap < 1:
        raise ConfigError("element cap must be >= 1")
    gens = tuple(np.asarray(g, dtype=np.int64) for g in gens)
    if dim is None:
        dim = gens[0].shape[0] if gens else 0
    for g in gens:
        if g.shape != (dim, dim) or not gf.is_invertible(F, g):
            raise ConfigError(f"constant generator {g.tolist()} is not an invertible {dim}x{dim} matrix")
    ident = np.eye(dim, dtype=np.int64)
    found = {_key(ident): (ident, ())}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        wx = found[_key(x)][1]
        for s, g in enumerate(gens):
            y = F.matmul(g, x)
            k = _key(y)
            if k not in found:
                found[k] = (y, (s,) + wx)
                if len(found) > cap:
                    raise ResourceCapError(f"group order exceeds cap {cap}")
                queue.append(y)
    ordered = sorted(found)
    elements = tuple(found[k][0] for k in ordered)
    words = tuple(found[k][1] for k in ordered)
    return ConstantGroup(F, gens, elements, words, ordered.index(_key(ident)), dim)


def _subgroup_generated(vectors: Sequence[tuple[int, ...]], orders: Sequence[int]) -> set:
    zero = tuple(0 for _ in orders)
    seen = {zero}
    queue = deque([zero])
    while queue:
        x = queue.popleft()
        for v in vectors:
            y = tuple((a + b) % n for a, b, n in zip(x, v, orders))
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def _mu_name(orders: Sequence[int], subgroup_size: int) -> str:
    total = prod(orders)
    quotient = total // subgroup_size
    if len(orders) == 1:
        return f"mu_{quotient}"
    return f"diagonalizable subgroup scheme of order {quotient}"


@dataclass(frozen=True)
class SmallnessVerdict:
    small: bool
    witness: str | None = None
    witness_data: object = None
    factorwise: bool = False

    def to_dict(self) -> dict:
        return {"small": self.small, "witness": self.witness,
                "witness_data": self.witness_data, "factorwise": self.factorwise}


@dataclass(eq=False)
class GroupSchemeDescriptor:
    """G = H x D with H a constant matrix group and D diagonalizable.

    ``diag_weights`` is a d x r integer matrix; column j is read mod ``diag_orders[j]``.
    """

    field: GF
    dim: int
    constant_generators: list = field(default_factory=list)
    diag_orders: tuple = ()
    diag_weights: np.ndarray | None = None
    element_cap: int = DEFAULT_ELEMENT_CAP

    def __post_init__(self):
        F, d = self.field, self.dim
        if d < 1:
            raise ConfigError("dimension must be >= 1")
        self.constant_generators = [np.asarray(g, dtype=np.int64) % F.q for g in self.constant_generators]
        self.diag_orders = tuple(int(n) for n in self.diag_orders)
        if any(n < 1 for n in self.diag_orders):
            raise ConfigError("diagonalizable orders must be positive")
        r = len(self.diag_orders)
        if self.diag_weights is None:
            self.diag_weights = np.zeros((d, r), dtype=np.int64)
        W = np.asarray(self.diag_weights, dtype=np.int64).reshape(d, r) if r else np.zeros((d, 0), dtype=np.int64)
        if W.shape != (d, r):
            raise ConfigError(f"weights must be a {d}x{r} matrix")
        self.diag_weights = W % np.array(self.diag_orders, dtype=np.int64) if r else W
        for g in self.constant_generators:
            if g.shape != (d, d):
                raise ConfigError(f"constant generator {g.tolist()} is not {d}x{d}")
            if not gf.is_invertible(F, g):
                raise ConfigError(f"constant generator {g.tolist()} is not invertible")
        if r and self.constant_generators:
            for g in self.constant_generators:
                for i in range(d):
                    for j in range(d):
                        if g[i, j] and tuple(self.diag_weights[i]) != tuple(self.diag_weights[j]):
                            raise ConfigError(
                                "constant generator does not preserve the weight decomposition; "
                                "only direct products are supported")

    @cached_property
    def constant_group(self) -> ConstantGroup:
        return enumerate_elements(self.field, self.constant_generators, self.element_cap, dim=self.dim)

    @property
    def has_constant(self) -> bool:
        return self.constant_group.order > 1

    @property
    def has_diag(self) -> bool:
        return prod(self.diag_orders) > 1 if self.diag_orders else False

    def weight_of(self, exponents: Sequence[int]) -> tuple[int, ...]:
        """Character of the monomial x^a: (sum_i w_ij a_i mod n_j)_j."""
        return tuple(int(sum(int(self.diag_weights[i, j]) * int(a) for i, a in enumerate(exponents)) % n)
                     for j, n in enumerate(self.diag_orders))

    @property
    def characters(self) -> list[tuple[int, ...]]:
        """All characters of the diagonalizable part, in lexicographic order."""
        from itertools import product as iproduct
        return [tuple(c) for c in iproduct(*[range(n) for n in self.diag_orders])]


def order(G: GroupSchemeDescriptor) -> int:
    """dim_k k[G]."""
    return G.constant_group.order * prod(G.diag_orders)


def is_linearly_reductive(G: GroupSchemeDescriptor, p: int | None = None) -> bool:
    p = G.field.p if p is None else p
    return G.constant_group.order % p != 0


def infinitesimal_e0(G: GroupSchemeDescriptor, p: int | None = None) -> int:
    """Smallest e with x^(p^e) invariant under the infinitesimal part, i.e. the
    largest p-adic valuation among the mu-orders."""
    p = G.field.p if p is None else p
    e0 = 0
    for n in G.diag_orders:
        s = 0
        while n % p == 0:
            n //= p
            s += 1
        e0 = max(e0, s)
    return e0


def _constant_smallness(G: GroupSchemeDescriptor) -> SmallnessVerdict:
    H = G.constant_group
    F = G.field
    I = F.eye(G.dim)
    for i, g in enumerate(H.elements):
        if i == H.identity:
            continue
        if gf.rank(F, F.sub(g, I)) < 2:
            return SmallnessVerdict(False, f"pseudo-reflection {g.tolist()}", g.tolist())
    return SmallnessVerdict(True)


def _diag_smallness(G: GroupSchemeDescriptor) -> SmallnessVerdict:
    orders = G.diag_orders
    rows = [tuple(int(x) for x in G.diag_weights[i]) for i in range(G.dim)]
    total = prod(orders)
    full = _subgroup_generated(rows, orders)
    if len(full) < total:
        name = _mu_name(orders, len(full))
        return SmallnessVerdict(False, f"{name} acts trivially (action not faithful)",
                                {"kind": "kernel", "order": total // len(full)})
    for i0 in range(G.dim):
        sub = _subgroup_generated(rows[:i0] + rows[i0 + 1:], orders)
        if len(sub) < total:
            name = _mu_name(orders, len(sub))
            return SmallnessVerdict(False, f"{name} fixes the hyperplane x_{i0 + 1} = 0",
                                    {"kind": "stabilizer", "order": total // len(sub), "hyperplane": i0})
    return SmallnessVerdict(True)


def diag_divisor_test(orders: Sequence[int], W: np.ndarray) -> tuple[bool, str | None]:
    """Per-factor test: every divisor delta > 1 of n_j needs two weights nonzero mod delta."""
    W = np.asarray(W)
    for j, n in enumerate(orders):
        col = [int(x) for x in W[:, j]]
        common = gcd(n, *col)
        if common != 1:
            return False, f"mu_{common}"
        for delta in range(2, n + 1):
            if n % delta == 0 and sum(1 for w in col if w % delta) < 2:
                return False, f"mu_{delta}"
    return True, None


def is_small(G: GroupSchemeDescriptor) -> SmallnessVerdict:
    """Smallness of the action on V.

    Constant part: no non-identity element with rank(g - I) < 2.  Diagonal
    part: the weights generate the character group, and still do after
    dropping any single variable.  When both parts are nontrivial the two
    tests are run separately and the verdict is flagged ``factorwise``.
    """
    verdicts = []
    if G.has_constant:
        verdicts.append(_constant_smallness(G))
    if G.has_diag:
        verdicts.append(_diag_smallness(G))
    factorwise = len(verdicts) == 2
    for v in verdicts:
        if not v.small:
            return SmallnessVerdict(False, v.witness, v.witness_data, factorwise)
    return SmallnessVerdict(True, None, None, factorwise)
