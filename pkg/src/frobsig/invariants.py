"""Degree-by-degree invariant rings A = S^G and the monomial ring B = S^D."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gf
from .errors import NotLinearlyReductiveError
from .groupscheme import GroupSchemeDescriptor, is_linearly_reductive
from .modrep import KGModule, hom_space
from .polyring import (MAX_DEGREE, GradedPiece, Polynomial, act_on_polynomial, degree_module,
                       linear_combination)


@dataclass
class InvariantRingData:
    degree_bound: int
    bases: dict  # degree -> list[Polynomial]
    generators: list  # (degree, Polynomial)
    hilbert: list

    def to_json(self) -> dict:
        return {
            "generators": [{"degree": n, "poly": f.to_json()} for n, f in self.generators],
            "hilbert": list(self.hilbert),
            "certified_up_to": self.degree_bound,
            "note": "generation beyond the degree bound is not certified",
        }


class InvariantRing:
    def __init__(self, desc: GroupSchemeDescriptor):
        self.desc = desc
        self.field = desc.field
        self._pieces: dict[int, GradedPiece] = {}
        self._bases: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    def piece(self, n: int) -> GradedPiece:
        with self._lock:
            if n not in self._pieces:
                D = self.desc
                self._pieces[n] = degree_module(self.field, D.constant_generators, n, D.dim,
                                                D.diag_orders, D.diag_weights)
            return self._pieces[n]

    def _zero_weight_columns(self, piece: GradedPiece) -> list[int]:
        zero = tuple(0 for _ in self.desc.diag_orders)
        return [t for t, w in enumerate(piece.weights) if tuple(w) == zero]

    def invariant_coordinates(self, n: int) -> np.ndarray:
        """Columns: coordinates (on the monomial basis of S_n) of a basis of (S_n)^G."""
        if n < 0 or n > MAX_DEGREE:
            raise ValueError(f"degree {n} outside [0, {MAX_DEGREE}]")
        with self._lock:
            cached = self._bases.get(n)
        if cached is not None:
            return cached
        F = self.field
        piece = self.piece(n)
        cols = self._zero_weight_columns(piece)
        out = np.zeros((piece.dim, 0), dtype=np.int64)
        if cols:
            blocks = [F.sub(a, F.eye(piece.dim))[:, cols] for a in piece.action]
            K = gf.kernel(F, np.vstack(blocks)) if blocks else np.eye(len(cols), dtype=np.int64)
            out = np.zeros((piece.dim, K.shape[1]), dtype=np.int64)
            out[cols] = K
        with self._lock:
            self._bases[n] = out
        return out

    def invariant_basis(self, n: int) -> list[Polynomial]:
        K = self.invariant_coordinates(n)
        basis = self.piece(n).basis
        return [linear_combination(self.field, self.desc.dim, K[:, t], basis) for t in range(K.shape[1])]

    def monomial_subring_basis(self, n: int) -> list[Polynomial]:
        """Weight-zero monomials of degree n: a basis of B_n = (S_n)^D."""
        piece = self.piece(n)
        return [Polynomial.monomial(self.field, piece.basis[t]) for t in self._zero_weight_columns(piece)]

    def is_invariant(self, f: Polynomial) -> bool:
        D = self.desc
        for g in D.constant_generators:
            if act_on_polynomial(self.field, g, f) != f:
                return False
        zero = tuple(0 for _ in D.diag_orders)
        return all(D.weight_of(a) == zero for a in f.terms)

    def reynolds(self, f: Polynomial) -> Polynomial:
        """Average over the constant part, then keep the weight-zero terms."""
        D = self.desc
        F = self.field
        if not is_linearly_reductive(D):
            raise NotLinearlyReductiveError("not linearly reductive: p divides the order of the constant part")
        H = D.constant_group
        total = Polynomial(F, D.dim)
        for g in H.elements:
            total = total + act_on_polynomial(F, g, f)
        avg = total.scale(F.inv(H.order % F.p))
        zero = tuple(0 for _ in D.diag_orders)
        return Polynomial(F, D.dim, {a: c for a, c in avg.terms.items() if D.weight_of(a) == zero})

    def hilbert(self, D: int) -> list[int]:
        return [self.invariant_coordinates(n).shape[1] for n in range(D + 1)]

    def generators_up_to(self, D: int) -> InvariantRingData:
        """Greedy generators: in each degree, invariants outside the span of
        products of earlier generators with lower-degree invariants."""
        F = self.field
        d = self.desc.dim
        gens: list[tuple[int, Polynomial]] = []
        bases = {}
        for n in range(1, D + 1):
            piece = self.piece(n)
            index = {a: t for t, a in enumerate(piece.basis)}
            inv = self.invariant_coordinates(n)
            bases[n] = self.invariant_basis(n)
            rows = []
            for k, g in gens:
                for h in self.invariant_basis(n - k):
                    prod = g * h
                    v = np.zeros(piece.dim, dtype=np.int64)
                    for a, c in prod.terms.items():
                        v[index[a]] = c
                    rows.append(v)
            span = gf.row_basis(F, np.array(rows, dtype=np.int64)) if rows else np.zeros((0, piece.dim), dtype=np.int64)
            for t in range(inv.shape[1]):
                v = inv[:, t]
                cand = np.vstack([span, v[None, :]])
                if gf.rank(F, cand) > span.shape[0]:
                    span = gf.row_basis(F, cand)
                    gens.append((n, linear_combination(F, d, v, piece.basis)))
        bases[0] = self.invariant_basis(0)
        return InvariantRingData(D, bases, gens, self.hilbert(D))

    # ------------------------------------------------------------------
    def piece_module(self, n: int) -> KGModule:
        from .modrep import _make
        piece = self.piece(n)
        return _make(self.desc.constant_group, list(piece.action), piece.dim, f"S_{n}")


def _fixed_dimension(F, mats: Sequence[np.ndarray], dim: int, cols: list[int] | None = None) -> int:
    cols = list(range(dim)) if cols is None else cols
    if not cols:
        return 0
    if not mats:
        return len(cols)
    blocks = [F.sub(a, F.eye(dim))[:, cols] for a in mats]
    return gf.kernel(F, np.vstack(blocks)).shape[1]


@dataclass
class HilbertComparison:
    degrees: list
    by_kernel: dict  # label -> list of dims
    by_hom: dict
    rank_identity: list  # per degree: (lhs, dim S_n)
    agree: bool = field(default=True)

    def to_dict(self) -> dict:
        return {"degrees": self.degrees, "by_kernel": self.by_kernel, "by_hom": self.by_hom,
                "rank_identity": self.rank_identity, "agree": self.agree}


def hilbert_function_compare(ring: InvariantRing, data, n_max: int) -> HilbertComparison:
    """dim((P_i (x) k_chi (x) S_n)^G) two ways, plus the rank identity
    sum_i (dim V_i / dim End V_i) dim((P_i (x) S_n)^G) = dim S_n,
    which holds because kG is the sum of the P_i with those multiplicities."""
    desc = ring.desc
    F = ring.field
    chars = desc.characters if desc.diag_orders else [()]
    by_kernel: dict = {}
    by_hom: dict = {}
    identity = []
    agree = True
    for n in range(n_max + 1):
        piece = ring.piece(n)
        Sn = ring.piece_module(n)
        lhs = 0
        for lam in chars:
            # invariants of P (x) k_lam (x) S_n need monomial weight -lam
            target = tuple((-x) % m for x, m in zip(lam, desc.diag_orders))
            cols = [t for t, w in enumerate(piece.weights) if tuple(w) == target]
            sub = Sn.submodule(np.eye(piece.dim, dtype=np.int64)[:, cols]) if cols else None
            for dat in data:
                P = dat.projective_cover
                label = (dat.label if dat.projective_is_simple else f"P({dat.label})")
                if desc.diag_orders:
                    label += "*chi" + ",".join(map(str, target))
                if sub is None:
                    kdim = hdim = 0
                else:
                    T = P.tensor(sub)
                    kdim = _fixed_dimension(F, T.action, T.dim)
                    hdim = len(hom_space(P.dual(), sub))
                by_kernel.setdefault(label, []).append(kdim)
                by_hom.setdefault(label, []).append(hdim)
                agree &= kdim == hdim
                lhs += (dat.simple.dim // dat.end_dim) * kdim
        identity.append((lhs, piece.dim))
        agree &= lhs == piece.dim
    return HilbertComparison(list(range(n_max + 1)), by_kernel, by_hom, identity, agree)
