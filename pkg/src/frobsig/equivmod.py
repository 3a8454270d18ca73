"""S-free graded (G, S)-modules, Frobenius pushforwards and summand counting.

A module is free over S = F_q[x_1..x_d] on generators m_j of rational degree
delta_j.  A constant group element g acts S-semilinearly:
g . (f m_j) = (g . f) sum_i A^g_ij m_i, with A^g_ij homogeneous of degree
delta_j - delta_i.  A diagonalizable part is recorded as a weight per
generator (monomials carry the weights of their variables).

Everything is computed slice by slice: the degree-D slice is spanned by the
x^mu m_i with |mu| + delta_i = D.
"""

from __future__ import annotations

import csv
import io
import threading
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import gcd
from typing import Sequence

import numpy as np

from . import gf
from .errors import NonEtaleError, ResourceCapError, VerificationError
from .gf import GF
from .groupscheme import ConstantGroup, GroupSchemeDescriptor
from .modrep import KGModule, local_end
from .polyring import Polynomial, action_cache, monomial_weight, monomials

DEFAULT_SLICE_CAP = 5000
MAX_PUSHFORWARD_GENERATORS = 2**14


@dataclass(eq=False)
class GradedEquivariantModule:
    field: GF
    nvars: int
    group: ConstantGroup
    degrees: list
    action: list  # action[s][j] = {i: Polynomial}
    weights: list  # per generator, tuple mod orders
    orders: tuple = ()
    var_weights: np.ndarray | None = None
    labels: list | None = None
    slice_cap: int = DEFAULT_SLICE_CAP
    _slices: dict = field(default_factory=dict, repr=False)
    _actions: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        self.degrees = [Fraction(x) for x in self.degrees]
        if self.var_weights is None:
            self.var_weights = np.zeros((self.nvars, len(self.orders)), dtype=np.int64)
        if self.labels is None:
            self.labels = list(range(len(self.degrees)))

    @property
    def rank(self) -> int:
        return len(self.degrees)

    def monomial_weight(self, mu) -> tuple:
        return monomial_weight(mu, self.orders, self.var_weights) if self.orders else ()

    def element_weight(self, i: int, mu) -> tuple:
        return tuple((a + b) % n for a, b, n in zip(self.weights[i], self.monomial_weight(mu), self.orders))

    # -- slices --------------------------------------------------------
    def slice(self, D) -> tuple[list, dict]:
        """Basis [(i, mu)] of the degree-D slice and its index map."""
        D = Fraction(D)
        with self._lock:
            if D not in self._slices:
                basis = []
                for i, delta in enumerate(self.degrees):
                    k = D - delta
                    if k.denominator == 1 and k >= 0:
                        basis.extend((i, mu) for mu in monomials(int(k), self.nvars))
                if len(basis) > self.slice_cap:
                    raise ResourceCapError(f"slice of degree {D} has dimension {len(basis)} > cap {self.slice_cap}")
                self._slices[D] = (basis, {b: t for t, b in enumerate(basis)})
            return self._slices[D]

    def slice_weights(self, D) -> list:
        basis, _ = self.slice(D)
        return [self.element_weight(i, mu) for i, mu in basis]

    def slice_action(self, s: int, D) -> np.ndarray:
        """Matrix of generator s of the constant group on the degree-D slice."""
        D = Fraction(D)
        key = (s, D)
        with self._lock:
            cached = self._actions.get(key)
        if cached is not None:
            return cached
        F = self.field
        basis, index = self.slice(D)
        cache = action_cache(F, self.group.generators[s])
        M = np.zeros((len(basis), len(basis)), dtype=np.int64)
        for col, (j, mu) in enumerate(basis):
            gmu = cache.monomial_image(mu)
            for i, A in self.action[s][j].items():
                for nu, c in (gmu * A).terms.items():
                    row = index[(i, nu)]
                    M[row, col] = F.add(M[row, col], c)
        with self._lock:
            self._actions[key] = M
        return M

    def multiplication(self, f: Polynomial, D1, D2) -> np.ndarray:
        """Matrix of multiplication by f from slice D1 to slice D2."""
        F = self.field
        b1, _ = self.slice(D1)
        b2, idx2 = self.slice(D2)
        M = np.zeros((len(b2), len(b1)), dtype=np.int64)
        for col, (k, mu) in enumerate(b1):
            for nu, c in f.terms.items():
                key = (k, tuple(a + b for a, b in zip(mu, nu)))
                M[idx2[key], col] = F.add(M[idx2[key], col], c)
        return M

    def verify(self) -> None:
        """Homogeneity of action entries and group relations on generator slices."""
        for s in range(len(self.group.generators)):
            for j, col in enumerate(self.action[s]):
                for i, A in col.items():
                    gap = self.degrees[j] - self.degrees[i]
                    if A.is_zero():
                        continue
                    if gap.denominator != 1 or A.degrees() != {int(gap)}:
                        raise VerificationError(f"action entry ({i},{j}) is not homogeneous of degree {gap}")
        G = self.group
        F = self.field
        for D in sorted(set(self.degrees)):
            mats = [self.slice_action(s, D) for s in range(len(G.generators))]
            if not mats:
                continue
            elems = G.evaluate(mats, F)
            for x in range(G.order):
                for s, g in enumerate(G.generators):
                    y = G.index(F.matmul(g, G.elements[x]))
                    if not np.array_equal(F.matmul(mats[s], elems[x]), elems[y]):
                        raise VerificationError("pushforward action violates a group relation")

    def direct_sum(self, other: "GradedEquivariantModule") -> "GradedEquivariantModule":
        n = self.rank
        action = []
        for s in range(len(self.group.generators)):
            cols = [dict(c) for c in self.action[s]]
            cols += [{i + n: A for i, A in c.items()} for c in other.action[s]]
            action.append(cols)
        return GradedEquivariantModule(
            self.field, self.nvars, self.group, self.degrees + other.degrees, action,
            list(self.weights) + list(other.weights), self.orders, self.var_weights,
            list(self.labels) + list(other.labels), self.slice_cap)


def _constant_polynomial(F: GF, d: int, c: int) -> Polynomial:
    return Polynomial(F, d, {(0,) * d: int(c)})


def standard_module(P: KGModule, shift, weight: tuple = (), nvars: int | None = None, orders: tuple = (),
                    var_weights=None, slice_cap: int = DEFAULT_SLICE_CAP) -> GradedEquivariantModule:
    """P (x) k_weight (x) S with the generators (a basis of P) in degree ``shift``."""
    F = P.field
    d = nvars if nvars is not None else P.group.dim
    action = []
    for a in P.action:
        cols = []
        for j in range(P.dim):
            cols.append({i: _constant_polynomial(F, d, a[i, j]) for i in range(P.dim) if a[i, j]})
        action.append(cols)
    orders = tuple(orders)
    weight = tuple(weight) or (0,) * len(orders)
    weight = tuple(int(x) % n for x, n in zip(weight, orders))
    return GradedEquivariantModule(F, d, P.group, [Fraction(shift)] * P.dim, action,
                                   [weight] * P.dim, orders, var_weights,
                                   [(P.name, t) for t in range(P.dim)], slice_cap)


def descriptor_standard_module(desc: GroupSchemeDescriptor, P: KGModule, shift=0, weight: tuple = (),
                               slice_cap: int = DEFAULT_SLICE_CAP) -> GradedEquivariantModule:
    return standard_module(P, shift, weight, desc.dim, desc.diag_orders, desc.diag_weights, slice_cap)


def polynomial_ring_module(desc: GroupSchemeDescriptor, slice_cap: int = DEFAULT_SLICE_CAP) -> GradedEquivariantModule:
    from .modrep import trivial_module
    return descriptor_standard_module(desc, trivial_module(desc.constant_group), 0, (), slice_cap)


def _weight_solutions(target: tuple, orders: tuple, pe: int) -> list[tuple]:
    """All chi with pe * chi = target componentwise mod orders."""
    per = []
    for t, n in zip(target, orders):
        per.append([c for c in range(n) if (pe * c - t) % n == 0])
    return [tuple(c) for c in iproduct(*per)]


def frobenius_pushforward(M: GradedEquivariantModule, e: int, allow_infinitesimal: bool = False,
                          max_generators: int = MAX_PUSHFORWARD_GENERATORS) -> GradedEquivariantModule:
    """^eM with generators ^e(x^r m_i), r in [0, p^e)^d, of degree (|r| + delta_i) / p^e.

    Coefficients pass through the inverse e-th Frobenius.  With a
    diagonalizable part each ^e(x^r m_i) is replaced by one generator per
    character chi solving p^e chi = -(wt(x^r) + wt(m_i)), carrying weight
    -chi; its weight-zero part is the corresponding block of the pushforward
    of the invariants.  When some order is divisible by p this is only
    meaningful at the level of invariants, so it must be requested explicitly.
    """
    F = M.field
    p = F.p
    if e < 0:
        raise ValueError("e must be >= 0")
    if any(n % p == 0 for n in M.orders) and not allow_infinitesimal:
        raise NonEtaleError("non-etale group scheme: a diagonalizable factor has order divisible by p")
    pe = p**e
    d = M.nvars
    total = pe**d * M.rank
    if total > max_generators:
        raise ResourceCapError(f"pushforward would have {total} generators > cap {max_generators}")
    residues = sorted(iproduct(range(pe), repeat=d), key=lambda r: (sum(r), tuple(-x for x in r)))
    gens = []  # (r, i, chi)
    for i in range(M.rank):
        for r in residues:
            wt = M.element_weight(i, r)
            target = tuple((-w) % n for w, n in zip(wt, M.orders))
            for chi in _weight_solutions(target, M.orders, pe):
                gens.append((r, i, chi))
    index = {g: t for t, g in enumerate(gens)}
    degrees = [(Fraction(sum(r)) + M.degrees[i]) / pe for r, i, _ in gens]
    weights = [tuple((-c) % n for c, n in zip(chi, M.orders)) for _, _, chi in gens]
    action = []
    for s, g in enumerate(M.group.generators):
        cache = action_cache(F, g)
        cols = []
        for r, j, chi in gens:
            gr = cache.monomial_image(r)
            col: dict[int, dict] = {}
            for i, A in M.action[s][j].items():
                for c_exp, gamma in (gr * A).terms.items():
                    q = tuple(c // pe for c in c_exp)
                    rr = tuple(c % pe for c in c_exp)
                    chi2 = tuple((a + b) % n for a, b, n in zip(chi, M.monomial_weight(q), M.orders))
                    target = index[(rr, i, chi2)]
                    coeff = F.inv_frobenius(int(gamma), e)
                    terms = col.setdefault(target, {})
                    terms[q] = int(F.add(terms.get(q, 0), coeff))
            cols.append({t: Polynomial(F, d, terms) for t, terms in col.items()
                         if any(terms.values())})
        action.append(cols)
    labels = [(r, M.labels[i], chi) for r, i, chi in gens]
    return GradedEquivariantModule(F, d, M.group, degrees, action, weights, M.orders,
                                   M.var_weights, labels, M.slice_cap)


# ----------------------------------------------------------------------
# graded equivariant Hom
# ----------------------------------------------------------------------
@dataclass(eq=False)
class GradedMap:
    """A degree-``shift`` map, given by the images of the source generators
    as coordinate vectors on the target slices of degree delta_j + shift."""

    src: GradedEquivariantModule
    dst: GradedEquivariantModule
    shift: Fraction
    images: list

    def apply_to_slice(self, D) -> np.ndarray:
        """Matrix of the map from src slice D to dst slice D + shift."""
        F = self.src.field
        b_src, _ = self.src.slice(D)
        b_dst, idx_dst = self.dst.slice(Fraction(D) + self.shift)
        M = np.zeros((len(b_dst), len(b_src)), dtype=np.int64)
        for col, (j, mu) in enumerate(b_src):
            img_basis, _ = self.dst.slice(self.src.degrees[j] + self.shift)
            for t in np.flatnonzero(self.images[j]):
                k, nu = img_basis[t]
                row = idx_dst[(k, tuple(a + b for a, b in zip(mu, nu)))]
                M[row, col] = F.add(M[row, col], self.images[j][t])
        return M


def graded_hom(src: GradedEquivariantModule, dst: GradedEquivariantModule, shift=0) -> list[GradedMap]:
    """Basis of equivariant S-linear maps src -> dst raising degree by ``shift``."""
    F = src.field
    c = Fraction(shift)
    targets = [delta + c for delta in src.degrees]
    by_degree: dict = {}
    for D in set(targets):
        basis, _ = dst.slice(D)
        wts = dst.slice_weights(D) if dst.orders else None
        by_degree[D] = (len(basis), wts)
    sel = []
    for j, D in enumerate(targets):
        size, wts = by_degree[D]
        if wts is None:
            sel.append(list(range(size)))
        else:
            w0 = tuple(src.weights[j])
            sel.append([t for t, w in enumerate(wts) if w == w0])
    offsets = np.cumsum([0] + [len(s) for s in sel])
    ncols = int(offsets[-1])
    if ncols == 0:
        return []
    blocks = []
    for s in range(len(src.group.generators)):
        for j, D in enumerate(targets):
            rows = by_degree[D][0]
            if rows == 0:
                continue
            B = None
            if sel[j]:
                B = np.zeros((rows, ncols), dtype=np.int64)
                B[:, offsets[j]:offsets[j + 1]] = F.neg(dst.slice_action(s, D)[:, sel[j]])
            for i, A in src.action[s][j].items():
                if not sel[i]:
                    continue
                if B is None:
                    B = np.zeros((rows, ncols), dtype=np.int64)
                mult = dst.multiplication(A, targets[i], D)[:, sel[i]]
                B[:, offsets[i]:offsets[i + 1]] = F.add(B[:, offsets[i]:offsets[i + 1]], mult)
            if B is not None:
                blocks.append(B)
    if blocks:
        K = gf.kernel(F, np.vstack(blocks))
    else:
        K = np.eye(ncols, dtype=np.int64)
    out = []
    for t in range(K.shape[1]):
        images = []
        for j, D in enumerate(targets):
            v = np.zeros(by_degree[D][0], dtype=np.int64)
            if sel[j]:
                v[sel[j]] = K[offsets[j]:offsets[j + 1], t]
            images.append(v)
        out.append(GradedMap(src, dst, c, images))
    return out


def compose(beta: GradedMap, alpha: GradedMap) -> GradedMap:
    """beta o alpha."""
    F = alpha.src.field
    images = []
    for j, delta in enumerate(alpha.src.degrees):
        D = delta + alpha.shift
        M = beta.apply_to_slice(D)
        images.append(F.matmul(M, alpha.images[j][:, None])[:, 0] if M.size else
                      np.zeros(M.shape[0], dtype=np.int64))
    return GradedMap(alpha.src, beta.dst, alpha.shift + beta.shift, images)


# ----------------------------------------------------------------------
# summand counting
# ----------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class StandardLabel:
    """P (x) k_weight (x) S for an indecomposable KG-module P."""

    label: str
    module: KGModule
    weight: tuple = ()

    @property
    def u(self) -> int:
        return self.module.dim


@dataclass
class SummandCount:
    label: str
    per_shift: dict
    total: int

    def breakdown(self) -> str:
        return ";".join(f"{s}:{c}" for s, c in sorted(self.per_shift.items()) if c)


def _generator_projection(M: GradedEquivariantModule, D: Fraction, gens_at_D: list[int]) -> list[int]:
    """Positions of (j, 1) in the degree-D slice for the listed generators."""
    _, idx = M.slice(D)
    zero = (0,) * M.nvars
    return [idx[(j, zero)] for j in gens_at_D]


def summand_count_at(std: StandardLabel, M: GradedEquivariantModule, D) -> int:
    """Multiplicity of std(D) = P (x) k_weight (x) S(-D) as a summand of M.

    Only generators of M in degree exactly D meet the generators of std(D)
    in the composition pairing, so alpha and beta are cut down to those
    coordinates before pairing over End_G(P)/rad.
    """
    F = M.field
    D = Fraction(D)
    P = std.module
    gens_at_D = [j for j, delta in enumerate(M.degrees)
                 if delta == D and tuple(M.weights[j]) == tuple(std.weight)]
    if not gens_at_D:
        return 0
    X = standard_module(P, D, std.weight, M.nvars, M.orders, M.var_weights, M.slice_cap)
    alphas = graded_hom(X, M, 0)
    if not alphas:
        return 0
    betas = graded_hom(M, X, 0)
    if not betas:
        return 0
    pos = _generator_projection(M, D, gens_at_D)
    # alpha: columns t -> coordinates on gens_at_D ; beta: column per gen -> vector in P
    A_list = [np.array([a.images[t][pos] for t in range(P.dim)], dtype=np.int64).T for a in alphas]
    B_list = [np.array([b.images[j] for j in gens_at_D], dtype=np.int64).T for b in betas]
    A_list = _span_basis(F, A_list)
    B_list = _span_basis(F, B_list)
    if not A_list or not B_list:
        return 0
    E = local_end(P)
    comps = np.array([F.matmul(B, A).ravel() for A in A_list for B in B_list], dtype=np.int64).T
    from .modrep import pairing_rank
    return pairing_rank(E, comps, len(A_list), len(B_list))


def _span_basis(F: GF, mats: list[np.ndarray]) -> list[np.ndarray]:
    if not mats:
        return []
    shape = mats[0].shape
    flat = np.array([m.ravel() for m in mats], dtype=np.int64)
    R = gf.row_basis(F, flat)
    return [r.reshape(shape) for r in R]


def candidate_shifts(M: GradedEquivariantModule) -> list[Fraction]:
    return sorted(set(M.degrees))


def summand_count(std: StandardLabel, M: GradedEquivariantModule) -> SummandCount:
    per_shift = {}
    for D in candidate_shifts(M):
        n = summand_count_at(std, M, D)
        if n:
            per_shift[D] = n
    return SummandCount(std.label, per_shift, sum(per_shift.values()))


def standard_labels(desc: GroupSchemeDescriptor, data) -> list[StandardLabel]:
    """Projective covers (and k (x) S when k is not projective), tensored with
    every character of the diagonalizable part."""
    from .modrep import trivial_module
    base = []
    for d in data:
        name = d.label if d.projective_is_simple else f"P({d.label})"
        base.append((name, d.projective_cover))
    if not any(d.label == "triv" and d.projective_is_simple for d in data):
        k = trivial_module(desc.constant_group)
        k.name = "free"
        base.append(("free", k))
    out = []
    for lam in (desc.characters if desc.diag_orders else [()]):
        chi = tuple((-x) % n for x, n in zip(lam, desc.diag_orders))
        for name, P in base:
            if desc.diag_orders:
                tag = "chi" + ",".join(map(str, chi))
                label = tag if desc.constant_group.order == 1 else f"{name}*{tag}"
            else:
                label = name
            out.append(StandardLabel(label, P, lam))
    return out


# ----------------------------------------------------------------------
# Theta vectors
# ----------------------------------------------------------------------
@dataclass
class ThetaVector:
    coefficients: dict
    u_values: dict

    def norm(self) -> Fraction:
        return sum((abs(Fraction(c)) * self.u_values.get(k, 1) for k, c in self.coefficients.items()),
                   Fraction(0))


def theta_vector(counts: dict, e: int, d: int, p: int, u_values: dict | None = None) -> ThetaVector:
    scale = Fraction(1, p ** (d * e))
    coeffs = {k: Fraction(v) * scale for k, v in counts.items()}
    return ThetaVector(coeffs, dict(u_values or {}))


def theta_norm(v: ThetaVector) -> Fraction:
    return v.norm()


def counts_csv(rows: Sequence[tuple], p: int, d: int) -> str:
    """CSV with columns e, label, shift, count, normalized (one row per shift)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["e", "label", "shift", "count", "normalized"])
    for e, sc in rows:
        for shift, n in sorted(sc.per_shift.items()):
            w.writerow([e, sc.label, str(shift), n, f"{float(Fraction(n, p ** (d * e))):.6g}"])
    return buf.getvalue()
