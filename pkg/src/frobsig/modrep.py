"""Modular representation theory of a finite matrix group over F_q.

Modules are given by one matrix per group generator.  The main tools are

* ``hom_space``: equivariant maps by a Kronecker-product linear system;
* ``MatrixAlgebra``: a finite-dimensional algebra of matrices with its
  Jacobson radical (iterated generalized trace forms of Cohen, Ivanyos and
  Wales, run over the prime field) and the quotient by it;
* ``primitive_idempotents``: Fitting-lemma splitting inside an
  endomorphism algebra;
* ``summand_multiplicity``: multiplicity of an indecomposable P in M as the
  rank, over End(P)/rad, of the composition pairing
  Hom(P, M) x Hom(M, P) -> End(P)/rad.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import gf
from .errors import DecompositionIncomplete, NotIndecomposableError, VerificationError
from .gf import GF
from .groupscheme import ConstantGroup

SPLIT_SEED = 20240601
MAX_SPLIT_TRIES = 400


@dataclass(eq=False)
class KGModule:
    group: ConstantGroup
    action: tuple
    name: str = ""

    def __post_init__(self):
        self.action = tuple(np.asarray(a, dtype=np.int64) for a in self.action)
        if len(self.action) != len(self.group.generators):
            raise ValueError(f"need {len(self.group.generators)} action matrices, got {len(self.action)}")

    @property
    def field(self) -> GF:
        return self.group.field

    @cached_property
    def dim(self) -> int:
        if self.action:
            return self.action[0].shape[0]
        return self._dim

    @cached_property
    def element_matrices(self) -> list[np.ndarray]:
        return self.group.evaluate(self.action, self.field) if self.action else [np.eye(self.dim, dtype=np.int64)]

    def rho(self, i: int) -> np.ndarray:
        """Matrix of the i-th enumerated group element."""
        return self.element_matrices[i]

    def verify(self) -> None:
        """Check that the generator matrices define a homomorphism on the enumerated group."""
        F, G = self.field, self.group
        mats = self.element_matrices
        for x in range(G.order):
            for s, g in enumerate(G.generators):
                y = G.index(F.matmul(g, G.elements[x]))
                if not np.array_equal(F.matmul(self.action[s], mats[x]), mats[y]):
                    raise VerificationError(f"module {self.name!r} violates a group relation")

    def algebra_element(self, coeffs: Sequence[int]) -> np.ndarray:
        """Action of sum_g c_g g (coefficients indexed by enumerated elements)."""
        F = self.field
        out = F.zeros(self.dim, self.dim)
        for c, M in zip(coeffs, self.element_matrices):
            if c:
                out = F.add(out, F.mul(np.int64(c), M))
        return out

    def direct_sum(self, other: "KGModule") -> "KGModule":
        mats = []
        for a, b in zip(self.action, other.action):
            Z = np.zeros((a.shape[0] + b.shape[0],) * 2, dtype=np.int64)
            Z[: a.shape[0], : a.shape[0]] = a
            Z[a.shape[0]:, a.shape[0]:] = b
            mats.append(Z)
        return _make(self.group, mats, self.dim + other.dim, f"{self.name}+{other.name}")

    def tensor(self, other: "KGModule") -> "KGModule":
        F = self.field
        mats = [F.kron(a, b) for a, b in zip(self.action, other.action)]
        return _make(self.group, mats, self.dim * other.dim, f"{self.name}*{other.name}")

    def dual(self) -> "KGModule":
        F = self.field
        mats = [gf.inverse(F, a).T.copy() for a in self.action]
        return _make(self.group, mats, self.dim, f"{self.name}^*")

    def submodule(self, basis: np.ndarray) -> "KGModule":
        """Restriction to the G-stable subspace spanned by the columns of ``basis``."""
        F = self.field
        mats = []
        for a in self.action:
            X = gf.solve(F, basis, F.matmul(a, basis))
            if X is None:
                raise VerificationError("subspace is not G-stable")
            mats.append(X)
        return _make(self.group, mats, basis.shape[1], self.name)

    def quotient(self, basis: np.ndarray) -> "KGModule":
        """Action on M / span(basis) in the basis of complementary unit vectors."""
        F = self.field
        n = self.dim
        comp = gf.extend_to_basis(F, basis, n)
        P = np.hstack([basis, comp])
        k = basis.shape[1]
        mats = []
        for a in self.action:
            X = gf.solve(F, P, F.matmul(a, comp))
            mats.append(X[k:])
        return _make(self.group, mats, comp.shape[1], f"{self.name}/rad")


def _make(group: ConstantGroup, mats, dim: int, name: str = "") -> KGModule:
    M = KGModule(group, tuple(mats), name)
    if not group.generators:
        M._dim = dim
        M.__dict__["dim"] = dim
    return M


def trivial_module(G: ConstantGroup, dim: int = 1) -> KGModule:
    return _make(G, [np.eye(dim, dtype=np.int64) for _ in G.generators], dim, "triv")


def regular_module(G: ConstantGroup) -> KGModule:
    """kG with basis the enumerated elements and the left multiplication action."""
    n = G.order
    mats = []
    for g in G.generators:
        P = np.zeros((n, n), dtype=np.int64)
        for x in range(n):
            P[G.index(G.field.matmul(g, G.elements[x])), x] = 1
        mats.append(P)
    return _make(G, mats, n, "kG")


def module_from_matrices(G: ConstantGroup, mats, name: str = "") -> KGModule:
    mats = [np.asarray(m, dtype=np.int64) for m in mats]
    dim = mats[0].shape[0] if mats else 1
    M = _make(G, mats, dim, name)
    M.verify()
    return M


def group_algebra_structure(G: ConstantGroup) -> np.ndarray:
    n = G.order
    T = G.mult_table
    c = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            c[i, j, T[i, j]] = 1
    return c


# ----------------------------------------------------------------------
# Hom spaces
# ----------------------------------------------------------------------
def hom_space(M: KGModule, N: KGModule) -> list[np.ndarray]:
    """Basis of Hom_G(M, N) as dim N x dim M matrices."""
    F = M.field
    m, n = M.dim, N.dim
    if m == 0 or n == 0:
        return []
    blocks = []
    Im, In = F.eye(m), F.eye(n)
    for a, b in zip(M.action, N.action):
        blocks.append(F.sub(F.kron(b, Im), F.kron(In, a.T.copy())))
    if not blocks:
        return [E.reshape(n, m) for E in np.eye(n * m, dtype=np.int64)]
    K = gf.kernel(F, np.vstack(blocks))
    return [K[:, t].reshape(n, m) for t in range(K.shape[1])]


# ----------------------------------------------------------------------
# finite-dimensional algebras
# ----------------------------------------------------------------------
def _scalar_matrix(F: GF, c: int) -> np.ndarray:
    """Matrix over F_p of multiplication by c on F_q in the power basis."""
    m = F.m
    M = np.zeros((m, m), dtype=np.int64)
    for k in range(m):
        M[:, k] = F.coords(int(F.mul(c, F.pow(F.p, k))))
    return M


def _restrict_scalars(F: GF, A: np.ndarray) -> np.ndarray:
    """An n x n matrix over F_q as an nm x nm matrix over F_p."""
    m = F.m
    n = A.shape[0]
    out = np.zeros((n * m, n * m), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if A[i, j]:
                out[i * m:(i + 1) * m, j * m:(j + 1) * m] = _scalar_matrix(F, int(A[i, j]))
    return out


def _batched_trace_power(P: np.ndarray, k: int, modulus: int) -> np.ndarray:
    """Tr(P_t^k) mod modulus for a stack of integer matrices."""
    n = P.shape[1]
    use_obj = modulus * modulus * max(n, 1) >= 2**62
    dt = object if use_obj else np.int64
    B = P.astype(dt) % modulus
    R = None
    while k:
        if k & 1:
            R = B if R is None else np.matmul(R, B) % modulus
        k >>= 1
        if k:
            B = np.matmul(B, B) % modulus
    return np.trace(R, axis1=1, axis2=2).astype(np.int64) % modulus


def _prime_field_radical(p: int, mats: np.ndarray) -> np.ndarray:
    """Radical of the F_p-algebra spanned by the (linearly independent) n x n
    matrices ``mats``, as coefficient rows.

    Ideal chain I_i = {a in I_(i-1) : g_i(ab) = 0 for every basis element b},
    g_i(x) = (Tr(x~^(p^i)) mod p^(i+1)) / p^i with x~ the integer lift of x,
    run for i = 0..floor(log_p n); the last term is the radical.
    """
    N, n = mats.shape[0], mats.shape[1]
    Fp = GF(p)
    lmax = 0
    while p ** (lmax + 1) <= n:
        lmax += 1
    I = np.eye(N, dtype=np.int64)
    for i in range(lmax + 1):
        if I.shape[0] == 0:
            break
        A = np.tensordot(I, mats, axes=(1, 0)) % p
        if i == 0:
            # Tr(ab) = sum_jk a_jk b_kj
            G = (A.reshape(A.shape[0], -1) @ np.transpose(mats, (0, 2, 1)).reshape(N, -1).T) % p
        else:
            mod = p ** (i + 1)
            G = np.zeros((I.shape[0], N), dtype=np.int64)
            for s in range(I.shape[0]):
                prods = np.matmul(A[s][None, :, :], mats) % p
                G[s] = (_batched_trace_power(prods, p**i, mod) // p**i) % p
        ker = gf.left_kernel(Fp, G)
        I = gf.row_basis(Fp, (ker @ I) % p) if ker.shape[0] else np.zeros((0, N), dtype=np.int64)
    return I


def radical_of_span(F: GF, basis: Sequence[np.ndarray]) -> np.ndarray:
    """Radical (rows of F_q-coordinates) of the unital algebra with the given
    linearly independent matrix basis; extension fields are handled over F_p."""
    N = len(basis)
    if N == 0:
        return np.zeros((0, 0), dtype=np.int64)
    p, m = F.p, F.m
    if m == 1:
        return _prime_field_radical(p, np.array(basis, dtype=np.int64))
    mats = []
    for b in basis:
        for s in range(m):
            mats.append(_restrict_scalars(F, F.mul(F.pow(F.p, s), b)))
    I = _prime_field_radical(p, np.array(mats, dtype=np.int64))
    if I.shape[0] == 0:
        return np.zeros((0, N), dtype=np.int64)
    rows = [[F.from_coords(r[t * m:(t + 1) * m]) for t in range(N)] for r in I]
    return gf.row_basis(F, np.array(rows, dtype=np.int64))


def jacobson_radical(F: GF, struct: np.ndarray) -> np.ndarray:
    """Radical of a unital algebra given by structure constants
    (``struct[i, j, k]`` = coefficient of b_k in b_i b_j), computed on the
    left regular representation."""
    N = struct.shape[0]
    left = [np.asarray(struct[t].T, dtype=np.int64) for t in range(N)]
    return radical_of_span(F, left)


class MatrixAlgebra:
    """A unital algebra spanned by square matrices (the unit need not be I)."""

    def __init__(self, F: GF, mats: Sequence[np.ndarray]):
        self.field = F
        mats = [np.asarray(M, dtype=np.int64) for M in mats]
        self.n = mats[0].shape[0]
        flat = np.array([M.ravel() for M in mats], dtype=np.int64)
        B = gf.row_basis(F, flat)
        self.basis = [B[i].reshape(self.n, self.n) for i in range(B.shape[0])]
        self._flat = B  # rows in reduced echelon form
        self._pivots = [int(np.flatnonzero(r)[0]) for r in B]
        self.dim = len(self.basis)

    def coords_many(self, Xs: np.ndarray, check: bool = False) -> np.ndarray:
        """Coordinates (columns) of flattened algebra elements given as columns.

        The basis is in reduced echelon form, so the coordinates of a member
        are its entries at the pivot positions.
        """
        Xs = np.asarray(Xs, dtype=np.int64)
        c = Xs[self._pivots]
        if check and not np.array_equal(self.field.matmul(self._flat.T, c), Xs):
            raise VerificationError("matrix is not in the algebra")
        return c

    def coords(self, X: np.ndarray) -> np.ndarray:
        return self.coords_many(np.asarray(X).reshape(-1, 1), check=True)[:, 0]

    def element(self, coords: Sequence[int]) -> np.ndarray:
        return self.field.lin_comb(coords, self.basis)

    @cached_property
    def structure(self) -> np.ndarray:
        F, N = self.field, self.dim
        prods = np.array([F.matmul(a, b).ravel() for a in self.basis for b in self.basis], dtype=np.int64)
        C = self.coords_many(prods.T)
        return C.T.reshape(N, N, N)

    @cached_property
    def radical(self) -> np.ndarray:
        if self.dim < self.n:
            c = self.structure
            R = radical_of_span(self.field, [np.asarray(c[t].T) for t in range(self.dim)])
        else:
            R = radical_of_span(self.field, self.basis)
        self._check_radical(R)
        return R

    def _check_radical(self, R: np.ndarray) -> None:
        """The computed radical must be a two-sided nilpotent ideal."""
        F = self.field
        if R.shape[0] == 0:
            return
        rmats = [self.element(r) for r in R]
        prods = [F.matmul(x, b).ravel() for x in rmats for b in self.basis]
        prods += [F.matmul(b, x).ravel() for x in rmats for b in self.basis]
        coords = self.coords_many(np.array(prods, dtype=np.int64).T).T
        if gf.rank(F, np.vstack([R, coords])) > R.shape[0]:
            raise VerificationError("computed radical is not an ideal")
        power = rmats
        for _ in range(self.dim + 1):
            flat = np.array([F.matmul(x, y).ravel() for x in power for y in rmats], dtype=np.int64)
            rows = gf.row_basis(F, flat)
            if rows.shape[0] == 0:
                return
            power = [r.reshape(self.n, self.n) for r in rows]
        raise VerificationError("computed radical is not nilpotent")

    @cached_property
    def _quotient(self):
        F = self.field
        R = self.radical
        N = self.dim
        comp = gf.extend_to_basis(F, R.T.copy() if R.size else np.zeros((N, 0), dtype=np.int64), N).T
        T = np.vstack([R, comp]) if R.size else comp
        Tinv = gf.inverse(F, T)
        return comp, Tinv, R.shape[0]

    @property
    def quotient_dim(self) -> int:
        return self.dim - self.radical.shape[0]

    def reduce_coords(self, coords: np.ndarray) -> np.ndarray:
        """Images in A/rad (coordinates on the chosen complement); accepts columns."""
        _, Tinv, r = self._quotient
        c = np.asarray(coords, dtype=np.int64)
        if c.ndim == 1:
            return self.field.matmul(c[None, :], Tinv)[0, r:]
        return self.field.matmul(c.T, Tinv)[:, r:].T

    @cached_property
    def quotient_structure(self) -> np.ndarray:
        F = self.field
        comp, _, _ = self._quotient
        f = comp.shape[0]
        mats = [self.element(c) for c in comp]
        prods = np.array([F.matmul(x, y).ravel() for x in mats for y in mats], dtype=np.int64).T
        red = self.reduce_coords(self.coords_many(prods))
        return red.T.reshape(f, f, f)

    def is_division(self) -> bool:
        """Whether A/rad is a field (A local).  Finite division rings are commutative,
        and a commutative semisimple F_q-algebra has as many simple factors as
        the dimension of its Frobenius-fixed subalgebra."""
        F = self.field
        f = self.quotient_dim
        if f == 0:
            return False
        Q = self.quotient_structure
        if not np.array_equal(Q, np.transpose(Q, (1, 0, 2))):
            return False
        frob = np.zeros((f, f), dtype=np.int64)
        for a in range(f):
            x = np.eye(f, dtype=np.int64)[a]
            frob[:, a] = _power_coords(F, Q, x, F.q)
        fixed = gf.kernel(F, F.sub(frob, F.eye(f)))
        return fixed.shape[1] == 1


def _mult_coords(F: GF, c: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    N = c.shape[2]
    out = np.zeros(N, dtype=np.int64)
    for i in np.flatnonzero(x):
        for j in np.flatnonzero(y):
            out = F.add(out, F.mul(F.mul(np.int64(x[i]), np.int64(y[j])), c[i, j]))
    return out


def _power_coords(F: GF, c: np.ndarray, x: np.ndarray, k: int) -> np.ndarray:
    result = None
    base = x
    while k:
        if k & 1:
            result = base if result is None else _mult_coords(F, c, result, base)
        base = _mult_coords(F, c, base, base)
        k >>= 1
    return result


# ----------------------------------------------------------------------
# idempotent splitting
# ----------------------------------------------------------------------
def _fitting_split(F: GF, x: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """Fitting decomposition of the whole space for x: projections onto
    im(x^n) along ker(x^n) and back, or None when x is invertible or nilpotent."""
    n = x.shape[0]
    xN = F.matpow(x, n)
    rx = gf.rank(F, xN)
    if rx == 0 or rx == n:
        return None
    U = gf.column_basis(F, xN)
    K = gf.kernel(F, xN)
    P = np.hstack([U, K])
    D = np.zeros((n, n), dtype=np.int64)
    D[np.arange(rx), np.arange(rx)] = 1
    e1 = F.matmul(F.matmul(P, D), gf.inverse(F, P))
    return e1, F.sub(F.eye(n), e1)


def _pairs_and_random(F: GF, basis: list[np.ndarray], rng: random.Random):
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            yield F.add(basis[i], basis[j])
    for _ in range(MAX_SPLIT_TRIES):
        coeffs = [rng.randrange(F.q) for _ in basis]
        yield F.lin_comb(coeffs, basis)


def primitive_idempotents(F: GF, algebra_mats: Sequence[np.ndarray], n: int) -> list[np.ndarray]:
    """Complete set of primitive orthogonal idempotents of the algebra spanned by
    ``algebra_mats`` (n x n, containing the identity).

    Each corner eAe is represented faithfully on eF.  Basis elements are
    tried first as Fitting splitters; if none splits, the corner is primitive
    exactly when eAe/rad is a field, and otherwise pairwise sums and then
    seeded random combinations are tried.  The order is deterministic.
    """
    rng = random.Random(SPLIT_SEED)
    mats = [np.asarray(M, dtype=np.int64) for M in algebra_mats]
    done: list[np.ndarray] = []
    stack = [F.eye(n)]
    while stack:
        e = stack.pop()
        U = gf.column_basis(F, e)
        Ce = gf.solve(F, U, e)  # coordinates on U of the projection e
        corner = [F.matmul(F.matmul(Ce, b), U) for b in mats]
        corner = [c for c in corner if c.any()]
        A = MatrixAlgebra(F, corner)
        split = None
        for x in A.basis:
            split = _fitting_split(F, x)
            if split is not None:
                break
        if split is None:
            if A.is_division():
                done.append(e)
                continue
            for x in _pairs_and_random(F, A.basis, rng):
                split = _fitting_split(F, x)
                if split is not None:
                    break
        if split is None:
            raise DecompositionIncomplete("no splitting endomorphism found for a decomposable summand")
        e1 = F.matmul(F.matmul(U, split[0]), Ce)
        stack.extend([F.sub(e, e1), e1])
    return done


def split_module(M: KGModule) -> list[KGModule]:
    """Indecomposable summands of M (as submodules in their own bases)."""
    F = M.field
    if M.dim == 0:
        return []
    ends = hom_space(M, M)
    parts = []
    for e in primitive_idempotents(F, ends, M.dim):
        B = gf.column_basis(F, e)
        X = M.submodule(B)
        X.basis = B  # columns in the coordinates of M
        parts.append(X)
    return parts


# ----------------------------------------------------------------------
# multiplicities
# ----------------------------------------------------------------------
def end_algebra(P: KGModule) -> MatrixAlgebra:
    cached = getattr(P, "_end_algebra", None)
    if cached is None:
        cached = MatrixAlgebra(P.field, hom_space(P, P))
        P._end_algebra = cached
    return cached


def local_end(P: KGModule) -> MatrixAlgebra:
    A = end_algebra(P)
    if not A.is_division():
        raise NotIndecomposableError(f"module {P.name!r} is not indecomposable (End/rad is not a field)")
    return A


def pairing_rank(E: MatrixAlgebra, compositions: np.ndarray, n_in: int, n_out: int) -> int:
    """Rank over End/rad of the pairing whose (i, j) entry is the endomorphism
    ``compositions[:, i * n_out + j]`` (flattened)."""
    F = E.field
    f = E.quotient_dim
    if n_in == 0 or n_out == 0:
        return 0
    red = E.reduce_coords(E.coords_many(compositions))  # f x (n_in n_out)
    mat = red.reshape(f, n_in, n_out).transpose(1, 2, 0).reshape(n_in, n_out * f)
    rk = gf.rank(F, mat)
    if rk % f:
        raise VerificationError(f"pairing rank {rk} not divisible by dim End/rad = {f}")
    return rk // f


def summand_multiplicity(P: KGModule, M: KGModule) -> int:
    """Largest r such that P^r is a direct summand of M (P indecomposable)."""
    E = local_end(P)
    F = P.field
    homs_in = hom_space(P, M)
    homs_out = hom_space(M, P)
    if not homs_in or not homs_out:
        return 0
    comps = np.array([F.matmul(b, a).ravel() for a in homs_in for b in homs_out], dtype=np.int64).T
    return pairing_rank(E, comps, len(homs_in), len(homs_out))


def is_isomorphic(A: KGModule, B: KGModule) -> bool:
    """Isomorphism test for an indecomposable A."""
    return A.dim == B.dim and summand_multiplicity(A, B) == 1


# ----------------------------------------------------------------------
# simples and projective covers
# ----------------------------------------------------------------------
@dataclass(eq=False)
class SimpleProjectiveDatum:
    label: str
    simple: KGModule
    projective_cover: KGModule
    end_dim: int
    multiplicity: int  # of P in the regular module

    @property
    def projective_is_simple(self) -> bool:
        return self.simple.dim == self.projective_cover.dim


def _is_trivial(V: KGModule) -> bool:
    return V.dim == 1 and all(int(a[0, 0]) == 1 for a in V.action)


def simples_and_projective_covers(G: ConstantGroup) -> list[SimpleProjectiveDatum]:
    """Split kG into indecomposable projectives, group them up to isomorphism and
    read off the simple heads V_i = P_i / rad(kG) P_i."""
    F = G.field
    kG = regular_module(G)
    parts = split_module(kG)
    if sum(P.dim for P in parts) != G.order:
        raise VerificationError("regular module splitting lost dimensions")
    classes: list[list[KGModule]] = []
    for P in parts:
        for cls in classes:
            if is_isomorphic(cls[0], P):
                cls.append(P)
                break
        else:
            classes.append([P])
    J = jacobson_radical(F, group_algebra_structure(G))
    data = []
    for cls in classes:
        P = cls[0]
        if J.shape[0]:
            imgs = np.hstack([P.algebra_element(r) for r in J])
            radP = gf.column_basis(F, imgs)
        else:
            radP = np.zeros((P.dim, 0), dtype=np.int64)
        V = P.quotient(radP) if radP.shape[1] else P
        end_dim = len(hom_space(V, V))
        if V.dim % end_dim:
            raise VerificationError("End_G(V) dimension does not divide dim V")
        data.append((P, V, end_dim, len(cls)))
    data.sort(key=lambda t: (not _is_trivial(t[1]), t[1].dim, t[0].dim))
    out = []
    k = 0
    for P, V, end_dim, mult in data:
        if _is_trivial(V):
            label = "triv"
        else:
            k += 1
            label = f"V{k}"
        V.name, P.name = label, f"P({label})"
        if mult * end_dim != V.dim:
            raise VerificationError(f"multiplicity of P({label}) in kG is {mult}, expected dim V / dim End V")
        out.append(SimpleProjectiveDatum(label, V, P, end_dim, mult))
    if sum(d.projective_cover.dim * d.multiplicity for d in out) != G.order:
        raise VerificationError("projective covers do not account for kG")
    return out


# ----------------------------------------------------------------------
# decomposition reports
# ----------------------------------------------------------------------
@dataclass
class Decomposition:
    counts: Counter
    parts: list = field(default_factory=list)
    complete: bool = True

    def to_dict(self) -> dict:
        return {"counts": dict(sorted(self.counts.items())), "complete": self.complete}


def jordan_type(M: KGModule) -> Counter:
    """Jordan block sizes of a generator of a cyclic p-group acting on M."""
    F = M.field
    G = M.group
    gen = next(i for i in range(G.order) if G.element_order(i) == G.order)
    N = F.sub(M.rho(gen), F.eye(M.dim))
    ranks = [M.dim]
    cur = F.eye(M.dim)
    for _ in range(M.dim):
        cur = F.matmul(cur, N)
        ranks.append(gf.rank(F, cur))
        if ranks[-1] == 0:
            break
    ranks += [0] * 2
    blocks = Counter()
    for k in range(1, len(ranks) - 1):
        at_least_k = ranks[k - 1] - ranks[k]
        at_least_k1 = ranks[k] - ranks[k + 1]
        if at_least_k - at_least_k1:
            blocks[k] = at_least_k - at_least_k1
    return blocks


def label_indecomposable(X: KGModule, data: Sequence[SimpleProjectiveDatum]) -> str:
    for d in data:
        if X.dim == d.simple.dim and is_isomorphic(d.simple, X):
            return d.label
    for d in data:
        if X.dim == d.projective_cover.dim and is_isomorphic(d.projective_cover, X):
            return f"P({d.label})"
    if X.group.is_cyclic_p_group():
        (size,) = jordan_type(X).keys()
        return f"J{size}"
    profile = tuple(len(hom_space(d.projective_cover, X)) for d in data)
    return f"I{X.dim}[{','.join(map(str, profile))}]"


def decompose_module(M: KGModule, data: Sequence[SimpleProjectiveDatum] | None = None) -> Decomposition:
    """Multiset of indecomposable labels of M with a verification pass."""
    if M.dim == 0:
        return Decomposition(Counter(), [], True)
    if data is None:
        data = simples_and_projective_covers(M.group)
    G = M.group
    if G.order % G.field.p and all(d.projective_is_simple for d in data):
        counts = Counter()
        for d in data:
            mult = summand_multiplicity(d.simple, M)
            if mult:
                counts[d.label] = mult
        complete = sum(counts[d.label] * d.simple.dim for d in data) == M.dim
        return Decomposition(counts, [], complete)
    try:
        parts = split_module(M)
    except DecompositionIncomplete:
        return Decomposition(Counter(), [], False)
    counts = Counter(label_indecomposable(X, data) for X in parts)
    complete = sum(X.dim for X in parts) == M.dim
    if complete:
        for d in data:
            for X0 in (d.simple, d.projective_cover):
                if len(hom_space(X0, M)) != sum(len(hom_space(X0, X)) for X in parts):
                    complete = False
    return Decomposition(counts, parts, complete)
