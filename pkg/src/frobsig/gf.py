"""Exact arithmetic over F_{p^m} and dense linear algebra on top of it.

Field elements are plain integers in ``range(q)``: the element with
power-basis coordinates ``(c_0, ..., c_{m-1})`` is encoded as
``sum(c_k * p**k)``.  Matrices are ``numpy.int64`` arrays of such codes.
For prime fields this is ordinary residue arithmetic; extension fields go
through log/exp tables (multiplication) and digit tables (addition).
"""

from __future__ import annotations

from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConfigError

MAX_FIELD_SIZE = 2**16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _poly_rem(a: list[int], b: list[int], p: int) -> list[int]:
    """Remainder of a by monic-able b over F_p (coefficient lists, low to high)."""
    a = [c % p for c in a]
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - f * c) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = [c % p for c in poly]
    deg = len(poly) - 1
    if deg < 1 or poly[-1] == 0:
        return False
    for k in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=k):
            if not _poly_rem(poly, list(low) + [1], p):
                return False
    return True


class GF:
    """The finite field F_q, q = p**m, with an explicit modulus polynomial.

    ``modulus`` lists coefficients from the constant term up; it must be
    monic of degree m and irreducible over F_p.  For m == 1 it may be omitted.
    """

    def __init__(self, p: int, m: int = 1, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise ConfigError(f"p={p} is not prime")
        if m < 1:
            raise ConfigError(f"extension degree m={m} must be >= 1")
        if p**m > MAX_FIELD_SIZE:
            raise ConfigError(f"field size {p}^{m} exceeds cap {MAX_FIELD_SIZE}")
        if modulus is None:
            if m != 1:
                raise ConfigError("modulus polynomial required when m > 1")
            modulus = [0, 1]
        modulus = [int(c) % p for c in modulus]
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ConfigError(f"modulus must be monic of degree m={m}, got {modulus}")
        if m > 1 and not is_irreducible(modulus, p):
            raise ConfigError(f"modulus {modulus} is reducible over F_{p}")
        self.p, self.m, self.q = p, m, p**m
        self.modulus = tuple(modulus)
        self.prime = m == 1
        if not self.prime:
            self._build_tables()

    # ------------------------------------------------------------------
    # construction helpers
    # ------------------------------------------------------------------
    def _mul_coords(self, a: list[int], b: list[int]) -> list[int]:
        p, m = self.p, self.m
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] = (prod[i + j] + x * y) % p
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k]
            if c:
                for i in range(m):
                    prod[k - m + i] = (prod[k - m + i] - c * self.modulus[i]) % p
        return prod[:m]

    def _build_tables(self) -> None:
        p, m, q = self.p, self.m, self.q
        codes = np.arange(q, dtype=np.int64)
        self._digits = np.stack([(codes // p**k) % p for k in range(m)], axis=-1)
        self._weights = np.array([p**k for k in range(m)], dtype=np.int64)
        order = q - 1
        factors = _prime_factors(order)
        gen = None
        for cand in range(2, q):
            c = [int(v) for v in self._digits[cand]]
            if all(self._coords_pow(c, order // f) != [1] + [0] * (m - 1) for f in factors):
                gen = c
                break
        if gen is None:  # pragma: no cover - every finite field has a generator
            raise RuntimeError("no primitive element found")
        exp = np.zeros(2 * order, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        cur = [1] + [0] * (m - 1)
        for k in range(order):
            code = self.from_coords(cur)
            exp[k] = code
            log[code] = k
            cur = self._mul_coords(cur, gen)
        exp[order:] = exp[:order]
        self._exp, self._log = exp, log
        if p != 2:
            self._neg = ((-self._digits) % p) @ self._weights

    def _coords_pow(self, c: list[int], k: int) -> list[int]:
        result = [1] + [0] * (self.m - 1)
        base = c
        while k:
            if k & 1:
                result = self._mul_coords(result, base)
            base = self._mul_coords(base, base)
            k >>= 1
        return result

    # ------------------------------------------------------------------
    # element conversion
    # ------------------------------------------------------------------
    def coords(self, a: int) -> tuple[int, ...]:
        a = int(a)
        return tuple((a // self.p**k) % self.p for k in range(self.m))

    def from_coords(self, coords: Sequence[int]) -> int:
        if len(coords) != self.m:
            raise ConfigError(f"expected {self.m} coordinates, got {list(coords)}")
        return sum((int(c) % self.p) * self.p**k for k, c in enumerate(coords))

    def element(self, x) -> int:
        """Parse a config value: an int is a prime-field residue, a list is coordinates."""
        if isinstance(x, (list, tuple)):
            return self.from_coords(x)
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            return int(x) % self.p
        raise ConfigError(f"cannot interpret {x!r} as an element of F_{self.q}")

    def elements(self) -> range:
        return range(self.q)

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.m, self.modulus))

    def __repr__(self) -> str:
        if self.prime:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m}, modulus={list(self.modulus)})"

    # ------------------------------------------------------------------
    # arithmetic; every op accepts python ints or int64 arrays
    # ------------------------------------------------------------------
    def add(self, a, b):
        if self.prime:
            return (a + b) % self.p
        if self.p == 2:
            return np.bitwise_xor(a, b)
        return ((self._digits[a] + self._digits[b]) % self.p) @ self._weights

    def neg(self, a):
        if self.prime:
            return (-a) % self.p
        if self.p == 2:
            return a
        return self._neg[a]

    def sub(self, a, b):
        if self.prime:
            return (a - b) % self.p
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.prime:
            return (a * b) % self.p
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        r = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, r)

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in finite field")
        if self.prime:
            if np.ndim(a) == 0:
                return pow(int(a), self.p - 2, self.p)
            return np.array([pow(int(x), self.p - 2, self.p) for x in np.ravel(a)]).reshape(np.shape(a))
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        a = int(a)
        if k < 0:
            a, k = int(self.inv(a)), -k
        if self.prime:
            return pow(a, k, self.p)
        if a == 0:
            return 1 if k == 0 else 0
        return int(self._exp[(int(self._log[a]) * k) % (self.q - 1)])

    def frobenius(self, a: int, e: int = 1) -> int:
        return self.pow(a, self.p ** (e % self.m))

    def inv_frobenius(self, c: int, e: int) -> int:
        """The unique b with b**(p**e) == c."""
        if e < 0:
            raise ValueError("e must be nonnegative")
        return self.pow(c, self.p ** ((self.m - e % self.m) % self.m))

    def primitive_root_of_unity(self, n: int) -> int:
        if (self.q - 1) % n:
            raise ValueError(f"F_{self.q} has no primitive {n}-th root of unity")
        if self.prime:
            for g in range(1, self.q):
                if all(pow(g, n // f, self.p) != 1 for f in _prime_factors(n)) and pow(g, n, self.p) == 1:
                    return g
            raise ValueError(f"no primitive {n}-th root of unity found")  # pragma: no cover
        return int(self._exp[(self.q - 1) // n])

    # ------------------------------------------------------------------
    # matrices
    # ------------------------------------------------------------------
    def array(self, rows) -> np.ndarray:
        """Matrix from nested config values (ints or coordinate lists)."""
        out = np.array([[self.element(x) for x in row] for row in rows], dtype=np.int64)
        if out.ndim != 2:
            raise ConfigError("matrix rows must have equal length")
        return out

    def zeros(self, r: int, c: int) -> np.ndarray:
        return np.zeros((r, c), dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if self.prime:
            return (A @ B) % self.p
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for k in range(A.shape[1]):
            col = A[:, k]
            if col.any():
                out = self.add(out, self.mul(col[:, None], B[k][None, :]))
        return out

    def matpow(self, A: np.ndarray, k: int) -> np.ndarray:
        result = self.eye(A.shape[0])
        base = A
        while k:
            if k & 1:
                result = self.matmul(result, base)
            base = self.matmul(base, base)
            k >>= 1
        return result

    def kron(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if self.prime:
            return np.kron(A, B) % self.p
        out = self.mul(A[:, None, :, None], B[None, :, None, :])
        return out.reshape(A.shape[0] * B.shape[0], A.shape[1] * B.shape[1])

    def scale(self, c: int, A: np.ndarray) -> np.ndarray:
        return self.mul(np.int64(c), np.asarray(A, dtype=np.int64))

    def dot(self, u: np.ndarray, v: np.ndarray) -> int:
        return int(self.matmul(np.asarray(u)[None, :], np.asarray(v)[:, None])[0, 0])

    def lin_comb(self, coeffs: Sequence[int], mats: Sequence[np.ndarray]) -> np.ndarray:
        out = np.zeros_like(np.asarray(mats[0], dtype=np.int64))
        for c, M in zip(coeffs, mats):
            if c:
                out = self.add(out, self.mul(np.int64(c), M))
        return out


# ----------------------------------------------------------------------
# Gaussian elimination
# ----------------------------------------------------------------------
def rref(F: GF, A: np.ndarray, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form.

    Pivots are searched column by column, taking the first row with a
    nonzero entry.  Only the first ``ncols`` columns are eligible as pivots.
    """
    R = np.array(A, dtype=np.int64, copy=True)
    m, n = R.shape
    if ncols is None:
        ncols = n
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        lead = int(R[r, c])
        if lead != 1:
            R[r, c:] = F.mul(R[r, c:], F.inv(lead))
        col = R[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            if F.prime:
                R[rows, c:] = (R[rows, c:] - col[rows, None] * R[r, c:][None, :]) % F.p
            else:
                R[rows, c:] = F.sub(R[rows, c:], F.mul(col[rows, None], R[r, c:][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(F: GF, A: np.ndarray) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(F, A)[1])


def _kernel_from_rref(F: GF, R: np.ndarray, pivots: list[int], n: int) -> np.ndarray:
    free = [c for c in range(n) if c not in set(pivots)]
    K = np.zeros((n, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        K[f, k] = 1
        for i, pc in enumerate(pivots):
            K[pc, k] = F.neg(R[i, f])
    return K


def kernel(F: GF, A: np.ndarray) -> np.ndarray:
    """Columns spanning {v : A v = 0}."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(F, A)
    return _kernel_from_rref(F, R, piv, n)


def left_kernel(F: GF, A: np.ndarray) -> np.ndarray:
    """Rows spanning {v : v A = 0}."""
    return kernel(F, np.asarray(A).T).T


def row_basis(F: GF, A: np.ndarray) -> np.ndarray:
    """Reduced basis of the row space (rows)."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape[0] == 0:
        return A.reshape(0, A.shape[1])
    R, piv = rref(F, A)
    return R[: len(piv)]


def column_basis(F: GF, A: np.ndarray) -> np.ndarray:
    """Columns of A at the pivot positions: a basis of the column space drawn from A."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape[1] == 0:
        return A
    _, piv = rref(F, A)
    return A[:, piv]


def solve(F: GF, A: np.ndarray, B: np.ndarray) -> np.ndarray | None:
    """Some X with A X = B, or None when the system is inconsistent."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if B.ndim == 1:
        X = solve(F, A, B[:, None])
        return None if X is None else X[:, 0]
    m, n = A.shape
    R, piv = rref(F, np.hstack([A, B]), ncols=n)
    rk = len(piv)
    if rk < m and R[rk:, n:].any():
        return None
    X = np.zeros((n, B.shape[1]), dtype=np.int64)
    for i, pc in enumerate(piv):
        X[pc] = R[i, n:]
    return X


def inverse(F: GF, A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    R, piv = rref(F, np.hstack([A, np.eye(n, dtype=np.int64)]), ncols=n)
    if len(piv) < n:
        raise ZeroDivisionError("matrix is singular")
    return R[:, n:]


def is_invertible(F: GF, A: np.ndarray) -> bool:
    return A.shape[0] == A.shape[1] and rank(F, A) == A.shape[0]


def extend_to_basis(F: GF, U: np.ndarray, n: int) -> np.ndarray:
    """Columns completing the column space of U to F^n, chosen among unit vectors."""
    U = np.asarray(U, dtype=np.int64).reshape(n, -1)
    M = np.hstack([U, np.eye(n, dtype=np.int64)])
    _, piv = rref(F, M)
    return np.eye(n, dtype=np.int64)[:, [c - U.shape[1] for c in piv if c >= U.shape[1]]]


class KernelSolve(NamedTuple):
    rank: int
    kernel: np.ndarray
    solution: np.ndarray | None
    consistent: bool


def rank_kernel_solve(F: GF, M: np.ndarray, rhs: np.ndarray | None = None) -> KernelSolve:
    """Rank, kernel basis (columns) and an optional particular solution of M X = rhs.

    An inconsistent system gives ``solution=None, consistent=False``.
    """
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1]
    R, piv = rref(F, M)
    K = _kernel_from_rref(F, R, piv, n)
    if rhs is None:
        return KernelSolve(len(piv), K, None, True)
    rhs = np.asarray(rhs, dtype=np.int64)
    if rhs.shape[0] != M.shape[0]:
        raise ValueError(f"rhs has {rhs.shape[0]} rows, matrix has {M.shape[0]}")
    X = solve(F, M, rhs)
    return KernelSolve(len(piv), K, X, X is not None)
