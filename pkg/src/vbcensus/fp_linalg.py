"""Dense linear algebra over F_2 and F_3.

Matrices are backed by numpy int64 arrays, reduced mod p on construction and
treated as immutable. Pivoting is deterministic: the first nonzero entry in
column order wins, so results are reproducible across runs.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ContractViolation

SUPPORTED_PRIMES = (2, 3)


def _check_prime(prime: int) -> None:
    if prime not in SUPPORTED_PRIMES:
        raise ContractViolation(f"unsupported prime {prime}; expected one of {SUPPORTED_PRIMES}")


class FpMatrix:
    """An immutable rows x cols matrix over F_p."""

    __slots__ = ("prime", "_a")

    def __init__(self, prime: int, entries, shape: Optional[tuple[int, int]] = None):
        _check_prime(prime)
        a = np.array(entries, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        if a.ndim == 1 and a.size == 0 and shape is None:
            a = a.reshape(0, 0)
        if a.ndim != 2:
            raise ContractViolation(f"matrix entries must be two-dimensional, got shape {a.shape}")
        a = np.mod(a, prime)
        a.setflags(write=False)
        self.prime = prime
        self._a = a

    @classmethod
    def zeros(cls, prime: int, rows: int, cols: int) -> "FpMatrix":
        return cls(prime, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, prime: int, size: int) -> "FpMatrix":
        return cls(prime, np.eye(size, dtype=np.int64))

    @classmethod
    def from_columns(cls, prime: int, rows: int, columns: Sequence[Sequence[int]]) -> "FpMatrix":
        if not columns:
            return cls.zeros(prime, rows, 0)
        return cls(prime, np.array(columns, dtype=np.int64).reshape(len(columns), rows).T)

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def array(self) -> np.ndarray:
        return self._a

    def tolist(self) -> list[list[int]]:
        return self._a.tolist()

    def transpose(self) -> "FpMatrix":
        return FpMatrix(self.prime, self._a.T)

    T = property(transpose)

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        if not isinstance(other, FpMatrix):
            return NotImplemented
        if other.prime != self.prime:
            raise ContractViolation("prime mismatch in matrix product")
        if self.cols != other.rows:
            raise ContractViolation(f"cannot multiply {self.shape} by {other.shape}")
        return FpMatrix(self.prime, self._a @ other._a)

    def apply(self, vector: Sequence[int]) -> np.ndarray:
        v = np.asarray(vector, dtype=np.int64)
        if v.shape != (self.cols,):
            raise ContractViolation(f"vector of length {v.shape} does not match {self.cols} columns")
        return np.mod(self._a @ v, self.prime)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.prime == other.prime and self.shape == other.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self) -> int:
        return hash((self.prime, self.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"FpMatrix(prime={self.prime}, {self.tolist()})"


def _rref_array(a: np.ndarray, prime: int) -> tuple[np.ndarray, list[int]]:
    a = np.array(a, dtype=np.int64, copy=True)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, prime)
        if inv != 1:
            a[r] = (a[r] * inv) % prime
        col = a[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col)
        if others.size:
            a[others] = (a[others] - np.outer(col[others], a[r])) % prime
        pivots.append(c)
        r += 1
    return a, pivots


def rref(m: FpMatrix) -> tuple[FpMatrix, list[int]]:
    """Reduced row-echelon form and the strictly increasing pivot columns."""
    a, pivots = _rref_array(m.array, m.prime)
    return FpMatrix(m.prime, a), pivots


def rank(m: FpMatrix) -> int:
    return len(_rref_array(m.array, m.prime)[1])


def kernel_basis(m: FpMatrix) -> list[np.ndarray]:
    """Basis of the null space, one vector per free column.

    The vector attached to free column f has a 1 at f, zeros at every other
    free column, and the negated rref entries at the pivot columns.
    """
    p = m.prime
    r, pivots = _rref_array(m.array, p)
    pivot_set = set(pivots)
    basis = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        v = np.zeros(m.cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-r[i, f]) % p
        basis.append(v)
    return basis


def solve(m: FpMatrix, b: Sequence[int]) -> Optional[np.ndarray]:
    """A solution x of m x = b, or None when the system is inconsistent."""
    vec = np.asarray(b, dtype=np.int64).reshape(-1)
    if vec.shape[0] != m.rows:
        raise ContractViolation(f"right-hand side has length {vec.shape[0]}, matrix has {m.rows} rows")
    aug = np.concatenate([m.array, np.mod(vec, m.prime).reshape(-1, 1)], axis=1)
    r, pivots = _rref_array(aug, m.prime)
    if pivots and pivots[-1] == m.cols:
        return None
    x = np.zeros(m.cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, m.cols]
    return x


class RowSpan:
    """Incrementally grown row space over F_p, kept in reduced form.

    ``add`` reports whether a vector enlarged the span; ``contains`` tests
    membership. Used to pick complements of an image inside a kernel.
    """

    def __init__(self, prime: int, width: int):
        _check_prime(prime)
        self.prime = prime
        self.width = width
        self._rows: dict[int, np.ndarray] = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, vector: Iterable[int]) -> np.ndarray:
        v = np.mod(np.asarray(vector, dtype=np.int64), self.prime)
        if v.shape != (self.width,):
            raise ContractViolation(f"vector length {v.shape} does not match span width {self.width}")
        for pc in sorted(self._rows):
            c = v[pc]
            if c:
                v = (v - c * self._rows[pc]) % self.prime
        return v

    def contains(self, vector: Iterable[int]) -> bool:
        return not self.reduce(vector).any()

    def add(self, vector: Iterable[int]) -> bool:
        v = self.reduce(vector)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        pc = int(nz[0])
        v = (v * pow(int(v[pc]), -1, self.prime)) % self.prime
        for q, row in self._rows.items():
            if row[pc]:
                self._rows[q] = (row - row[pc] * v) % self.prime
        self._rows[pc] = v
        return True
