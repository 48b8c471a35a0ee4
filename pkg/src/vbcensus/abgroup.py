"""Finitely generated abelian groups as lattice subquotients.

A group with cyclic decomposition Z/o_1 + ... + Z/o_k (o = 0 meaning Z) is
modelled as Z^k modulo the relation lattice spanned by o_i e_i. A
subquotient is a pair of lattices R <= B <= Z <= Z^k: the cycles Z and the
boundaries B, with group Z/B. Differentials shrink Z and grow B. All integer
work goes through Smith normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence

from sympy import Matrix, ZZ, eye, zeros
from sympy.matrices.normalforms import smith_normal_decomp

from .errors import ContractViolation


def _snf(a: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """S, U, V with U a V = S in Smith form."""
    return smith_normal_decomp(a, domain=ZZ)


def _diag(s: Matrix) -> list[int]:
    return [int(s[i, i]) for i in range(min(s.shape)) if s[i, i] != 0]


def lattice_basis(gens: Matrix) -> Matrix:
    """A basis (as columns) of the lattice spanned by the columns of ``gens``."""
    k = gens.rows
    if gens.cols == 0 or k == 0:
        return zeros(k, 0)
    s, u, _ = _snf(gens)
    d = _diag(s)
    return (u.inv() * s)[:, : len(d)]


def lattice_coords(basis: Matrix, vectors: Matrix) -> Optional[Matrix]:
    """Integer X with basis * X = vectors, or None when some column lies outside the lattice."""
    k, r = basis.shape
    if vectors.cols == 0:
        return zeros(r, 0)
    if r == 0:
        return zeros(0, vectors.cols) if all(x == 0 for x in vectors) else None
    s, u, v = _snf(basis)
    # basis = U^-1 S V^-1, so basis x = w  <=>  S (V^-1 x) = U w
    uw = u * vectors
    y = zeros(r, vectors.cols)
    for j in range(vectors.cols):
        for i in range(k):
            d = s[i, i] if i < r else 0
            if d == 0:
                if uw[i, j] != 0:
                    return None
                continue
            if uw[i, j] % d != 0:
                return None
            y[i, j] = uw[i, j] // d
    return v * y


def integer_kernel(a: Matrix) -> Matrix:
    """Basis (columns) of the integer null space of ``a``."""
    if a.cols == 0:
        return zeros(0, 0)
    if a.rows == 0:
        return eye(a.cols)
    s, _, v = _snf(a)
    r = len(_diag(s))
    return v[:, r:]


def contains(outer: Matrix, inner: Matrix) -> bool:
    basis = lattice_basis(outer)
    return lattice_coords(basis, inner) is not None


def relation_lattice(orders: Sequence[int]) -> Matrix:
    k = len(orders)
    cols = [[o if i == j else 0 for i in range(k)] for j, o in enumerate(orders) if o != 0]
    if not cols:
        return zeros(k, 0)
    return Matrix(cols).T


def quotient_structure(outer: Matrix, inner: Matrix) -> tuple[int, ...]:
    """Cyclic orders of outer/inner (0 = Z), inner assumed to lie in outer.

    Trivial factors are omitted; free summands come first, then finite
    orders in divisibility order.
    """
    basis = lattice_basis(outer)
    r = basis.cols
    if r == 0:
        return ()
    x = lattice_coords(basis, lattice_basis(inner) if inner.cols else zeros(basis.rows, 0))
    if x is None:
        raise ContractViolation("inner lattice is not contained in the outer lattice")
    if x.cols == 0:
        return (0,) * r
    s, _, _ = _snf(x)
    d = [abs(v) for v in _diag(s)]
    torsion = tuple(v for v in d if v != 1)
    return (0,) * (r - len(d)) + torsion


def structure_order(structure: Sequence[int]) -> Optional[int]:
    """Order of a group given by cyclic orders, None if infinite."""
    if any(o == 0 for o in structure):
        return None
    return reduce(lambda a, b: a * b, structure, 1)


def format_structure(structure: Sequence[int]) -> str:
    parts = ["Z" if o == 0 else f"Z/{o}" for o in structure]
    return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class Subquotient:
    """Z/B inside the ambient group with the given cyclic orders."""

    orders: tuple[int, ...]
    cycles: Matrix
    boundaries: Matrix

    @classmethod
    def full(cls, orders: Sequence[int]) -> "Subquotient":
        orders = tuple(int(o) for o in orders)
        return cls(orders, eye(len(orders)) if orders else zeros(0, 0), relation_lattice(orders))

    @property
    def rank(self) -> int:
        return len(self.orders)

    def structure(self) -> tuple[int, ...]:
        if not self.orders:
            return ()
        return quotient_structure(self.cycles, self.boundaries)

    def order(self) -> Optional[int]:
        return structure_order(self.structure())

    @property
    def is_zero(self) -> bool:
        return self.structure() == ()

    def __str__(self) -> str:
        return format_structure(self.structure())


@dataclass(frozen=True)
class MapResult:
    source: Subquotient
    target: Subquotient
    image_structure: tuple[int, ...]
    kernel_index: tuple[int, ...]


def _as_matrix(mat: Sequence[Sequence[int]], rows: int, cols: int) -> Matrix:
    if rows == 0 or cols == 0:
        return zeros(rows, cols)
    m = Matrix(mat)
    if m.shape != (rows, cols):
        raise ContractViolation(f"map matrix has shape {m.shape}, expected {(rows, cols)}")
    return m


def check_homomorphism(mat: Sequence[Sequence[int]], source_orders: Sequence[int], target_orders: Sequence[int]) -> None:
    """The matrix must send the source relations into the target relations."""
    m = _as_matrix(mat, len(target_orders), len(source_orders))
    rel_s = relation_lattice(source_orders)
    if rel_s.cols and m.rows:
        if not contains(relation_lattice(target_orders), m * rel_s):
            raise ContractViolation("matrix does not define a homomorphism between the given groups")


def apply_map(source: Subquotient, target: Subquotient, mat: Sequence[Sequence[int]]) -> MapResult:
    """Apply a differential given in ambient coordinates.

    The new target boundaries are B_t + M Z_s; the new source cycles are
    {x in Z_s : M x in B_t}. The image and the index [Z_s : Z_s'] are
    returned so callers can check they agree.
    """
    m = _as_matrix(mat, target.rank, source.rank)
    if source.rank == 0 or target.rank == 0:
        return MapResult(source, target, (), ())
    zs = lattice_basis(source.cycles)
    mz = m * zs
    if not contains(target.cycles, mz):
        raise ContractViolation("differential does not land in the target cycles")
    if source.boundaries.cols and not contains(target.boundaries, m * source.boundaries):
        raise ContractViolation("differential is not well defined on the source quotient")
    new_b = target.boundaries.row_join(mz)
    stacked = mz.row_join(-target.boundaries) if target.boundaries.cols else mz
    ker = integer_kernel(stacked)
    new_z = zs * ker[: zs.cols, :] if ker.cols else zeros(source.rank, 0)
    new_z = new_z.row_join(source.boundaries) if source.boundaries.cols else new_z
    new_source = Subquotient(source.orders, lattice_basis(new_z) if new_z.cols else new_z, source.boundaries)
    new_target = Subquotient(target.orders, target.cycles, new_b)
    image = quotient_structure(new_b, target.boundaries)
    index = quotient_structure(source.cycles, new_source.cycles)
    return MapResult(new_source, new_target, image, index)
