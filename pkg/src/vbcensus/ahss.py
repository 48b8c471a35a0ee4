"""Atiyah-Hirzebruch bookkeeping for stable maps CP^l -> Sigma CP^infinity_r.

The E2 cell in column 2a and row -b is pi_b of the target, for 1 <= a <= l
and 2r+1 <= b <= 2l. Odd columns vanish, so only d2 and d4 can be nonzero
near the diagonal. d2 out of column 2a is multiplication by eta when a is
odd and zero when a is even; the one relevant d4 is fixed by the attaching
map of the top cell of CP^l/CP^(l-3). Cells are lattice subquotients, so
every differential shrinks cycles and grows boundaries exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Mapping, Optional, Sequence, Union

from .abgroup import Subquotient, apply_map, format_structure, structure_order
from .adams import AssembledGroup, StableData, stable_data
from .errors import AmbiguityError, ConfigurationError, ContractViolation, RangeError
from .steenrod import binomial_mod

Cell = tuple[int, int]  # (column, row); row = -stem


@dataclass(frozen=True)
class MosherTable:
    modulus: int
    min_l: int
    coefficients: dict[int, int]
    source: str

    def coefficient(self, l: int) -> int:
        if l < self.min_l:
            raise RangeError(f"the attaching-map table applies for l >= {self.min_l}, got l={l}")
        return self.coefficients[l % self.modulus]


@lru_cache(maxsize=None)
def load_mosher_table() -> MosherTable:
    d = json.loads(resources.files("vbcensus.data").joinpath("mosher.json").read_text())
    return MosherTable(d["modulus"], d["min_l"], {int(k): v for k, v in d["coefficients"].items()}, d["source"])


@dataclass(frozen=True)
class AHSSDifferential:
    r: int
    source: Cell
    target: Cell
    matrix: tuple[tuple[int, ...], ...]
    image: tuple[int, ...]
    kernel_index: tuple[int, ...]
    note: str = ""

    @property
    def is_zero(self) -> bool:
        return not self.image

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "source": list(self.source),
            "target": list(self.target),
            "matrix": [list(row) for row in self.matrix],
            "image": format_structure(self.image),
            "note": self.note,
        }


@dataclass
class AHSSPage:
    prime: int
    l: int
    rank: int
    page: int
    cells: dict[Cell, Subquotient]
    differentials: list[AHSSDifferential] = field(default_factory=list)
    final: bool = False

    @property
    def columns(self) -> list[int]:
        return list(range(2, 2 * self.l + 1, 2))

    @property
    def stems(self) -> list[int]:
        return list(range(2 * self.rank + 1, 2 * self.l + 1))

    def cell(self, column: int, row: int) -> Optional[Subquotient]:
        return self.cells.get((column, row))

    def structure(self, column: int, row: int) -> tuple[int, ...]:
        c = self.cells.get((column, row))
        return () if c is None else c.structure()

    def nonzero(self, column: int, row: int) -> bool:
        return bool(self.structure(column, row))

    def to_json(self) -> dict:
        return {
            "prime": self.prime,
            "l": self.l,
            "rank": self.rank,
            "page": "inf" if self.final else self.page,
            "cells": [
                {"column": c, "row": r, "group": str(sq)}
                for (c, r), sq in sorted(self.cells.items(), key=lambda kv: (-kv[0][1], kv[0][0]))
            ],
            "differentials": [d.to_json() for d in self.differentials],
        }

    def render(self) -> str:
        """Plain table: one line per row q, one column per p."""
        head = ["q\\p"] + [str(c) for c in self.columns]
        rows = [head]
        for b in self.stems:
            rows.append([str(-b)] + [str(self.cells[(c, -b)]) for c in self.columns])
        widths = [max(len(r[i]) for r in rows) for i in range(len(head))]
        title = f"E_{'inf' if self.final else self.page}  l={self.l} r={self.rank} p={self.prime}"
        lines = [title] + ["  ".join(x.rjust(w) for x, w in zip(r, widths)) for r in rows]
        return "\n".join(lines)


def check_metastable(l: int, rank: int) -> None:
    if l < 1:
        raise RangeError(f"l must be positive, got {l}")
    if 2 * rank < l:
        raise RangeError(f"rank r={rank} violates l/2 <= r (l={l})")
    if rank > l - 1:
        raise RangeError(f"rank r={rank} violates r <= l-1 (l={l})")


def build_e2(l: int, rank: int, prime: int, groups: Mapping[int, AssembledGroup]) -> AHSSPage:
    check_metastable(l, rank)
    cells: dict[Cell, Subquotient] = {}
    for b in range(2 * rank + 1, 2 * l + 1):
        if b not in groups:
            raise ConfigurationError(f"pi_{b} of the target is required for the E2 page")
        g = groups[b]
        for a in range(1, l + 1):
            cells[(2 * a, -b)] = Subquotient.full(g.orders)
    return AHSSPage(prime, l, rank, 2, cells)


def _apply_all(page: AHSSPage, maps: Sequence[tuple[Cell, Cell, Sequence[Sequence[int]], str]], r: int, new_page: int) -> AHSSPage:
    """Apply several differentials computed from the same page."""
    cells = dict(page.cells)
    recs = list(page.differentials)
    touched: set[Cell] = set()
    for src, tgt, mat, note in maps:
        if src in touched or tgt in touched:
            raise ContractViolation(f"cell used twice by one batch of d{r}")
        res = apply_map(page.cells[src], page.cells[tgt], mat)
        cells[src] = res.source
        cells[tgt] = res.target
        touched.update((src, tgt))
        recs.append(AHSSDifferential(r, src, tgt, tuple(tuple(int(x) for x in row) for row in mat),
                                     res.image_structure, res.kernel_index, note))
    return AHSSPage(page.prime, page.l, page.rank, new_page, cells, recs)


def apply_d2(page: AHSSPage, eta_maps: Optional[Mapping[int, Sequence[Sequence[int]]]]) -> AHSSPage:
    """d2 out of odd columns 2a (a odd) is eta; even a and p = 3 give zero."""
    if page.page != 2:
        raise ContractViolation(f"d2 acts on the E2 page, not E{page.page}")
    maps = []
    if page.prime == 2:
        for a in range(1, page.l, 2):
            for b in range(2 * page.rank + 1, 2 * page.l):
                if eta_maps is None or b not in eta_maps:
                    raise ConfigurationError(f"eta map out of stem {b} is required")
                src, tgt = (2 * a, -b), (2 * a + 2, -(b + 1))
                maps.append((src, tgt, eta_maps[b], "eta"))
    return _apply_all(page, maps, 2, 3)


def assert_no_d3(page: AHSSPage) -> AHSSPage:
    """d3 changes column parity and every odd column is zero."""
    if page.page != 3:
        raise ContractViolation(f"expected the E3 page, got E{page.page}")
    if any(c % 2 for c, _ in page.cells):
        raise ContractViolation("odd columns must be empty")
    return AHSSPage(page.prime, page.l, page.rank, 4, dict(page.cells), list(page.differentials))


def d4_coefficient(prime: int, l: int, mosher: Optional[MosherTable] = None) -> int:
    if prime == 2:
        return (mosher or load_mosher_table()).coefficient(l)
    return binomial_mod(l - 2, 1, 3)


def apply_d4(page: AHSSPage, mosher: Optional[MosherTable], nu_map: Optional[Sequence[Sequence[int]]]) -> AHSSPage:
    """The d4 from (2l-4, -(2l-3)) to the top diagonal cell, then the final page."""
    if page.page == 3:
        page = assert_no_d3(page)
    if page.page != 4:
        raise ContractViolation(f"d4 acts on the E4 page, not E{page.page}")
    l = page.l
    src, tgt = (2 * l - 4, -(2 * l - 3)), (2 * l, -2 * l)
    modeled: set[tuple[int, Cell, Cell]] = set()
    out = page
    if src in page.cells and tgt in page.cells:
        c = d4_coefficient(page.prime, l, mosher)
        if nu_map is None:
            raise ConfigurationError(f"nu map out of stem {2 * l - 3} is required")
        mat = [[c * x for x in row] for row in nu_map]
        label = "nu" if page.prime == 2 else "alpha1"
        out = _apply_all(page, [(src, tgt, mat, f"{c}*{label}")], 4, 5)
        modeled.add((4, src, tgt))
    else:
        out = AHSSPage(page.prime, l, page.rank, 5, dict(page.cells), list(page.differentials))
    check_unmodeled(out, modeled)
    out.final = True
    return out


def check_unmodeled(page: AHSSPage, modeled: set) -> None:
    """Every d_r (r >= 3) touching a nonzero diagonal cell, other than the modeled d4, has a zero end."""
    l = page.l
    lo = 2 * page.rank + 1
    for a in range(1, l + 1):
        diag = (2 * a, -2 * a)
        if diag not in page.cells or not page.nonzero(*diag):
            continue
        for r in range(3, 2 * l + 1):
            for src, tgt in (((2 * a - r, -(2 * a - r + 1)), diag), (diag, (2 * a + r, -(2 * a + r - 1)))):
                if (r, src, tgt) in modeled:
                    continue
                other = src if tgt == diag else tgt
                col, row = other
                if col < 2 or col > 2 * l or col % 2:
                    continue
                if -row < lo:
                    continue
                if -row > 2 * l:
                    raise AmbiguityError(f"d{r} at {diag} reaches stem {-row}, outside the computed window")
                if page.nonzero(col, row):
                    raise AmbiguityError(f"unmodeled d{r} between {src} and {tgt} has nonzero ends")


@dataclass(frozen=True)
class DiagonalOrder:
    order: Union[int, float]
    ambiguous: bool
    cells: tuple[tuple[Cell, str], ...]
    diagnostic: str = ""


def diagonal_order(page: AHSSPage) -> DiagonalOrder:
    survivors = []
    total: Union[int, float] = 1
    diag = ""
    for (c, r), sq in sorted(page.cells.items()):
        if c + r != 0:
            continue
        st = sq.structure()
        if not st:
            continue
        survivors.append(((c, r), format_structure(st)))
        o = structure_order(st)
        if o is None:
            total = math.inf
            diag = f"cell {(c, r)} is infinite ({format_structure(st)})"
        elif total != math.inf:
            total *= o
    return DiagonalOrder(total, len(survivors) > 1, tuple(survivors), diag)


def run_ahss(l: int, rank: int, prime: int, stable: Optional[StableData] = None) -> list[AHSSPage]:
    """E2, E4 and E-infinity pages."""
    check_metastable(l, rank)
    if stable is None:
        stable = stable_data(rank, prime)
    if stable.n != rank or stable.prime != prime:
        raise ContractViolation("stable data does not match the requested rank and prime")
    e2 = build_e2(l, rank, prime, stable.groups)
    eta = {b: stable.eta(b) for b in range(2 * rank + 1, 2 * l)} if prime == 2 else None
    e4 = assert_no_d3(apply_d2(e2, eta))
    nu = stable.nu(2 * l - 3) if 2 * l - 3 >= 2 * rank + 1 else None
    e_inf = apply_d4(e4, load_mosher_table() if prime == 2 else None, nu)
    return [e2, e4, e_inf]
