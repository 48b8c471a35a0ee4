"""Counting bundles over CP^l with vanishing Chern classes.

For rank r = l - offset (offset 1 or 2) in the metastable range, the count
is the order of the diagonal of the AHSS for stable maps
CP^l -> Sigma CP^infinity_r, taken prime by prime. Only 2 and 3 contribute:
the relevant stable stems have no torsion at primes >= 5.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Optional

from .ahss import diagonal_order, run_ahss
from .errors import AmbiguityError, RangeError

PRIMES = (2, 3)
MIN_L = {1: 3, 2: 4}


def check_offset(offset: int) -> None:
    if offset not in MIN_L:
        raise RangeError(f"rank offset must be 1 or 2, got {offset}")


def local_order(l: int, offset: int, prime: int) -> int:
    check_offset(offset)
    if l < MIN_L[offset]:
        raise RangeError(f"rank l-{offset} counts need l > {MIN_L[offset] - 1}, got l={l}")
    pages = run_ahss(l, l - offset, prime)
    d = diagonal_order(pages[-1])
    if d.order == math.inf:
        raise AmbiguityError(f"l={l}, p={prime}: {d.diagnostic}")
    return int(d.order)


@lru_cache(maxsize=None)
def local_orders(l: int, offset: int) -> tuple[tuple[int, int], ...]:
    return tuple((p, local_order(l, offset, p)) for p in PRIMES)


def count_bundles(l: int, offset: int) -> int:
    """Number of rank (l - offset) bundles over CP^l with all Chern classes zero."""
    return math.prod(o for _, o in local_orders(l, offset))


@dataclass(frozen=True)
class CensusRow:
    l: int
    local: tuple[tuple[int, int], ...]
    count: int

    def to_json(self) -> dict:
        return {"l": self.l, "count": self.count, "local": {str(p): o for p, o in self.local}}


@dataclass
class CountTable:
    offset: int
    rows: list[CensusRow] = field(default_factory=list)

    @property
    def values(self) -> dict[int, int]:
        return {r.l: r.count for r in self.rows}

    def local_values(self, prime: int) -> dict[int, int]:
        return {r.l: dict(r.local)[prime] for r in self.rows}

    def period(self) -> Optional[int]:
        return minimal_period(self.values)

    def residue_table(self, period: Optional[int] = None) -> dict[int, int]:
        period = period or self.period()
        if not period:
            return {}
        return residue_table(self.values, period)

    def to_json(self) -> dict:
        per = self.period()
        return {
            "rank_offset": self.offset,
            "rows": [r.to_json() for r in self.rows],
            "period": per,
            "residues": {str(k): v for k, v in sorted(self.residue_table(per).items())} if per else {},
        }


def minimal_period(values: dict[int, int]) -> Optional[int]:
    """Smallest P such that v(l) = v(l+P) whenever both are tabulated; None if empty."""
    if not values:
        return None
    ls = sorted(values)
    span = ls[-1] - ls[0] + 1
    for p in range(1, span + 1):
        if all(values[l] == values[l + p] for l in ls if l + p in values):
            return p
    return span


def residue_table(values: dict[int, int], period: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for l in sorted(values):
        r = l % period
        if r in out and out[r] != values[l]:
            raise AmbiguityError(f"values are not {period}-periodic at l={l}")
        out[r] = values[l]
    return out


def census(l_min: int, l_max: int, offset: int) -> CountTable:
    check_offset(offset)
    table = CountTable(offset)
    for l in range(l_min, l_max + 1):
        local = local_orders(l, offset)
        table.rows.append(CensusRow(l, local, math.prod(o for _, o in local)))
    return table


# ---------------------------------------------------------------------------
# reference tables


@lru_cache(maxsize=None)
def load_reference_tables() -> dict:
    return json.loads(resources.files("vbcensus.data").joinpath("reference_tables.json").read_text())


def expected_count(l: int, offset: int) -> int:
    ref = load_reference_tables()[f"rank_offset_{offset}"]
    return ref["values"][str(l % ref["modulus"])]


def expected_local(l: int, prime: int) -> int:
    key = "rank_offset_2_two_local" if prime == 2 else "rank_offset_2_three_local"
    ref = load_reference_tables()[key]
    return ref["values"][str(l % ref["modulus"])]


def verify_census(table: CountTable) -> list[dict]:
    """Rows disagreeing with the reference tables (empty when all agree)."""
    bad = []
    for row in table.rows:
        want = expected_count(row.l, table.offset)
        if want != row.count:
            bad.append({"l": row.l, "computed": row.count, "expected": want})
        if table.offset == 2:
            for p, o in row.local:
                w = expected_local(row.l, p)
                if w != o:
                    bad.append({"l": row.l, "prime": p, "computed": o, "expected": w})
    return bad
