"""From Ext charts to stable homotopy groups of Sigma CP^infinity_n.

Adams differentials are not computed from first principles. Every possible
differential ("room") in the window is located; the only one the engine
accepts sits between the tower in stem 2n+5 and the finite string in stem
2n+4 at p = 2, and its value is fixed by a table of classical group orders.
Any other room is an error.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .abgroup import check_homomorphism, format_structure
from .cache import resolve_cached
from .errors import (
    AmbiguityError,
    ConfigurationError,
    ContractViolation,
    FactsInconsistentError,
    RangeError,
)
from .proj_modules import stunted_module
from .resolution import Dot, ExtChart, check_towers, chart_of, h0_chains
from .steenrod import DEFAULT_DEGREE_CAP

DEFAULT_S_MAX = 12
DEFAULT_T_SPAN = 14  # t_max = 2n + 1 + DEFAULT_T_SPAN
MIN_S_MAX = 6
MIN_T_SPAN = 10

ELEMENT_DEGREE = {"eta": 1, "nu": 3}


@dataclass(frozen=True)
class KnownFacts:
    prime: int
    modulus: int
    stem_offset: int
    min_n: int
    orders: dict[int, int]
    sources: tuple[str, ...]

    def order_for(self, n: int) -> Optional[int]:
        return self.orders.get(n % self.modulus)


def _data(name: str) -> dict:
    return json.loads(resources.files("vbcensus.data").joinpath(name).read_text())


@lru_cache(maxsize=None)
def load_known_facts() -> KnownFacts:
    d = _data("known_facts.json")
    return KnownFacts(d["prime"], d["modulus"], d["stem_offset"], d["min_n"],
                      {int(k): v for k, v in d["orders"].items()}, tuple(d["sources"]))


@dataclass(frozen=True)
class Summand:
    order: int  # 0 for Z
    bottom: int
    dots: tuple[str, ...]

    @property
    def is_free(self) -> bool:
        return self.order == 0


@dataclass(frozen=True)
class AssembledGroup:
    prime: int
    stem: int
    summands: tuple[Summand, ...]

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(s.order for s in self.summands)

    @property
    def is_zero(self) -> bool:
        return not self.summands

    def order(self) -> Optional[int]:
        if any(s.is_free for s in self.summands):
            return None
        return math.prod(s.order for s in self.summands)

    def __str__(self) -> str:
        return format_structure(self.orders)

    def to_json(self) -> dict:
        return {
            "stem": self.stem,
            "group": str(self),
            "summands": [{"order": s.order or None, "bottom": s.bottom, "dots": list(s.dots)} for s in self.summands],
        }


@dataclass(frozen=True)
class Room:
    source: Dot
    target: Dot

    @property
    def length(self) -> int:
        return self.target.s - self.source.s


def _tower_ids(chart: ExtChart, stem: int) -> set[str]:
    out: set[str] = set()
    top = chart.column_top(stem)
    for ch in h0_chains(chart, stem):
        if ch[-1].s >= top:
            out.update(d.id for d in ch)
    return out


def find_room(chart: ExtChart, lo: int, hi: int) -> list[Room]:
    """Possible differentials d_r (r >= 2) into finite classes of stems lo..hi.

    Tower-to-tower differentials are excluded rationally and finite-to-tower
    ones by h0-linearity, so only finite targets are listed.
    """
    rooms = []
    for i in range(lo, hi + 1):
        towers = _tower_ids(chart, i)
        targets = [d for d in chart.dots_in_stem(i) if d.id not in towers and d.s <= chart.column_top(i)]
        sources = chart.dots_in_stem(i + 1)
        for tgt in targets:
            for src in sources:
                if tgt.s - src.s >= 2:
                    rooms.append(Room(src, tgt))
    return rooms


def resolve_adams_differentials(chart: ExtChart, facts: KnownFacts, n: int) -> ExtChart:
    """E-infinity chart through stem 2n+4, using ``facts`` to settle the one open differential."""
    bottom = 2 * n + 1
    top = bottom + 3
    rooms = find_room(chart, bottom, top)
    flagged = [r for r in rooms if r.target.stem == top and r.source.stem == top + 1]
    other = [r for r in rooms if r not in flagged]
    if other:
        desc = ", ".join(f"({r.source.stem},{r.source.s})->({r.target.stem},{r.target.s})" for r in other)
        raise AmbiguityError(f"unexpected room for Adams differentials: {desc}")
    known = facts.order_for(n) if chart.prime == facts.prime else None
    finite = [d for d in chart.dots_in_stem(top) if d.id not in _tower_ids(chart, top)]
    if known is None:
        if flagged:
            raise AmbiguityError(f"n={n}: a differential into stem {top} is possible but no fact decides it")
        return chart
    if n < facts.min_n:
        raise RangeError(f"known orders in stem 2n+{facts.stem_offset} are tabulated for n >= {facts.min_n}")
    have = len(finite)
    want = round(math.log(known, chart.prime)) if known > 1 else 0
    if chart.prime ** want != known:
        raise FactsInconsistentError(f"tabulated order {known} is not a power of {chart.prime}")
    kill = have - want
    if kill == 0:
        return chart
    if kill != 1 or not flagged:
        raise FactsInconsistentError(
            f"n={n}: E2 has {have} classes in stem {top} but the tabulated order is {known}"
        )
    top_dot = max(finite, key=lambda d: d.s)
    tower_bottom = min((d for d in chart.dots_in_stem(top + 1) if d.id in _tower_ids(chart, top + 1)),
                       key=lambda d: d.s, default=None)
    hit = [r for r in flagged if r.target.id == top_dot.id and r.length == 2 and tower_bottom is not None
           and r.source.id == tower_bottom.id]
    if len(hit) != 1:
        raise FactsInconsistentError(f"n={n}: no d2 from the tower bottom reaches the top class of stem {top}")
    r = hit[0]
    note = {"r": 2, "source": r.source.id, "target": r.target.id,
            "source_pos": [r.source.stem, r.source.s], "target_pos": [r.target.stem, r.target.s]}
    return chart.without([r.source.id, r.target.id], note)


def assemble_groups(e_inf: ExtChart, n: int, p: int) -> dict[int, AssembledGroup]:
    """Groups in stems 0..2n+4 from h0-strings (a0-strings at p = 3)."""
    if e_inf.prime != p:
        raise ContractViolation(f"chart is at p={e_inf.prime}, not {p}")
    out: dict[int, AssembledGroup] = {}
    for i in range(0, 2 * n + 5):
        summands = []
        tower = _tower_ids(e_inf, i)
        for ch in h0_chains(e_inf, i):
            ids = tuple(d.id for d in ch)
            if ids[0] in tower:
                summands.append(Summand(0, ch[0].s, ids))
            else:
                summands.append(Summand(p ** len(ch), ch[0].s, ids))
        summands.sort(key=lambda s: (s.order != 0, s.bottom, s.order))
        out[i] = AssembledGroup(p, i, tuple(summands))
    return out


def _line_label(p: int, element: str) -> Optional[str]:
    if element not in ELEMENT_DEGREE:
        raise ConfigurationError(f"unknown element {element!r}; expected one of {sorted(ELEMENT_DEGREE)}")
    if p == 2:
        return {"eta": "h1", "nu": "h2"}[element]
    return {"eta": None, "nu": "h0"}[element]


def multiplication_map(e_inf: ExtChart, groups: dict[int, AssembledGroup], element: str, stem: int) -> list[list[int]]:
    """Matrix (target summands x source summands) of multiplication by eta or nu.

    A source generator whose bottom dot at filtration f has a line to a dot
    at f+1 maps to p^((f+1) - f0) times the generator of the target summand
    (bottom filtration f0) containing that dot.
    """
    p = e_inf.prime
    label = _line_label(p, element)
    tstem = stem + ELEMENT_DEGREE[element]
    if stem not in groups or tstem not in groups:
        raise ConfigurationError(f"groups for stems {stem} and {tstem} are required")
    src, tgt = groups[stem], groups[tstem]
    mat = [[0] * len(src.summands) for _ in tgt.summands]
    if label is None:
        return mat
    where = {d: j for j, s in enumerate(tgt.summands) for d in s.dots}
    for j, s in enumerate(src.summands):
        b = e_inf.dot(s.dots[0])
        for ln in e_inf.lines:
            if ln.label != label or ln.target != b.id:
                continue
            x = e_inf.dot(ln.source)
            if x.stem != tstem:
                continue
            if x.id not in where:
                raise ContractViolation(f"line target {x.id} lies in no summand of stem {tstem}")
            k = where[x.id]
            e = x.s - tgt.summands[k].bottom
            if e < 0:
                raise ContractViolation(f"line into {x.id} lies below its summand")
            mat[k][j] += p ** e
    for k, s in enumerate(tgt.summands):
        if s.order:
            mat[k] = [v % s.order for v in mat[k]]
    check_homomorphism(mat, src.orders, tgt.orders)
    return mat


# ---------------------------------------------------------------------------
# end to end


@dataclass
class StableData:
    n: int
    prime: int
    t_max: int
    s_max: int
    e2: ExtChart
    e_inf: ExtChart
    groups: dict[int, AssembledGroup]
    differentials: list[dict] = field(default_factory=list)

    def group(self, stem: int) -> AssembledGroup:
        return self.groups[stem]

    def eta(self, stem: int) -> list[list[int]]:
        return multiplication_map(self.e_inf, self.groups, "eta", stem)

    def nu(self, stem: int) -> list[list[int]]:
        return multiplication_map(self.e_inf, self.groups, "nu", stem)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "prime": self.prime,
            "window": {"t_max": self.t_max, "s_max": self.s_max},
            "groups": [self.groups[i].to_json() for i in sorted(self.groups)],
            "differentials": self.differentials,
        }


def default_window(n: int) -> tuple[int, int]:
    return 2 * n + 1 + DEFAULT_T_SPAN, DEFAULT_S_MAX


def check_window(n: int, t_max: int, s_max: int) -> None:
    if s_max < MIN_S_MAX:
        raise ConfigurationError(f"s_max={s_max} is below the sound minimum {MIN_S_MAX}")
    if t_max - (2 * n + 1) < MIN_T_SPAN:
        raise ConfigurationError(f"t_max={t_max} must be at least 2n+1+{MIN_T_SPAN}={2 * n + 1 + MIN_T_SPAN}")


def compute_stable(
    n: int,
    prime: int,
    t_max: Optional[int] = None,
    s_max: Optional[int] = None,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    cache_dir: Optional[Union[str, Path]] = None,
    use_cache: bool = False,
) -> StableData:
    """p-local stable homotopy of Sigma CP^infinity_n in stems <= 2n+4."""
    if n < 1:
        raise RangeError(f"n must be at least 1, got {n}")
    dt, ds = default_window(n)
    t_max = dt if t_max is None else t_max
    s_max = ds if s_max is None else s_max
    check_window(n, t_max, s_max)
    module = stunted_module(prime, n, None, t_max)
    res = resolve_cached(module, t_max, s_max, degree_cap, cache_dir, use_cache)
    e2 = chart_of(res, stem_max=2 * n + 5)
    check_towers(e2, module)
    e_inf = resolve_adams_differentials(e2, load_known_facts(), n)
    groups = assemble_groups(e_inf, n, prime)
    return StableData(n, prime, t_max, s_max, e2, e_inf, groups, list(e_inf.removed))


@lru_cache(maxsize=None)
def stable_data(n: int, prime: int) -> StableData:
    """Memoized ``compute_stable`` at the default window."""
    return compute_stable(n, prime)


