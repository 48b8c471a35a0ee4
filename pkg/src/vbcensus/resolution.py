"""Minimal free resolutions over the Steenrod algebra and their Ext charts.

The resolution is built degree by degree: for each internal degree t and
each homological degree s, the differential of the existing free module is
written as a matrix over F_p, the kernel of the previous differential is
compared with its image, and new generators are added for a complement.
Exactness is asserted at every step.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import AmbiguityError, ConfigurationError, ContractViolation, ExactnessError, WindowTooSmallError
from .fp_linalg import FpMatrix, RowSpan, kernel_basis, rank
from .proj_modules import ModulePresentation
from .steenrod import DEFAULT_DEGREE_CAP, Monomial, admissible_basis, multiply_monomials, unit

log = logging.getLogger(__name__)

# differential value of a generator in stage s >= 1: {(previous generator index, monomial): coef};
# in stage 0 it is a module vector {basis index: coef}
Term = tuple[int, Monomial]


@dataclass(frozen=True)
class Generator:
    name: str
    s: int
    t: int

    @property
    def stem(self) -> int:
        return self.t - self.s


@dataclass
class ResolutionStage:
    s: int
    generators: list[Generator] = field(default_factory=list)
    differential: list[dict] = field(default_factory=list)

    def degree_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for g in self.generators:
            out[g.t] = out.get(g.t, 0) + 1
        return out


@dataclass
class Resolution:
    """Stages 0..s_max of a minimal resolution, valid in internal degrees <= t_max."""

    module: ModulePresentation
    t_max: int
    s_max: int
    stages: list[ResolutionStage]
    degree_cap: int = DEFAULT_DEGREE_CAP

    @property
    def prime(self) -> int:
        return self.module.prime

    def __len__(self) -> int:
        return len(self.stages)

    def __iter__(self) -> Iterator[ResolutionStage]:
        return iter(self.stages)

    def __getitem__(self, s: int) -> ResolutionStage:
        return self.stages[s]

    @property
    def is_empty(self) -> bool:
        return not self.stages

    def bidegrees(self) -> list[tuple[int, int]]:
        return [(g.s, g.t) for st in self.stages for g in st.generators]

    def generator_count(self) -> int:
        return sum(len(st.generators) for st in self.stages)

    def shifted(self, delta: int, module: ModulePresentation) -> "Resolution":
        stages = []
        for st in self.stages:
            gens = [Generator(_rename(g.name, g.s, g.t + delta), g.s, g.t + delta) for g in st.generators]
            stages.append(ResolutionStage(st.s, gens, [dict(d) for d in st.differential]))
        return Resolution(module, self.t_max + delta, self.s_max, stages, self.degree_cap)


def _rename(old: str, s: int, t: int) -> str:
    primes = len(old) - len(old.rstrip("'"))
    return f"e_{{{s},{t}}}" + "'" * primes


def _name(s: int, t: int, count: int) -> str:
    return f"e_{{{s},{t}}}" + "'" * count


class _FreeStage:
    """Working state for one stage: generators plus per-degree bases."""

    def __init__(self, prime: int, s: int, cap: int):
        self.prime = prime
        self.s = s
        self.cap = cap
        self.gens: list[Generator] = []
        self.diff: list[dict] = []

    def basis(self, t: int) -> list[Term]:
        out: list[Term] = []
        for gi, g in enumerate(self.gens):
            if g.t <= t:
                out.extend((gi, m) for m in admissible_basis(self.prime, t - g.t, self.cap))
        return out


def _image_free(prime: int, diff: dict, mono: Monomial) -> dict[Term, int]:
    acc: dict[Term, int] = {}
    for (gj, m2), c in diff.items():
        for m, d in multiply_monomials(prime, mono, m2):
            key = (gj, m)
            acc[key] = (acc.get(key, 0) + c * d) % prime
    return {k: v for k, v in acc.items() if v}


def _vector(entries: dict, index: dict, width: int) -> np.ndarray:
    v = np.zeros(width, dtype=np.int64)
    for key, c in entries.items():
        v[index[key]] = c
    return v


def resolve_minimal(
    m: ModulePresentation,
    t_max: int,
    s_max: int,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    memo: bool = True,
) -> Resolution:
    """Minimal resolution of ``m`` through stage ``s_max`` and internal degree ``t_max``.

    With ``memo`` set, resolutions are shared between modules whose
    signatures agree up to a shift of degrees.
    """
    if s_max < 0:
        raise ContractViolation(f"s_max must be nonnegative, got {s_max}")
    if m.is_empty or t_max < m.bottom:
        return Resolution(m, t_max, s_max, [], degree_cap)
    if t_max - m.bottom > degree_cap:
        raise ConfigurationError(
            f"window spans {t_max - m.bottom} degrees above the bottom cell, over the degree cap {degree_cap}"
        )
    if not memo:
        return _resolve(m, t_max, s_max, degree_cap)
    key = (m.signature(), t_max - m.bottom, s_max, degree_cap)
    base = _MEMO.get(key)
    if base is None:
        base = _resolve(m.shifted(-m.bottom), t_max - m.bottom, s_max, degree_cap)
        _MEMO[key] = base
    return base.shifted(m.bottom, m)


_MEMO: dict[tuple, Resolution] = {}


def clear_memo() -> None:
    _MEMO.clear()


def _resolve(m: ModulePresentation, t_max: int, s_max: int, cap: int) -> Resolution:
    p = m.prime
    stages = [_FreeStage(p, s, cap) for s in range(s_max + 1)]
    kernels: list[list[np.ndarray]] = [[] for _ in range(s_max + 1)]
    for t in range(m.bottom, t_max + 1):
        for s in range(s_max + 1):
            stage = stages[s]
            if s == 0:
                tgt = m.basis_in_degree(t)
                tgt_index = {i: j for j, i in enumerate(tgt)}
                prev_kernel = [np.eye(len(tgt), dtype=np.int64)[j] for j in range(len(tgt))]
            else:
                tgt = stages[s - 1].basis(t)
                tgt_index = {b: j for j, b in enumerate(tgt)}
                prev_kernel = kernels[s - 1]
            width = len(tgt)
            src = stage.basis(t)
            cols: list[np.ndarray] = []
            for gi, mono in src:
                if s == 0:
                    img = m.act(mono, stage.diff[gi])
                else:
                    img = _image_free(p, stage.diff[gi], mono)
                cols.append(_vector(img, tgt_index, width))
            span = RowSpan(p, width)
            for c in cols:
                span.add(c)
            image_rank = span.rank
            for v in prev_kernel:
                if span.add(v):
                    count = sum(1 for g in stage.gens if g.t == t)
                    g = Generator(_name(s, t, count), s, t)
                    stage.gens.append(g)
                    stage.diff.append({tgt[j]: int(c) for j, c in enumerate(v) if c})
                    src.append((len(stage.gens) - 1, unit(p)))
                    cols.append(v.copy())
            if span.rank != len(prev_kernel):
                raise ExactnessError(
                    f"image of stage {s} in degree {t} has rank {span.rank} but the kernel below has dimension {len(prev_kernel)}"
                )
            if image_rank > len(prev_kernel):
                raise ExactnessError(f"differential squares to a nonzero map at stage {s}, degree {t}")
            if s < s_max:
                mat = FpMatrix.from_columns(p, width, cols) if cols else FpMatrix.zeros(p, width, 0)
                kernels[s] = kernel_basis(mat)
    out = [ResolutionStage(st.s, list(st.gens), list(st.diff)) for st in stages]
    log.debug("resolved %s through t=%d, s=%d", m.descriptor(), t_max, s_max)
    return Resolution(m, t_max, s_max, out, cap)


# ---------------------------------------------------------------------------
# verification helpers


def differential_matrix(res: Resolution, s: int, t: int) -> FpMatrix:
    """Matrix of d_s in internal degree t (d_0 is the augmentation onto the module)."""
    p = res.prime
    m = res.module
    cap = res.degree_cap

    def basis(stage: ResolutionStage) -> list[Term]:
        out: list[Term] = []
        for gi, g in enumerate(stage.generators):
            if g.t <= t:
                out.extend((gi, mono) for mono in admissible_basis(p, t - g.t, cap))
        return out

    src = basis(res.stages[s])
    if s == 0:
        tgt = m.basis_in_degree(t)
        index = {i: j for j, i in enumerate(tgt)}
    else:
        tgt = basis(res.stages[s - 1])
        index = {b: j for j, b in enumerate(tgt)}
    cols = []
    for gi, mono in src:
        d = res.stages[s].differential[gi]
        img = m.act(mono, d) if s == 0 else _image_free(p, d, mono)
        cols.append(_vector(img, index, len(tgt)))
    if not cols:
        return FpMatrix.zeros(p, len(tgt), 0)
    return FpMatrix.from_columns(p, len(tgt), cols)


def check_minimal(res: Resolution) -> None:
    """Every differential coefficient on a previous generator lies in positive degree."""
    u = unit(res.prime) if not res.is_empty else None
    for st in res.stages[1:]:
        for g, d in zip(st.generators, st.differential):
            for (gj, mono), c in d.items():
                if mono == u and c:
                    raise ExactnessError(f"{g.name} has a unit coefficient; resolution is not minimal")


def check_exact(res: Resolution) -> None:
    """rank d_s + rank d_(s+1) equals the dimension of stage s, for every s < s_max and t <= t_max."""
    if res.is_empty:
        return
    for t in range(res.module.bottom, res.t_max + 1):
        ranks = [rank(differential_matrix(res, s, t)) for s in range(res.s_max + 1)]
        if ranks[0] != len(res.module.basis_in_degree(t)):
            raise ExactnessError(f"augmentation is not onto in degree {t}")
        for s in range(res.s_max):
            dim = differential_matrix(res, s, t).cols
            if ranks[s] + ranks[s + 1] != dim:
                raise ExactnessError(f"homology at stage {s}, degree {t}")


# ---------------------------------------------------------------------------
# charts


@dataclass(frozen=True)
class Dot:
    s: int
    t: int
    id: str

    @property
    def stem(self) -> int:
        return self.t - self.s


@dataclass(frozen=True)
class Line:
    source: str
    target: str
    label: str


def line_labels(prime: int) -> dict[Monomial, str]:
    if prime == 2:
        return {(1,): "h0", (2,): "h1", (4,): "h2"}
    return {(1,): "a0", (0, 1, 0): "h0"}


def tower_label(prime: int) -> str:
    return "h0" if prime == 2 else "a0"


@dataclass
class ExtChart:
    prime: int
    module: dict
    t_max: int
    s_max: int
    stem_max: int
    dots: list[Dot]
    lines: list[Line]
    towers: list[int]
    removed: list[dict] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._by_id = {d.id: d for d in self.dots}

    def dot(self, ident: str) -> Dot:
        return self._by_id[ident]

    def column_top(self, stem: int) -> int:
        return min(self.s_max, self.t_max - stem)

    def dots_in_stem(self, stem: int) -> list[Dot]:
        return sorted((d for d in self.dots if d.stem == stem), key=lambda d: (d.s, d.id))

    def positions(self) -> list[tuple[int, int]]:
        """(stem, s) of every dot, sorted."""
        return sorted((d.stem, d.s) for d in self.dots)

    def line_positions(self, label: Optional[str] = None) -> list[tuple[tuple[int, int], tuple[int, int], str]]:
        out = []
        for ln in self.lines:
            if label is not None and ln.label != label:
                continue
            a, b = self._by_id[ln.source], self._by_id[ln.target]
            lo, hi = (b, a) if a.s > b.s else (a, b)
            out.append(((lo.stem, lo.s), (hi.stem, hi.s), ln.label))
        return sorted(out)

    def without(self, ids: Sequence[str], note: Optional[dict] = None) -> "ExtChart":
        drop = set(ids)
        dots = [d for d in self.dots if d.id not in drop]
        lines = [ln for ln in self.lines if ln.source not in drop and ln.target not in drop]
        removed = list(self.removed) + ([note] if note else [])
        return ExtChart(self.prime, dict(self.module), self.t_max, self.s_max, self.stem_max,
                        dots, lines, list(self.towers), removed)

    @property
    def is_empty(self) -> bool:
        return not self.dots

    def to_json(self) -> dict:
        return {
            "prime": self.prime,
            "module": {"n": self.module.get("n"), "k": self.module.get("k")},
            "window": {"t_max": self.t_max, "s_max": self.s_max, "stem_max": self.stem_max},
            "dots": [{"s": d.s, "t": d.t, "id": d.id} for d in sorted(self.dots, key=lambda d: (d.t - d.s, d.s, d.id))],
            "lines": [{"from": ln.source, "to": ln.target, "label": ln.label} for ln in self.lines],
            "towers": list(self.towers),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ExtChart":
        w = data["window"]
        return cls(
            data["prime"], dict(data["module"]), w["t_max"], w["s_max"], w["stem_max"],
            [Dot(d["s"], d["t"], d["id"]) for d in data["dots"]],
            [Line(ln["from"], ln["to"], ln["label"]) for ln in data["lines"]],
            list(data["towers"]),
        )


def h0_chains(chart: ExtChart, stem: int) -> list[list[Dot]]:
    """Maximal strings of dots in one stem joined by the tower label, bottom first."""
    lab = tower_label(chart.prime)
    dots = chart.dots_in_stem(stem)
    ids = {d.id for d in dots}
    up: dict[str, str] = {}
    down: dict[str, str] = {}
    for ln in chart.lines:
        if ln.label != lab or ln.source not in ids:
            continue
        hi, lo = ln.source, ln.target
        if hi in down or lo in up:
            raise AmbiguityError(f"overlapping {lab}-lines at stem {stem}")
        down[hi] = lo
        up[lo] = hi
    chains = []
    for d in dots:
        if d.id in down:
            continue
        chain = [d]
        while chain[-1].id in up:
            chain.append(chart.dot(up[chain[-1].id]))
        chains.append(chain)
    return chains


def detect_towers(chart: ExtChart) -> list[int]:
    """Stems carrying a string that reaches the top of its visible column."""
    stems = sorted({d.stem for d in chart.dots if d.stem <= chart.stem_max})
    out = []
    for i in stems:
        top = chart.column_top(i)
        if any(ch[-1].s >= top for ch in h0_chains(chart, i)):
            out.append(i)
    return out


def chart_of(res: Resolution, stem_max: Optional[int] = None) -> ExtChart:
    """Dots, structure lines and towers read off a minimal resolution."""
    p = res.prime
    if stem_max is None:
        stem_max = res.t_max - res.s_max
    desc = res.module.descriptor()
    if res.is_empty:
        return ExtChart(p, desc, res.t_max, res.s_max, stem_max, [], [], [])
    labels = line_labels(p)
    dots = [Dot(g.s, g.t, g.name) for st in res.stages for g in st.generators]
    lines = []
    for s in range(1, len(res.stages)):
        prev = res.stages[s - 1].generators
        for g, d in zip(res.stages[s].generators, res.stages[s].differential):
            for (gj, mono), c in sorted(d.items(), key=lambda kv: (kv[0][0], kv[0][1])):
                if mono in labels and c:
                    lines.append(Line(g.name, prev[gj].name, labels[mono]))
    chart = ExtChart(p, desc, res.t_max, res.s_max, stem_max, dots, lines, [])
    chart.towers = detect_towers(chart)
    return chart


def check_towers(chart: ExtChart, module: ModulePresentation, stems: Optional[Sequence[int]] = None) -> None:
    """Rational-rank check: towers must match the rational cells stem by stem."""
    if module.rational_ranks is None or module.is_empty:
        return
    if stems is None:
        stems = range(module.bottom, chart.stem_max + 1)
    found = set(chart.towers)
    for i in stems:
        want = module.rational_ranks.get(i, 0)
        got = 1 if i in found else 0
        if got != min(want, 1):
            raise WindowTooSmallError(
                f"stem {i}: found {got} towers but the rational rank is {want}; enlarge t_max or s_max"
            )
        if want > 1:
            n_tow = sum(1 for ch in h0_chains(chart, i) if ch[-1].s >= chart.column_top(i))
            if n_tow != want:
                raise WindowTooSmallError(f"stem {i}: {n_tow} towers, rational rank {want}")
