"""Text, SVG and JSON renderings of Ext charts."""

from __future__ import annotations

import json
from typing import Optional, Union
from xml.sax.saxutils import escape

from .ahss import AHSSPage
from .errors import ConfigurationError
from .resolution import ExtChart, h0_chains, tower_label

FORMATS = ("ascii", "svg", "json")
CELL = 4
GLYPHS = {"h0": "|", "a0": "|", "h1": "/", "h2": "~"}
COLORS = {"h0": "#000000", "a0": "#000000", "h1": "#1f5fbf", "h2": "#bf3f1f"}


def _stem_range(chart: ExtChart, lo: Optional[int], hi: Optional[int]) -> tuple[int, int]:
    stems = [d.stem for d in chart.dots]
    if lo is None:
        lo = min(stems) if stems else 0
    if hi is None:
        hi = chart.stem_max if stems else lo + 4
    return lo, max(lo, hi)


def _visible(chart: ExtChart, lo: int, hi: int):
    dots = [d for d in chart.dots if lo <= d.stem <= hi]
    ids = {d.id for d in dots}
    lines = [ln for ln in chart.lines if ln.source in ids and ln.target in ids]
    return dots, lines


def summary(chart: ExtChart, lo: int, hi: int) -> dict:
    """Towers, the dots outside towers, and the lines not internal to a tower."""
    lab = tower_label(chart.prime)
    in_tower: set[str] = set()
    for i in chart.towers:
        if lo <= i <= hi:
            for ch in h0_chains(chart, i):
                if ch[-1].s >= chart.column_top(i):
                    in_tower.update(d.id for d in ch)
    dots, lines = _visible(chart, lo, hi)
    free = sorted((d.stem, d.s) for d in dots if d.id not in in_tower)
    ext = []
    for ln in lines:
        if ln.label == lab and ln.source in in_tower and ln.target in in_tower:
            continue
        a, b = chart.dot(ln.target), chart.dot(ln.source)
        ext.append((ln.label, (a.stem, a.s), (b.stem, b.s)))
    return {"towers": [i for i in chart.towers if lo <= i <= hi], "dots": free, "lines": sorted(ext)}


def render_ascii(chart: ExtChart, stem_min: Optional[int] = None, stem_max: Optional[int] = None) -> str:
    lo, hi = _stem_range(chart, stem_min, stem_max)
    dots, lines = _visible(chart, lo, hi)
    s_top = max([d.s for d in dots] + [0])
    width = (hi - lo + 1) * CELL
    grid = [[" "] * width for _ in range(2 * s_top + 2)]

    def row(s: float) -> int:
        return int(2 * (s_top - s)) + 1

    def col(stem: float) -> int:
        return int((stem - lo) * CELL + CELL // 2)

    for ln in lines:
        a, b = chart.dot(ln.target), chart.dot(ln.source)
        r = row(a.s + 0.5)
        g = GLYPHS.get(ln.label, "?")
        if b.stem == a.stem:
            grid[r][col(a.stem)] = g
        else:
            c0, c1 = col(a.stem), col(b.stem)
            for c in range(c0 + 1, c1):
                if grid[r][c] == " ":
                    grid[r][c] = g
    counts: dict[tuple[int, int], int] = {}
    for d in dots:
        counts[(d.stem, d.s)] = counts.get((d.stem, d.s), 0) + 1
    for (stem, s), k in counts.items():
        grid[row(s)][col(stem)] = "o" if k == 1 else str(min(k, 9))
    for i in chart.towers:
        if lo <= i <= hi:
            grid[0][col(i)] = "^"
    out = [f"Ext chart p={chart.prime} module={chart.module.get('kind')} n={chart.module.get('n')}"]
    for r, cells in enumerate(grid):
        label = f"{s_top - (r - 1) // 2:>3} " if r % 2 == 1 else "    "
        out.append((label + "".join(cells)).rstrip())
    out.append("    " + "-" * width)
    out.append("    " + "".join(f"{i:^{CELL}}" for i in range(lo, hi + 1)).rstrip())
    out.append("    t-s")
    info = summary(chart, lo, hi)
    out.append("towers: " + (" ".join(str(i) for i in info["towers"]) or "none"))
    out.append("dots: " + (" ".join(f"({a},{b})" for a, b in info["dots"]) or "none"))
    out.append("lines: " + (" ".join(f"{lab}:({a[0]},{a[1]})-({b[0]},{b[1]})" for lab, a, b in info["lines"]) or "none"))
    return "\n".join(out) + "\n"


def render_svg(chart: ExtChart, stem_min: Optional[int] = None, stem_max: Optional[int] = None) -> str:
    lo, hi = _stem_range(chart, stem_min, stem_max)
    dots, lines = _visible(chart, lo, hi)
    s_top = max([d.s for d in dots] + [chart.s_max if dots else 4])
    unit, margin = 40, 40
    w = (hi - lo + 1) * unit + 2 * margin
    h = (s_top + 1) * unit + 2 * margin

    def x(stem: float) -> float:
        return margin + (stem - lo) * unit + unit / 2

    def y(s: float) -> float:
        return h - margin - s * unit - unit / 2

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>',
        f'<line x1="{margin}" y1="{h - margin}" x2="{w - margin}" y2="{h - margin}" stroke="#888888"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{h - margin}" stroke="#888888"/>',
    ]
    for i in range(lo, hi + 1):
        parts.append(f'<text x="{x(i):.1f}" y="{h - margin + 16}" font-size="11" text-anchor="middle">{i}</text>')
    for s in range(0, s_top + 1):
        parts.append(f'<text x="{margin - 8}" y="{y(s) + 4:.1f}" font-size="11" text-anchor="end">{s}</text>')
    for ln in lines:
        a, b = chart.dot(ln.target), chart.dot(ln.source)
        color = COLORS.get(ln.label, "#555555")
        parts.append(
            f'<line x1="{x(a.stem):.1f}" y1="{y(a.s):.1f}" x2="{x(b.stem):.1f}" y2="{y(b.s):.1f}" '
            f'stroke="{color}" stroke-width="1.5" class="{escape(ln.label)}"/>'
        )
    for i in chart.towers:
        if lo <= i <= hi:
            parts.append(
                f'<polygon class="tower" points="{x(i) - 5:.1f},{margin + 10} {x(i) + 5:.1f},{margin + 10} {x(i):.1f},{margin}" fill="#000000"/>'
            )
    seen: dict[tuple[int, int], int] = {}
    for d in sorted(dots, key=lambda d: (d.stem, d.s, d.id)):
        k = seen.get((d.stem, d.s), 0)
        seen[(d.stem, d.s)] = k + 1
        parts.append(f'<circle cx="{x(d.stem) + 6 * k:.1f}" cy="{y(d.s):.1f}" r="3.5" fill="#000000"><title>{escape(d.id)}</title></circle>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_page_svg(page: AHSSPage) -> str:
    """AHSS page as an SVG table: columns p, rows q, one group per cell."""
    cw, rh, margin = 90, 28, 50
    cols, stems = page.columns, page.stems
    w = len(cols) * cw + 2 * margin
    h = len(stems) * rh + 2 * margin
    title = f"E_{'inf' if page.final else page.page}  l={page.l} r={page.rank} p={page.prime}"
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>',
        f'<text x="{margin}" y="{margin - 24}" font-size="13">{escape(title)}</text>',
    ]
    for j, c in enumerate(cols):
        parts.append(f'<text x="{margin + j * cw + cw / 2:.1f}" y="{margin - 6}" font-size="11" text-anchor="middle">{c}</text>')
    for i, b in enumerate(stems):
        yy = margin + i * rh + rh / 2 + 4
        parts.append(f'<text x="{margin - 8}" y="{yy:.1f}" font-size="11" text-anchor="end">{-b}</text>')
        for j, c in enumerate(cols):
            g = str(page.cells[(c, -b)])
            fill = "#000000" if g != "0" else "#aaaaaa"
            parts.append(f'<text x="{margin + j * cw + cw / 2:.1f}" y="{yy:.1f}" font-size="11" text-anchor="middle" fill="{fill}">{escape(g)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_chart(chart: Union[ExtChart, AHSSPage], fmt: str, stem_min: Optional[int] = None, stem_max: Optional[int] = None) -> str:
    """Render an Ext chart or an AHSS page as ascii, svg or json."""
    if fmt not in FORMATS:
        raise ConfigurationError(f"unsupported format {fmt!r}; choose one of {', '.join(FORMATS)}")
    if isinstance(chart, AHSSPage):
        if fmt == "ascii":
            return chart.render() + "\n"
        if fmt == "svg":
            return render_page_svg(chart)
        return json.dumps(chart.to_json(), sort_keys=True, indent=2) + "\n"
    if fmt == "ascii":
        return render_ascii(chart, stem_min, stem_max)
    if fmt == "svg":
        return render_svg(chart, stem_min, stem_max)
    if fmt == "json":
        return json.dumps(chart.to_json(), sort_keys=True, indent=2) + "\n"
    raise ConfigurationError(f"unsupported format {fmt!r}; choose one of {', '.join(FORMATS)}")
