import json
import warnings

import pytest

from vbcensus.ahss import run_ahss
from vbcensus.errors import ConfigurationError
from vbcensus.proj_modules import stunted_module
from vbcensus.render import render_chart, summary
from vbcensus.resolution import ExtChart, chart_of, resolve_minimal


def sigma_cp2_chart():
    return chart_of(resolve_minimal(stunted_module(2, 2, None, 21), 21, 12), stem_max=9)


def test_ascii_sigma_cp2():
    text = render_chart(sigma_cp2_chart(), "ascii", 5, 8)
    assert "towers: 5 7" in text
    assert "dots: (6,1) (7,2) (8,1)" in text
    lines = text.split("lines: ")[1].split()
    assert len(lines) == 4
    info = summary(sigma_cp2_chart(), 5, 8)
    assert info["towers"] == [5, 7] and info["dots"] == [(6, 1), (7, 2), (8, 1)]


def test_empty_chart():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        m = stunted_module(2, 5, None, 3)
    chart = chart_of(resolve_minimal(m, 3, 4))
    text = render_chart(chart, "ascii")
    assert "t-s" in text and "towers: none" in text
    svg = render_chart(chart, "svg")
    assert svg.count("<circle") == 0 and "<line" in svg


def test_svg_two_towers():
    n = 3
    chart = chart_of(resolve_minimal(stunted_module(2, n, None, 21), 21, 12), stem_max=2 * n + 4)
    svg = render_chart(chart, "svg", 2 * n + 1, 2 * n + 4)
    assert svg.startswith('<?xml') and 'version="1.1"' in svg
    assert svg.count('class="tower"') == 2
    assert 'class="h1"' not in svg and 'class="h2"' not in svg


def test_json_round_trip():
    chart = sigma_cp2_chart()
    doc = json.loads(render_chart(chart, "json"))
    assert doc == chart.to_json()
    assert ExtChart.from_json(doc).to_json() == doc


def test_ascii_and_svg_same_data():
    chart = sigma_cp2_chart()
    svg = render_chart(chart, "svg", 5, 8)
    n_dots = sum(1 for d in chart.dots if 5 <= d.stem <= 8)
    assert svg.count("<circle") == n_dots


def test_ahss_page_rendering():
    page = run_ahss(4, 2, 2)[-1]
    assert render_chart(page, "ascii").startswith("E_inf")
    assert json.loads(render_chart(page, "json")) == page.to_json()
    assert "<svg" in render_chart(page, "svg")


def test_bad_format():
    with pytest.raises(ConfigurationError):
        render_chart(sigma_cp2_chart(), "png")
