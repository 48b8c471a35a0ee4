import dataclasses
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from vbcensus.adams import (
    assemble_groups,
    check_window,
    compute_stable,
    default_window,
    find_room,
    load_known_facts,
    multiplication_map,
    resolve_adams_differentials,
    stable_data,
)
from vbcensus.errors import (
    AmbiguityError,
    ConfigurationError,
    ContractViolation,
    FactsInconsistentError,
    RangeError,
)
from vbcensus.proj_modules import stunted_module
from vbcensus.resolution import chart_of, h0_chains, resolve_minimal

# 2-local pi_{2n+1..2n+4} by n mod 8 (0 stands for Z), as tabulated for the stunted spaces
TWO_LOCAL = {
    0: ([0], [2], [0, 2], [8]),
    1: ([0], [], [0], [4]),
    2: ([0], [2], [0, 2], [2]),
    3: ([0], [], [0], []),
    4: ([0], [2], [0, 2], [4]),
    5: ([0], [], [0], [2]),
    6: ([0], [2], [0, 2], [2]),
    7: ([0], [], [0], []),
}
THREE_LOCAL = {0: ([0], [], [0], [3]), 1: ([0], [], [0], []), 2: ([0], [], [0], [])}


def orders(data, i):
    return sorted(data.group(i).orders)


def test_sigma_cp2_groups():
    d = stable_data(2, 2)
    for i in range(0, 5):
        assert d.group(i).is_zero
    assert orders(d, 5) == [0]
    assert orders(d, 6) == [2]
    assert orders(d, 7) == [0, 2]
    assert orders(d, 8) == [2]
    assert d.differentials == []


@pytest.mark.parametrize("n", range(2, 20))
def test_two_local_table(n):
    d = stable_data(n, 2)
    for rel, want in enumerate(TWO_LOCAL[n % 8], start=1):
        assert orders(d, 2 * n + rel) == sorted(want), (n, rel)
    for i in range(0, 2 * n + 1):
        assert d.group(i).is_zero


@pytest.mark.parametrize("n", range(1, 12))
def test_three_local_table(n):
    d = stable_data(n, 3)
    for rel, want in enumerate(THREE_LOCAL[n % 3], start=1):
        assert orders(d, 2 * n + rel) == sorted(want), (n, rel)


def test_n3_unchanged():
    d = stable_data(11, 2)
    assert d.e_inf.to_json() == d.e2.to_json() or not d.differentials
    assert d.group(24).is_zero and d.group(26).is_zero


def test_n0_keeps_three_dots():
    d = stable_data(8, 2)
    assert d.differentials == []
    assert str(d.group(20)) == "Z/8"
    assert len(d.group(20).summands[0].dots) == 3


@pytest.mark.parametrize("n", [5, 13])
def test_n5_reduced(n):
    d = stable_data(n, 2)
    assert str(d.group(2 * n + 4)) == "Z/2"
    (diff,) = d.differentials
    assert diff["r"] == 2
    assert diff["source_pos"][0] == 2 * n + 5 and diff["target_pos"][0] == 2 * n + 4


def test_eta_surjection_n2():
    d = stable_data(2, 2)
    assert d.eta(5) == [[1]]


def test_eta_into_z8():
    d = stable_data(8, 2)
    assert [str(d.group(19))] == ["Z + Z/2"]
    assert d.eta(19) == [[0, 4]]


def test_eta_null_at_three():
    d = stable_data(3, 3)
    for i in range(7, 10):
        m = d.eta(i)
        assert all(v == 0 for row in m for v in row)


def test_nu_generates():
    assert stable_data(2, 2).nu(5) == [[1]]
    assert stable_data(3, 3).nu(7) == [[1]]


def test_unknown_element():
    d = stable_data(2, 2)
    with pytest.raises(ConfigurationError):
        multiplication_map(d.e_inf, d.groups, "sigma", 5)


def test_assemble_prime_mismatch():
    d = stable_data(2, 2)
    with pytest.raises(ContractViolation):
        assemble_groups(d.e_inf, 2, 3)


def test_known_facts_need_n_at_least_two():
    t_max, s_max = default_window(1)
    chart = chart_of(resolve_minimal(stunted_module(2, 1, None, t_max), t_max, s_max), stem_max=7)
    with pytest.raises(RangeError):
        resolve_adams_differentials(chart, load_known_facts(), 1)


def test_window_checks():
    with pytest.raises(ConfigurationError):
        check_window(4, 30, 3)
    with pytest.raises(ConfigurationError):
        check_window(4, 12, 12)
    with pytest.raises(RangeError):
        compute_stable(0, 2)


def test_inconsistent_facts():
    d = stable_data(4, 2)
    facts = load_known_facts()
    bad = dataclasses.replace(facts, orders={**facts.orders, 4: 16})
    with pytest.raises(FactsInconsistentError):
        resolve_adams_differentials(d.e2, bad, 4)
    odd = dataclasses.replace(facts, orders={**facts.orders, 4: 6})
    with pytest.raises(FactsInconsistentError):
        resolve_adams_differentials(d.e2, odd, 4)


def test_missing_fact_is_ambiguous():
    d = stable_data(4, 2)
    facts = load_known_facts()
    gap = dataclasses.replace(facts, orders={k: v for k, v in facts.orders.items() if k != 4})
    with pytest.raises(AmbiguityError):
        resolve_adams_differentials(d.e2, gap, 4)


def test_room_only_at_top():
    for n in range(2, 12):
        d = stable_data(n, 2)
        for r in find_room(d.e2, 2 * n + 1, 2 * n + 4):
            assert (r.source.stem, r.target.stem) == (2 * n + 5, 2 * n + 4)


@settings(max_examples=1000, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(1, 14), st.integers(0, 5))
def test_one_tower_per_odd_stem(p, n, offset):
    """Rationally Sigma CP^inf_n has one cell in each odd degree >= 2n+1."""
    chart = e2_chart(n, p)
    stem = 2 * n + offset
    towers = [ch for ch in h0_chains(chart, stem) if ch[-1].s >= chart.column_top(stem)]
    assert len(towers) == (1 if stem % 2 else 0)
    assert (stem in chart.towers) == bool(stem % 2)


@lru_cache(maxsize=None)
def e2_chart(n, p):
    t_max, s_max = default_window(n)
    res = resolve_minimal(stunted_module(p, n, None, t_max), t_max, s_max)
    return chart_of(res, stem_max=2 * n + 5)
