import warnings

import pytest
from hypothesis import given, settings, strategies as st

from vbcensus.errors import ConfigurationError, ContractViolation
from vbcensus.proj_modules import (
    closed_form_power,
    load_diagrams,
    sphere_module,
    stunted_module,
    verify_action_against_diagram,
)
from vbcensus.steenrod import adem_normalize


def poly_power(base, m, p):
    """Coefficients of base(x)^m mod p, base given as {exponent: coef}."""
    out = {0: 1}
    for _ in range(m):
        nxt = {}
        for e1, c1 in out.items():
            for e2, c2 in base.items():
                nxt[e1 + e2] = (nxt.get(e1 + e2, 0) + c1 * c2) % p
        out = {e: c for e, c in nxt.items() if c}
    return out


def total_power_oracle(p, m):
    """Total operation on x^m in H*(CP^inf): Sq(x) = x + x^2, P(x) = x + x^3."""
    return poly_power({1: 1, 2: 1} if p == 2 else {1: 1, 3: 1}, m, p)


def expected_action(p, m, a):
    """(coef, target exponent) of Sq^a / P^a on the suspended x^m, from the oracle."""
    tot = total_power_oracle(p, m)
    if p == 2:
        if a % 2:
            return 0, m
        tgt = m + a // 2
    else:
        tgt = m + 2 * a
    return tot.get(tgt, 0), tgt


def idx(m, d):
    return m.degrees.index(d)


def test_sigma_cp2_examples():
    m = stunted_module(2, 2, 6, 17)
    assert m.power(2, idx(m, 7)) == {idx(m, 9): 1}
    assert m.power(2, idx(m, 5)) == {}
    assert m.power(4, idx(m, 5)) == {idx(m, 9): 1}
    assert m.power(8, idx(m, 9)) == {idx(m, 17): 1}


def test_no_bockstein_at_two():
    m = stunted_module(2, 2, None, 40)
    for i in range(len(m.degrees)):
        assert m.power(1, i) == {}


def test_p3_examples():
    n = 3
    m = stunted_module(3, n, 4)
    assert m.power(1, idx(m, 2 * n + 3)) == {idx(m, 2 * n + 7): 1}
    assert m.power(1, idx(m, 2 * n + 1)) == {}
    for i in range(len(m.degrees)):
        assert m.bockstein(i) == {}


@pytest.mark.parametrize("n", range(1, 12))
def test_sq2_lucas(n):
    m = stunted_module(2, n, 8)
    for d in m.degrees[:-1]:
        mm = (d - 1) // 2
        assert bool(m.power(2, idx(m, d))) == (mm % 2 == 1)


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_all_powers_match_cartan_oracle(p, n):
    """Derived (non generator) operations agree with (x + x^p)^m."""
    m = stunted_module(p, n, None, 2 * n + 1 + 36)
    for i, d in enumerate(m.degrees):
        mm = (d - 1) // 2
        for a in range(1, 19 if p == 2 else 10):
            coef, tgt = expected_action(p, mm, a)
            td = 2 * tgt + 1
            want = {idx(m, td): coef} if coef and td in m.degrees else {}
            assert m.power(a, i) == want, (p, n, d, a)
            assert closed_form_power(p, mm, a)[0] == coef


def test_action_respects_adem():
    m = stunted_module(2, 1, None, 41)
    # Sq2 Sq2 = Sq3 Sq1 acting on every cell
    lhs = adem_normalize("Sq2 Sq2", 2)
    for i in range(len(m.degrees)):
        assert m.act((2, 2), {i: 1}) == m.act_element(lhs, {i: 1})


def test_act_element_prime_mismatch():
    with pytest.raises(ContractViolation):
        stunted_module(2, 1, 2).act_element(adem_normalize("P1", 3), {0: 1})


def test_sigma_cp2_low_diagram():
    d = load_diagrams()["sigma_cp2_low"]
    m = stunted_module(2, 2, None, 17)
    got = set()
    for op in ("Sq2", "Sq4", "Sq8"):
        a = int(op[2:])
        for i, deg in enumerate(m.degrees):
            for j in m.power(a, i):
                got.add((op, deg, m.degrees[j]))
    assert got == {tuple(x) for x in d["arcs"]}


@pytest.mark.parametrize("p,period", [(2, 8), (3, 3)])
def test_every_residue_matches_diagram(p, period):
    for n in range(1, 3 * period + 1):
        rep = verify_action_against_diagram(stunted_module(p, n, 6))
        assert rep.all_match, rep.mismatches


def test_n3_mod8_sq2_pattern():
    n = 11
    rep = verify_action_against_diagram(stunted_module(2, n, 6))
    sq2 = {(r["from"], r["to"]) for r in rep.checked if r["op"] == "Sq2" and r["computed"]}
    assert sq2 == {(f"y_{2*n+1}", f"y_{2*n+3}"), (f"y_{2*n+5}", f"y_{2*n+7}")}


def test_diagram_wrong_residue():
    with pytest.raises(ContractViolation):
        verify_action_against_diagram(stunted_module(2, 2, 6), residue=3)


def test_diagram_needs_window():
    with pytest.raises(ConfigurationError):
        verify_action_against_diagram(stunted_module(2, 2, 2))


def test_empty_module_warns():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        m = stunted_module(2, 5, None, 3)
    assert m.is_empty and w


def test_bad_arguments():
    with pytest.raises(ConfigurationError):
        stunted_module(2, 0, 3)
    with pytest.raises(ConfigurationError):
        stunted_module(2, 2)


def test_sphere_and_json():
    s = sphere_module(2, 0)
    assert s.degrees == (0,) or list(s.degrees) == [0]
    doc = stunted_module(2, 2, 2).to_json()
    assert doc["n"] == 2 and doc["k"] == 2
    assert {"op": "Sq4", "from": "y_5", "to": "y_9", "coef": 1} in doc["arcs"]


def test_signature_shift_invariant():
    a = stunted_module(2, 1, 3)
    b = stunted_module(2, 9, 3)
    assert a.signature() == b.signature()
    assert a.signature() != stunted_module(2, 2, 3).signature()


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(1, 40), st.integers(1, 12))
def test_closed_form_property(p, mm, a):
    coef, tgt = expected_action(p, mm, a)
    assert closed_form_power(p, mm, a) == (coef, tgt) or (coef == 0 and closed_form_power(p, mm, a)[0] == 0)
