"""Cohomology of suspended stunted complex projective spaces as Steenrod modules.

A module stores the action of the algebra generators only (Sq^(2^i) at
p = 2; b and P^(3^i) at p = 3). Every other operation is derived from those
through an Adem relation whose leading coefficient is a unit, so the stored
data is all the arithmetic the module needs.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Optional, Sequence

from .errors import ConfigurationError, ContractViolation
from .steenrod import BOCKSTEIN, Monomial, SteenrodElement, binomial_mod, check_prime, tokens_of

Vector = dict[int, int]


def _add_into(acc: Vector, vec: Mapping[int, int], coef: int, prime: int) -> None:
    for i, c in vec.items():
        acc[i] = (acc.get(i, 0) + coef * c) % prime


def _clean(vec: Mapping[int, int]) -> Vector:
    return {i: c for i, c in sorted(vec.items()) if c}


def generator_ops(prime: int, max_degree: int) -> list[tuple[str, int]]:
    """Algebra generators of degree at most ``max_degree`` as (kind, exponent)."""
    ops: list[tuple[str, int]] = []
    if prime == 2:
        e = 1
        while e <= max_degree:
            ops.append(("Sq", e))
            e *= 2
    else:
        if max_degree >= 1:
            ops.append(("b", 1))
        e = 1
        while 4 * e <= max_degree:
            ops.append(("P", e))
            e *= 3
    return ops


def op_name(kind: str, exponent: int) -> str:
    return "b" if kind == "b" else f"{kind}{exponent}"


def op_degree(prime: int, kind: str, exponent: int) -> int:
    if kind == "b":
        return 1
    return exponent if prime == 2 else 2 * (prime - 1) * exponent


class ModulePresentation:
    """A finite graded F_p-module with a Steenrod action given on generators.

    ``actions`` maps (op name, basis index) to a vector {basis index: coef};
    missing entries mean the operation acts as zero.
    """

    def __init__(
        self,
        prime: int,
        degrees: Sequence[int],
        actions: Mapping[tuple[str, int], Mapping[int, int]],
        names: Optional[Sequence[str]] = None,
        n: Optional[int] = None,
        k: Optional[int] = None,
        shift: int = 0,
        rational_ranks: Optional[Mapping[int, int]] = None,
        kind: str = "custom",
    ):
        check_prime(prime)
        if list(degrees) != sorted(degrees):
            raise ContractViolation("basis degrees must be nondecreasing")
        self.prime = prime
        self.degrees = tuple(degrees)
        self.names = tuple(names) if names is not None else tuple(f"y_{d}" for d in degrees)
        self.actions = {key: _clean(v) for key, v in actions.items() if _clean(v)}
        self.n = n
        self.k = k
        self.shift = shift
        self.rational_ranks = dict(rational_ranks) if rational_ranks is not None else None
        self.kind = kind
        self._by_degree: dict[int, list[int]] = {}
        for i, d in enumerate(self.degrees):
            self._by_degree.setdefault(d, []).append(i)
        self._op_cache: dict[tuple[int, int], Vector] = {}
        for (name, i), vec in self.actions.items():
            if not 0 <= i < len(self.degrees):
                raise ContractViolation(f"action {name} on missing basis index {i}")

    # -- basic data

    def __len__(self) -> int:
        return len(self.degrees)

    @property
    def is_empty(self) -> bool:
        return not self.degrees

    @property
    def bottom(self) -> Optional[int]:
        return self.degrees[0] if self.degrees else None

    @property
    def top(self) -> Optional[int]:
        return self.degrees[-1] if self.degrees else None

    def basis_in_degree(self, t: int) -> list[int]:
        return list(self._by_degree.get(t, ()))

    def descriptor(self) -> dict:
        return {"kind": self.kind, "prime": self.prime, "n": self.n, "k": self.k, "shift": self.shift}

    def signature(self) -> tuple:
        """Shift-invariant description: equal signatures mean isomorphic modules up to regrading."""
        b = self.bottom or 0
        acts = tuple(sorted((name, i, tuple(v.items())) for (name, i), v in self.actions.items()))
        return (self.prime, tuple(d - b for d in self.degrees), acts)

    # -- operations

    def _stored(self, name: str, i: int) -> Vector:
        return self.actions.get((name, i), {})

    def _apply_vec(self, fn, vec: Mapping[int, int]) -> Vector:
        acc: Vector = {}
        for i, c in vec.items():
            _add_into(acc, fn(i), c, self.prime)
        return _clean(acc)

    def power(self, a: int, i: int) -> Vector:
        """Sq^a (p = 2) or P^a (p = 3) applied to basis element ``i``."""
        if a == 0:
            return {i: 1}
        key = (a, i)
        hit = self._op_cache.get(key)
        if hit is not None:
            return hit
        p = self.prime
        if p == 2:
            res = self._sq(a, i)
        else:
            res = self._pp(a, i)
        self._op_cache[key] = res
        return res

    def _sq(self, a: int, i: int) -> Vector:
        top = 1 << (a.bit_length() - 1)
        if top == a:
            return dict(self._stored(f"Sq{a}", i))
        b = a - top
        # Sq^b Sq^top = Sq^a + sum_{j>=1} C(top-j-1, b-2j) Sq^(a-j) Sq^j
        acc: Vector = {}
        _add_into(acc, self._apply_vec(lambda x: self.power(b, x), self.power(top, i)), 1, 2)
        for j in range(1, b // 2 + 1):
            if binomial_mod(top - j - 1, b - 2 * j, 2):
                _add_into(acc, self._apply_vec(lambda x: self.power(a - j, x), self.power(j, i)), 1, 2)
        return _clean(acc)

    def _pp(self, c: int, i: int) -> Vector:
        p = self.prime
        top = 1
        while top * p <= c:
            top *= p
        if top == c:
            return dict(self._stored(f"P{c}", i))
        a = c - top
        # P^a P^top = sum_i (-1)^(a+i) C((p-1)(top-i)-1, a-p i) P^(c-i) P^i, leading term a unit
        def coef(j: int) -> int:
            sign = -1 if (a + j) % 2 else 1
            return sign * binomial_mod((p - 1) * (top - j) - 1, a - p * j, p)

        lead = coef(0) % p
        if lead == 0:
            raise ContractViolation(f"no unit leading term deriving P^{c}")
        acc: Vector = {}
        _add_into(acc, self._apply_vec(lambda x: self.power(a, x), self.power(top, i)), 1, p)
        for j in range(1, a // p + 1):
            cj = coef(j) % p
            if cj:
                _add_into(acc, self._apply_vec(lambda x: self.power(c - j, x), self.power(j, i)), -cj, p)
        inv = pow(lead, -1, p)
        return _clean({x: (v * inv) % p for x, v in acc.items()})

    def bockstein(self, i: int) -> Vector:
        if self.prime == 2:
            return self.power(1, i)
        return dict(self._stored("b", i))

    def act(self, mono: Monomial, vec: Mapping[int, int]) -> Vector:
        """Apply an admissible monomial (or any word) to a vector."""
        cur = _clean(vec)
        for tok in reversed(tokens_of(self.prime, mono)):
            if not cur:
                break
            if tok == BOCKSTEIN:
                cur = self._apply_vec(self.bockstein, cur)
            else:
                cur = self._apply_vec(lambda x, a=tok: self.power(a, x), cur)
        return cur

    def act_element(self, e: SteenrodElement, vec: Mapping[int, int]) -> Vector:
        if e.prime != self.prime:
            raise ContractViolation("prime mismatch between element and module")
        acc: Vector = {}
        for m, c in e.terms.items():
            _add_into(acc, self.act(m, vec), c, self.prime)
        return _clean(acc)

    # -- derived views

    def arcs(self) -> list[dict]:
        """Nonzero stored generator actions as {op, from, to, coef} records."""
        out = []
        for (name, i), vec in sorted(self.actions.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            for j, c in vec.items():
                out.append({"op": name, "from": self.names[i], "to": self.names[j], "coef": c})
        return out

    def to_json(self) -> dict:
        return {
            "prime": self.prime,
            "n": self.n,
            "k": self.k,
            "generators": [{"name": nm, "degree": d} for nm, d in zip(self.names, self.degrees)],
            "arcs": self.arcs(),
        }

    def shifted(self, delta: int) -> "ModulePresentation":
        names = tuple(f"y_{d + delta}" for d in self.degrees) if self.kind == "stunted" else self.names
        rr = None if self.rational_ranks is None else {d + delta: r for d, r in self.rational_ranks.items()}
        return ModulePresentation(
            self.prime, [d + delta for d in self.degrees], self.actions, names,
            self.n, self.k, self.shift + delta, rr, self.kind,
        )


def stunted_module(prime: int, n: int, k: Optional[int] = None, t_max: Optional[int] = None) -> ModulePresentation:
    """H*(Sigma CP^(n+k)_n; F_p), optionally truncated to degrees <= t_max.

    ``k=None`` means the infinite complex, in which case ``t_max`` is
    required. Basis element y_(2m+1) is the suspension of x^m.
    """
    check_prime(prime)
    if n < 1:
        raise ConfigurationError(f"bottom index n must be positive, got {n}")
    if k is None and t_max is None:
        raise ConfigurationError("an infinite complex needs a degree bound t_max")
    if k is not None and k < 0:
        raise ConfigurationError(f"number of extra cells must be nonnegative, got {k}")
    top_m = n + k if k is not None else None
    if t_max is not None:
        tm = (t_max - 1) // 2
        top_m = tm if top_m is None else min(top_m, tm)
    ms = list(range(n, top_m + 1))
    if not ms:
        warnings.warn(f"degree bound {t_max} lies below the bottom cell {2 * n + 1}; module is empty", stacklevel=2)
    degrees = [2 * m + 1 for m in ms]
    index = {m: j for j, m in enumerate(ms)}
    span = (degrees[-1] - degrees[0]) if degrees else 0
    actions: dict[tuple[str, int], dict[int, int]] = {}
    for kind, e in generator_ops(prime, span):
        for m in ms:
            if kind == "b" or (kind == "Sq" and e % 2 == 1):
                continue
            j = e // 2 if prime == 2 else e
            c = binomial_mod(m, j, prime)
            target = m + j if prime == 2 else m + 2 * j
            if c and target in index:
                actions[(op_name(kind, e), index[m])] = {index[target]: c}
    return ModulePresentation(
        prime, degrees, actions, [f"y_{d}" for d in degrees], n=n, k=k, shift=1,
        rational_ranks={d: 1 for d in degrees}, kind="stunted",
    )


def sphere_module(prime: int, degree: int = 0) -> ModulePresentation:
    """F_p concentrated in one degree: the cohomology of a sphere spectrum."""
    return ModulePresentation(prime, [degree], {}, [f"y_{degree}"], shift=degree,
                              rational_ranks={degree: 1}, kind="sphere")


def closed_form_power(prime: int, m: int, a: int) -> tuple[int, int]:
    """(coefficient, target exponent) of Sq^a or P^a on the suspension of x^m."""
    if prime == 2:
        if a % 2:
            return 0, m
        return binomial_mod(m, a // 2, 2), m + a // 2
    return binomial_mod(m, a, prime), m + 2 * a


# ---------------------------------------------------------------------------
# reference diagrams


@dataclass
class DiagramReport:
    prime: int
    n: int
    residue: int
    checked: list[dict] = field(default_factory=list)
    mismatches: list[dict] = field(default_factory=list)

    @property
    def all_match(self) -> bool:
        return not self.mismatches


def load_diagrams() -> dict:
    text = resources.files("vbcensus.data").joinpath("action_diagrams.json").read_text()
    return json.loads(text)


def verify_action_against_diagram(m: ModulePresentation, residue: Optional[int] = None) -> DiagramReport:
    """Compare the five-cell window y_(2n+1) .. y_(2n+9) with the tabulated arc pattern.

    Arcs are tabulated as [op, i, j] meaning op sends the i-th cell of the
    window to the j-th. Only presence of an arc is compared, so a
    coefficient of 2 at p = 3 still counts as an arc.
    """
    if m.n is None or m.kind != "stunted":
        raise ContractViolation("diagram verification needs a stunted projective module")
    p = m.prime
    period = 8 if p == 2 else 3
    if residue is None:
        residue = m.n % period
    if residue != m.n % period:
        raise ContractViolation(f"n={m.n} is not congruent to {residue} mod {period}")
    table = load_diagrams()[str(p)][str(residue)]
    expected = {(op, i, j) for op, i, j in table}
    report = DiagramReport(p, m.n, residue)
    window = [2 * (m.n + j) + 1 for j in range(5)]
    idx = {d: i for i, d in enumerate(m.degrees)}
    if any(d not in idx for d in window):
        raise ConfigurationError("module does not contain the full five-cell window")
    ops = ["Sq2", "Sq4", "Sq8"] if p == 2 else ["P1"]
    for op in ops:
        a = int(op[2:] if p == 2 else op[1:])
        step = a if p == 2 else 4 * a
        for i, d in enumerate(window):
            j = i + step // 2
            if j >= len(window):
                continue
            got = m.power(a, idx[d]).get(idx[window[j]], 0) != 0
            want = (op, i, j) in expected
            rec = {"op": op, "from": f"y_{d}", "to": f"y_{window[j]}", "computed": got, "diagram": want}
            report.checked.append(rec)
            if got != want:
                report.mismatches.append(rec)
    return report
