"""The mod-p Steenrod algebra for p = 2 and p = 3.

Monomials are plain tuples.

* p = 2: ``(i1, ..., ik)`` stands for Sq^i1 ... Sq^ik, all exponents >= 1.
  The unit is ``()``.
* p = 3: ``(e0, s1, e1, ..., sk, ek)`` stands for
  b^e0 P^s1 b^e1 ... P^sk b^ek with each ``e`` in {0, 1} and ``s >= 1``.
  The unit is ``(0,)`` and the Bockstein alone is ``(1,)``.

Inadmissible words are rewritten with the Adem relations, always at the
leftmost offending pair by default. Results are memoized per word.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .errors import ConfigurationError, ContractViolation, ParseError

Monomial = tuple[int, ...]

DEFAULT_DEGREE_CAP = 40
BOCKSTEIN = -1  # token for b in raw factor lists at p = 3


def check_prime(prime: int) -> None:
    if prime not in (2, 3):
        raise ContractViolation(f"unsupported prime {prime}; only 2 and 3 are implemented")


def binomial_mod(n: int, k: int, p: int) -> int:
    """C(n, k) mod p by Lucas' theorem; zero whenever n < 0, k < 0 or k > n."""
    if n < 0 or k < 0 or k > n:
        return 0
    result = 1
    while n or k:
        ni, ki = n % p, k % p
        if ki > ni:
            return 0
        c = 1
        for j in range(ki):
            c = c * (ni - j) // (j + 1)
        result = (result * c) % p
        n //= p
        k //= p
    return result


def unit(prime: int) -> Monomial:
    check_prime(prime)
    return () if prime == 2 else (0,)


def degree(prime: int, mono: Monomial) -> int:
    if prime == 2:
        return sum(mono)
    return sum(mono[0::2]) + 2 * (prime - 1) * sum(mono[1::2])


def is_admissible(prime: int, mono: Monomial) -> bool:
    if prime == 2:
        return all(i >= 1 for i in mono) and all(mono[j] >= 2 * mono[j + 1] for j in range(len(mono) - 1))
    if len(mono) % 2 != 1 or any(e not in (0, 1) for e in mono[0::2]) or any(s < 1 for s in mono[1::2]):
        return False
    return all(mono[j] >= prime * mono[j + 2] + mono[j + 1] for j in range(1, len(mono) - 2, 2))


# ---------------------------------------------------------------------------
# admissible bases


def _tails2(d: int, bound: int) -> Iterator[Monomial]:
    if d == 0:
        yield ()
        return
    for i in range(min(d, bound), 0, -1):
        for rest in _tails2(d - i, i // 2):
            yield (i,) + rest


def _tails3(d: int, bound: int) -> Iterator[Monomial]:
    if d == 0:
        yield ()
        return
    for s in range(min(bound, d // 4), 0, -1):
        for e in (1, 0):
            rem = d - 4 * s - e
            if rem < 0:
                continue
            for rest in _tails3(rem, (s - e) // 3):
                yield (s, e) + rest


@lru_cache(maxsize=None)
def _basis(prime: int, d: int) -> tuple[Monomial, ...]:
    if prime == 2:
        out = list(_tails2(d, d))
    else:
        out = [(e0,) + tail for e0 in (0, 1) if d - e0 >= 0 for tail in _tails3(d - e0, d)]
    return tuple(sorted(out, key=lambda m: m, reverse=True))


def admissible_basis(prime: int, d: int, cap: int = DEFAULT_DEGREE_CAP) -> list[Monomial]:
    """Admissible monomials of degree ``d`` in descending lexicographic order."""
    check_prime(prime)
    if d < 0:
        return []
    if d > cap:
        raise ConfigurationError(f"degree {d} exceeds the configured degree cap {cap}")
    return list(_basis(prime, d))


# ---------------------------------------------------------------------------
# words and Adem relations


def tokens_of(prime: int, mono: Monomial) -> list[int]:
    """Factor list of a monomial: exponents, plus BOCKSTEIN tokens at p = 3."""
    if prime == 2:
        return list(mono)
    out: list[int] = []
    for j, x in enumerate(mono):
        if j % 2 == 0:
            out.extend([BOCKSTEIN] * x)
        else:
            out.append(x)
    return out


def word_of(prime: int, tokens: Iterable[int]) -> Optional[Monomial]:
    """Canonical word for a factor list, or None when it contains b b.

    Zero exponents are the unit and are dropped.
    """
    if prime == 2:
        for t in tokens:
            if t < 0:
                raise ContractViolation("Bockstein token in a mod 2 word")
        return tuple(t for t in tokens if t > 0)
    out: list[int] = []
    eps = 0
    for t in tokens:
        if t == BOCKSTEIN:
            eps += 1
            if eps > 1:
                return None
        elif t > 0:
            out.extend((eps, t))
            eps = 0
        elif t < 0:
            raise ContractViolation(f"bad factor token {t}")
    out.append(eps)
    return tuple(out)


@lru_cache(maxsize=None)
def _pair_expansion(prime: int, a: int, e: int, b: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Adem expansion of an inadmissible pair as (factor list, coefficient) terms."""
    terms: dict[tuple[int, ...], int] = {}

    def put(tok: tuple[int, ...], c: int) -> None:
        c %= prime
        if c:
            terms[tok] = (terms.get(tok, 0) + c) % prime

    if prime == 2:
        for j in range(a // 2 + 1):
            put((a + b - j, j), binomial_mod(b - j - 1, a - 2 * j, 2))
    elif e == 0:
        for i in range(a // prime + 1):
            sign = -1 if (a + i) % 2 else 1
            put((a + b - i, i), sign * binomial_mod((prime - 1) * (b - i) - 1, a - prime * i, prime))
    else:
        for i in range(a // prime + 1):
            sign = -1 if (a + i) % 2 else 1
            put((BOCKSTEIN, a + b - i, i), sign * binomial_mod((prime - 1) * (b - i), a - prime * i, prime))
        for i in range((a - 1) // prime + 1):
            sign = -1 if (a + i - 1) % 2 else 1
            put((a + b - i, BOCKSTEIN, i), sign * binomial_mod((prime - 1) * (b - i) - 1, a - prime * i - 1, prime))
    return tuple((tok, c) for tok, c in terms.items() if c)


def _offending_pairs(prime: int, word: Monomial) -> list[int]:
    if prime == 2:
        return [i for i in range(len(word) - 1) if word[i] < 2 * word[i + 1]]
    return [j for j in range(1, len(word) - 2, 2) if word[j] < prime * word[j + 2] + word[j + 1]]


def _rewrite(prime: int, word: Monomial, pos: int) -> list[tuple[Monomial, int]]:
    out = []
    if prime == 2:
        a, b = word[pos], word[pos + 1]
        for tok, c in _pair_expansion(2, a, 0, b):
            w = word_of(2, word[:pos] + tok + word[pos + 2:])
            out.append((w, c))
        return out
    a, e, b = word[pos], word[pos + 1], word[pos + 2]
    before = tokens_of(prime, word[:pos])
    after = tokens_of(prime, word[pos + 3:])
    for tok, c in _pair_expansion(prime, a, e, b):
        w = word_of(prime, before + list(tok) + after)
        if w is not None:
            out.append((w, c))
    return out


@lru_cache(maxsize=None)
def _reduce(prime: int, word: Monomial, leftmost: bool) -> tuple[tuple[Monomial, int], ...]:
    bad = _offending_pairs(prime, word)
    if not bad:
        return ((word, 1),)
    pos = bad[0] if leftmost else bad[-1]
    acc: dict[Monomial, int] = {}
    for w, c in _rewrite(prime, word, pos):
        for m, d in _reduce(prime, w, leftmost):
            acc[m] = (acc.get(m, 0) + c * d) % prime
    return tuple((m, c) for m, c in acc.items() if c)


def reduce_word(prime: int, tokens: Sequence[int], strategy: str = "leftmost") -> dict[Monomial, int]:
    """Normal form of a raw factor list as {admissible monomial: coefficient}."""
    check_prime(prime)
    if strategy not in ("leftmost", "rightmost"):
        raise ContractViolation(f"unknown reduction strategy {strategy!r}")
    w = word_of(prime, tokens)
    if w is None:
        return {}
    return dict(_reduce(prime, w, strategy == "leftmost"))


@lru_cache(maxsize=None)
def _product(prime: int, m1: Monomial, m2: Monomial) -> tuple[tuple[Monomial, int], ...]:
    w = word_of(prime, tokens_of(prime, m1) + tokens_of(prime, m2))
    if w is None:
        return ()
    return _reduce(prime, w, True)


def multiply_monomials(prime: int, m1: Monomial, m2: Monomial) -> tuple[tuple[Monomial, int], ...]:
    """Product of two admissible monomials as a tuple of (monomial, coefficient)."""
    return _product(prime, m1, m2)


# ---------------------------------------------------------------------------
# elements


def format_monomial(prime: int, mono: Monomial) -> str:
    toks = tokens_of(prime, mono)
    if not toks:
        return "1"
    if prime == 2:
        return " ".join(f"Sq{i}" for i in toks)
    return " ".join("b" if t == BOCKSTEIN else f"P{t}" for t in toks)


class SteenrodElement:
    """A finite F_p-combination of admissible monomials."""

    __slots__ = ("prime", "terms")

    def __init__(self, prime: int, terms: Optional[Mapping[Monomial, int]] = None):
        check_prime(prime)
        clean: dict[Monomial, int] = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if not is_admissible(prime, m):
                raise ContractViolation(f"{m} is not an admissible monomial at p={prime}")
            c %= prime
            if c:
                clean[m] = c
        self.prime = prime
        self.terms = clean

    @classmethod
    def one(cls, prime: int) -> "SteenrodElement":
        return cls(prime, {unit(prime): 1})

    @classmethod
    def zero(cls, prime: int) -> "SteenrodElement":
        return cls(prime)

    @classmethod
    def monomial(cls, prime: int, mono: Monomial, coefficient: int = 1) -> "SteenrodElement":
        return cls(prime, {mono: coefficient})

    @classmethod
    def parse(cls, prime: int, text: str) -> "SteenrodElement":
        return adem_normalize(text, prime)

    def degrees(self) -> set[int]:
        return {degree(self.prime, m) for m in self.terms}

    @property
    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> Optional[int]:
        ds = self.degrees()
        if len(ds) != 1:
            return None
        return next(iter(ds))

    def _same(self, other: "SteenrodElement") -> None:
        if other.prime != self.prime:
            raise ContractViolation(f"prime mismatch: {self.prime} vs {other.prime}")

    def __add__(self, other: "SteenrodElement") -> "SteenrodElement":
        if not isinstance(other, SteenrodElement):
            return NotImplemented
        self._same(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return SteenrodElement(self.prime, t)

    def __neg__(self) -> "SteenrodElement":
        return SteenrodElement(self.prime, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "SteenrodElement") -> "SteenrodElement":
        return self + (-other)

    def __mul__(self, other: Union["SteenrodElement", int]) -> "SteenrodElement":
        if isinstance(other, int):
            return SteenrodElement(self.prime, {m: c * other for m, c in self.terms.items()})
        if not isinstance(other, SteenrodElement):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other: int) -> "SteenrodElement":
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SteenrodElement):
            return NotImplemented
        return self.prime == other.prime and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.prime, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (degree(self.prime, m), m), reverse=True):
            c = self.terms[m]
            s = format_monomial(self.prime, m)
            parts.append(s if c == 1 else f"{c} {s}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"SteenrodElement(p={self.prime}, {self})"


def multiply(a: SteenrodElement, b: SteenrodElement) -> SteenrodElement:
    if a.prime != b.prime:
        raise ContractViolation(f"prime mismatch: {a.prime} vs {b.prime}")
    p = a.prime
    acc: dict[Monomial, int] = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            for m, c in _product(p, m1, m2):
                acc[m] = (acc.get(m, 0) + c1 * c2 * c) % p
    return SteenrodElement(p, acc)


def parse_factors(text: str, prime: int) -> list[int]:
    """Parse ``Sq<k>`` factors (p = 2) or ``b`` and ``P<k>`` factors (p = 3)."""
    check_prime(prime)
    if text.strip() == "1":
        return []
    toks: list[int] = []
    for raw in text.split():
        if prime == 2:
            if raw.startswith("Sq") and raw[2:].isdigit():
                toks.append(int(raw[2:]))
                continue
        else:
            if raw == "b":
                toks.append(BOCKSTEIN)
                continue
            if raw.startswith("P") and raw[1:].isdigit():
                toks.append(int(raw[1:]))
                continue
        raise ParseError(f"malformed factor {raw!r} for p={prime}")
    if not toks:
        raise ParseError("empty expression")
    return toks


def adem_normalize(expression: Union[str, Sequence[int]], prime: int, strategy: str = "leftmost") -> SteenrodElement:
    """Rewrite a product of generators into admissible normal form."""
    if isinstance(expression, str):
        expression = parse_factors(expression, prime)
    return SteenrodElement(prime, reduce_word(prime, list(expression), strategy))
