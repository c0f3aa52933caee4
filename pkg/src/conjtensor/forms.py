"""Conjugate complex polynomials in canonical monomial form.

A monomial is identified by a :class:`MonomialKey`: the sorted indices of its
conjugated variables and the sorted indices of its plain variables (1-based).
Text uses ``~x2`` for the conjugate of ``x2`` and ``i`` for the imaginary unit::

    (1-1i)*~x1^2*x1^2 + 4*~x1*~x2*x1*x2 + 6*~x1*~x2*x2^2
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import DimensionError, ParseError

TAU_PARSED = 1e-12
TAU_ROUNDTRIP = 1e-9
MAX_WITNESSES = 20


class MonomialKey(NamedTuple):
    conj: tuple[int, ...]
    plain: tuple[int, ...]

    @classmethod
    def make(cls, conj: Iterable[int] = (), plain: Iterable[int] = ()) -> "MonomialKey":
        return cls(tuple(sorted(conj)), tuple(sorted(plain)))

    @property
    def degree(self) -> int:
        return len(self.conj) + len(self.plain)


def conjugate_key(key: MonomialKey) -> MonomialKey:
    """Key of the conjugate monomial (conjugated and plain indices swap)."""
    return MonomialKey(key.plain, key.conj)


def _sort_key(key: MonomialKey):
    return (key.degree, -len(key.conj), key.conj, key.plain)


@dataclass(frozen=True)
class ConjugatePolynomial:
    """Polynomial in ``x`` and ``conj(x)`` with ``n`` complex variables.

    ``terms`` never holds an explicit zero coefficient.
    """

    n: int
    terms: Mapping[MonomialKey, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError("a polynomial needs at least one variable")
        clean = {}
        for key, c in self.terms.items():
            key = MonomialKey.make(key[0], key[1])
            for i in key.conj + key.plain:
                if not 1 <= i <= self.n:
                    raise DimensionError(f"variable index {i} outside 1..{self.n}")
            c = complex(c)
            if c != 0:
                clean[key] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda kv: _sort_key(kv[0]))))

    @classmethod
    def from_terms(cls, n: int, pairs: Iterable[tuple[MonomialKey, complex]]) -> "ConjugatePolynomial":
        """Build a polynomial, merging repeated keys."""
        acc: dict[MonomialKey, complex] = {}
        for key, c in pairs:
            key = MonomialKey.make(key[0], key[1])
            acc[key] = acc.get(key, 0j) + complex(c)
        return cls(n, acc)

    @property
    def degree(self) -> int:
        return max((k.degree for k in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, key: MonomialKey) -> complex:
        return self.terms.get(MonomialKey.make(key[0], key[1]), 0j)

    def conjugate(self) -> "ConjugatePolynomial":
        """The polynomial whose value is the complex conjugate of this one."""
        return ConjugatePolynomial(self.n, {conjugate_key(k): c.conjugate() for k, c in self.terms.items()})

    def __str__(self) -> str:
        return print_poly(self)


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<var>x(?P<index>\d+))
  | (?P<imag>i)
  | (?P<op>[-+*^()~])
    """,
    re.VERBOSE,
)


class _Token(NamedTuple):
    kind: str
    text: str
    pos: int


def _position(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", *_position(text, pos))
        kind = m.lastgroup
        if kind == "index":
            kind = "var"
        if kind != "ws":
            tokens.append(_Token(kind, m.group(kind) if kind != "var" else m.group("index"), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Term:
    __slots__ = ("coef", "conj", "plain")

    def __init__(self, coef=1 + 0j, conj=None, plain=None):
        self.coef = coef
        self.conj = conj if conj is not None else Counter()
        self.plain = plain if plain is not None else Counter()

    def times(self, other: "_Term") -> "_Term":
        return _Term(self.coef * other.coef, self.conj + other.conj, self.plain + other.plain)

    def power(self, k: int) -> "_Term":
        out = _Term()
        for _ in range(k):
            out = out.times(self)
        return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        return ParseError(message, *_position(self.text, tok.pos))

    def take(self, kind: str, text: str | None = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            got = tok.text or "end of input"
            raise self.error(f"expected {want!r}, got {got!r}")
        self.i += 1
        return tok

    def at_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text in ops

    def poly(self) -> list[_Term]:
        terms = []
        sign = 1
        # a leading sign is accepted so negative first terms can be printed
        if self.at_op("+", "-"):
            sign = -1 if self.take("op").text == "-" else 1
        while True:
            t = self.term()
            if sign < 0:
                t.coef = -t.coef
            terms.append(t)
            if not self.at_op("+", "-"):
                break
            sign = -1 if self.take("op").text == "-" else 1
        self.take("end")
        return terms

    def term(self) -> _Term:
        t = self.factor()
        while self.at_op("*"):
            self.take("op", "*")
            t = t.times(self.factor())
        return t

    def factor(self) -> _Term:
        t = self.primary()
        while self.at_op("^"):
            self.take("op", "^")
            tok = self.take("number")
            if not tok.text.isdigit():
                raise self.error("exponent must be an unsigned integer", tok)
            t = t.power(int(tok.text))
        return t

    def variable(self) -> int:
        tok = self.take("var")
        index = int(tok.text)
        if index < 1:
            raise self.error("variable index must be at least 1", tok)
        return index

    def primary(self) -> _Term:
        tok = self.peek()
        if tok.kind == "number":
            self.i += 1
            return _Term(complex(float(tok.text), 0.0))
        if tok.kind == "imag":
            self.i += 1
            return _Term(1j)
        if tok.kind == "var":
            return _Term(plain=Counter({self.variable(): 1}))
        if tok.kind == "op" and tok.text == "~":
            self.i += 1
            return _Term(conj=Counter({self.variable(): 1}))
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            re_part = float(self.take("number").text)
            im_part = 0.0
            if self.at_op("+", "-"):
                sign = -1.0 if self.take("op").text == "-" else 1.0
                mag = 1.0
                if self.peek().kind == "number":
                    mag = float(self.take("number").text)
                self.take("imag")
                im_part = sign * mag
            self.take("op", ")")
            return _Term(complex(re_part, im_part))
        raise self.error(f"unexpected token {tok.text or 'end of input'!r}")


def parse_poly(text: str, n: int | None = None) -> ConjugatePolynomial:
    """Parse polynomial text into canonical form.

    Like monomials are merged and zero coefficients dropped.  ``n`` defaults
    to the largest variable index that appears (1 for constants).
    """
    terms = _Parser(text).poly()
    pairs = []
    top = 1
    for t in terms:
        conj = [i for i, k in t.conj.items() for _ in range(k)]
        plain = [i for i, k in t.plain.items() for _ in range(k)]
        top = max([top, *conj, *plain])
        pairs.append((MonomialKey.make(conj, plain), t.coef))
    if n is None:
        n = top
    elif top > n:
        raise ParseError(f"variable x{top} exceeds the declared dimension {n}")
    return ConjugatePolynomial.from_terms(n, pairs)


# --------------------------------------------------------------------------
# printing

def _fmt_real(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _fmt_monomial(key: MonomialKey) -> str:
    parts = []
    for prefix, idx in (("~x", key.conj), ("x", key.plain)):
        for var, k in sorted(Counter(idx).items()):
            parts.append(f"{prefix}{var}" + (f"^{k}" if k > 1 else ""))
    return "*".join(parts)


def _fmt_term(c: complex, key: MonomialKey) -> tuple[bool, str]:
    """Return (negative, text) with the sign pulled out of the coefficient."""
    mono = _fmt_monomial(key)
    re_, im_ = c.real, c.imag
    if im_ == 0:
        neg, mag = re_ < 0, abs(re_)
        if mag == 1 and mono:
            return neg, mono
        coef = _fmt_real(mag)
    elif re_ == 0:
        neg, mag = im_ < 0, abs(im_)
        coef = "i" if mag == 1 else f"{_fmt_real(mag)}*i"
    else:
        neg = re_ < 0
        if neg:
            re_, im_ = -re_, -im_
        sign = "-" if im_ < 0 else "+"
        coef = f"({_fmt_real(re_)}{sign}{_fmt_real(abs(im_))}i)"
    return neg, f"{coef}*{mono}" if mono else coef


def print_poly(p: ConjugatePolynomial) -> str:
    """Canonical text; ``parse_poly(print_poly(p))`` reproduces ``p.terms`` exactly."""
    if not p.terms:
        return "0"
    out = []
    for k, (key, c) in enumerate(p.terms.items()):
        neg, text = _fmt_term(c, key)
        if k == 0:
            out.append(f"-{text}" if neg else text)
        else:
            out.append(f"{'-' if neg else '+'} {text}")
    return " ".join(out)


# --------------------------------------------------------------------------
# evaluation and structure

def eval_poly(p: ConjugatePolynomial, x) -> complex:
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1 or v.shape[0] != p.n:
        raise DimensionError(f"expected a point of length {p.n}, got shape {v.shape}")
    vc = v.conj()
    total = 0j
    for key, c in p.terms.items():
        term = c
        for i in key.conj:
            term *= vc[i - 1]
        for j in key.plain:
            term *= v[j - 1]
        total += term
    return complex(total)


@dataclass(frozen=True)
class Witness:
    key: MonomialKey
    partner: MonomialKey
    coeff: complex
    partner_coeff: complex
    violation: float


@dataclass(frozen=True)
class RealValuedVerdict:
    """Result of :func:`check_real_valued`; truthy iff real-valued."""

    real_valued: bool
    witnesses: tuple[Witness, ...] = ()
    violations: int = 0

    def __bool__(self) -> bool:
        return self.real_valued


def check_real_valued(p: ConjugatePolynomial, tol: float = TAU_PARSED) -> RealValuedVerdict:
    """Test whether every conjugate pair of monomials has conjugate coefficients.

    The witness list holds at most 20 violating pairs, largest violation first.
    """
    seen = set()
    bad = []
    for key in p.terms:
        partner = conjugate_key(key)
        pair = min(key, partner), max(key, partner)
        if pair in seen:
            continue
        seen.add(pair)
        a, b = p.coefficient(pair[0]), p.coefficient(pair[1])
        gap = abs(a - b.conjugate())
        if gap > tol:
            bad.append(Witness(pair[0], pair[1], a, b, gap))
    bad.sort(key=lambda w: -w.violation)
    return RealValuedVerdict(not bad, tuple(bad[:MAX_WITNESSES]), len(bad))


@dataclass(frozen=True)
class FormClass:
    """Tightest form class: ``symmetric_conjugate`` (degree 2d, d conjugated
    factors per monomial; ``degree`` holds d), ``complex`` and
    ``general_conjugate`` (``degree`` is the total degree), or ``general``."""

    kind: str
    degree: int | None = None


def classify_form(p: ConjugatePolynomial) -> FormClass:
    keys = list(p.terms)
    if not keys:
        return FormClass("general")
    halves = {(len(k.conj), len(k.plain)) for k in keys}
    if len(halves) == 1:
        a, b = halves.pop()
        if a == b:
            return FormClass("symmetric_conjugate", a)
        if a == 0:
            return FormClass("complex", b)
    degrees = {k.degree for k in keys}
    if len(degrees) == 1:
        return FormClass("general_conjugate", degrees.pop())
    return FormClass("general")


def multiset_permutations(idx: Iterable[int]) -> int:
    """Number of distinct orderings of a multiset of indices."""
    counts = Counter(idx)
    out = math.factorial(sum(counts.values()))
    for k in counts.values():
        out //= math.factorial(k)
    return out
