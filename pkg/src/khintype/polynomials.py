"""Exact multivariate polynomials over Q and a small expression language.

Variables are named ``a1 .. ad`` and coefficients are `fractions.Fraction`,
so evaluation at rational points is exact and reproducible bit for bit.
Bulk evaluation on numpy arrays uses float coefficients.
"""
from __future__ import annotations

import re
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np


class ParseError(ValueError):
    """Syntax or semantic error in a polynomial expression, with position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class Polynomial:
    """Polynomial in ``nvars`` variables, stored as {exponent tuple: Fraction}.

    Instances are immutable; all arithmetic returns new objects.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        clean = {}
        for exps, c in (terms or {}).items():
            c = Fraction(c)
            if c == 0:
                continue
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps}")
            clean[exps] = c
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *_):
        raise AttributeError("Polynomial is immutable")

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        """The monomial a{i+1} (0-based variable index)."""
        if not 0 <= i < nvars:
            raise ValueError(f"variable index {i} out of range")
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    # ------------------------------------------------------------------
    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial(self.nvars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        out = Polynomial.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return Polynomial.const(self.nvars, other)

    # ------------------------------------------------------------------
    # calculus and evaluation

    def diff(self, i: int) -> "Polynomial":
        """Partial derivative with respect to variable i (0-based)."""
        terms = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            terms[tuple(ne)] = terms.get(tuple(ne), Fraction(0)) + c * e[i]
        return Polynomial(self.nvars, terms)

    def __call__(self, point: Sequence):
        """Evaluate at a point; rational inputs give exact rational output."""
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        exact = all(isinstance(x, (int, Fraction)) for x in point)
        total = Fraction(0) if exact else 0.0
        for e, c in self.terms.items():
            term = c if exact else float(c)
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def eval_array(self, X: np.ndarray) -> np.ndarray:
        """Evaluate on an array of shape (..., nvars), in float arithmetic."""
        X = np.asarray(X, dtype=float)
        out = np.zeros(X.shape[:-1])
        powers: dict = {}
        for e, c in self.terms.items():
            term = np.full(X.shape[:-1], float(c))
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in powers:
                        powers[key] = X[..., i] ** k
                    term = term * powers[key]
            out += term
        return out

    # ------------------------------------------------------------------
    # queries

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def integerized(self):
        """Return (C, [(int coefficient, exponents)...]) with C * self integral.

        C is the lcm of coefficient denominators; used by the exact counting
        scan to move all arithmetic into the integers.
        """
        dens = [c.denominator for c in self.terms.values()]
        C = lcm(*dens) if dens else 1
        monos = [(int(c * C), e) for e, c in sorted(self.terms.items())]
        return C, monos

    # ------------------------------------------------------------------
    # canonical text form

    def canonical(self) -> str:
        """Canonical printout: monomials sorted by degree then leading variable."""
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))
        parts = []
        for idx, (e, c) in enumerate(items):
            mono = "*".join(
                f"a{i + 1}^{k}" if k > 1 else f"a{i + 1}" for i, k in enumerate(e) if k
            )
            mag = abs(c)
            if mono:
                body = mono if mag == 1 else f"{mag}*{mono}"
            else:
                body = str(mag)
            if idx == 0:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self.canonical()!r})"

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))


# ----------------------------------------------------------------------
# expression parser
#
# expr   := term (('+' | '-') term)*
# term   := unary (('*' | '/') unary)*        '/' only by a nonzero constant
# unary  := ('+' | '-')* power
# power  := atom ('^' INT)?
# atom   := INT | NAME | '(' expr ')'

_TOKEN = re.compile(r"\s*(?:(\d+)|(a\d+)|([()^*/+-])|(\S))")


class _Parser:
    def __init__(self, source: str, nvars: int):
        self.source = source
        self.nvars = nvars
        self.tokens = []
        pos = 0
        while pos < len(source):
            m = _TOKEN.match(source, pos)
            if m is None:
                break
            num, name, op, junk = m.groups()
            tokpos = m.start(1) if num else m.start(2) if name else m.start(3) if op else m.start(4)
            if junk:
                raise ParseError(f"unexpected character {junk!r}", tokpos)
            self.tokens.append((num or name or op, tokpos))
            pos = m.end()
        self.tokens.append((None, len(source)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def pos(self):
        return self.tokens[self.i][1]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        p = self.expr()
        if self.peek() is not None:
            raise ParseError(f"unexpected token {self.peek()!r}", self.pos())
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.peek() in ("+", "-"):
            op, _ = self.advance()
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self.peek() in ("*", "/"):
            op, oppos = self.advance()
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant() or q.constant_value() == 0:
                    raise ParseError("can only divide by a nonzero constant", oppos)
                p = p * (Fraction(1) / q.constant_value())
        return p

    def unary(self) -> Polynomial:
        sign = 1
        while self.peek() in ("+", "-"):
            op, _ = self.advance()
            if op == "-":
                sign = -sign
        p = self.power()
        return p if sign == 1 else -p

    def power(self) -> Polynomial:
        p = self.atom()
        if self.peek() == "^":
            _, oppos = self.advance()
            tok, tokpos = self.advance()
            if tok == "-":
                raise ParseError("negative exponent not allowed", oppos)
            if tok is None or not tok.isdigit():
                raise ParseError("exponent must be a nonnegative integer", tokpos)
            p = p ** int(tok)
        return p

    def atom(self) -> Polynomial:
        tok, tokpos = self.advance()
        if tok is None:
            raise ParseError("unexpected end of input", tokpos)
        if tok.isdigit():
            return Polynomial.const(self.nvars, int(tok))
        if tok.startswith("a"):
            idx = int(tok[1:])
            if not 1 <= idx <= self.nvars:
                raise ParseError(f"unknown variable {tok!r} (have a1..a{self.nvars})", tokpos)
            return Polynomial.variable(self.nvars, idx - 1)
        if tok == "(":
            p = self.expr()
            tok2, pos2 = self.advance()
            if tok2 != ")":
                raise ParseError("expected ')'", pos2)
            return p
        raise ParseError(f"unexpected token {tok!r}", tokpos)


def parse_polynomial(source: str, nvars: int) -> Polynomial:
    """Parse one polynomial expression in variables a1..a{nvars}."""
    return _Parser(source, nvars).parse()
