"""Homogeneous polynomials over a finite field, with a small text grammar.

Text form: terms ``c*x0^a*x1^b`` joined by ``+`` (``-`` also accepted);
coefficients are canonical encodings.  On input the aliases ``x, y, z, t``
stand for ``x0, x1, x2, x3``, and ``*`` between factors may be omitted, so
``3y^2 + 4xt`` parses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Callable, Mapping, Sequence

import numpy as np

from .finite_field import Field

_ALIASES = {"x": 0, "y": 1, "z": 2, "t": 3}
_TOKEN = re.compile(r"\s*(x\d+|[xyzt]|\d+|\^|\*)")


class FormError(ValueError):
    pass


def monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total ``degree``, graded-lex with x0 major (x0^s first)."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        exps = [0] * nvars
        for v in combo:
            exps[v] += 1
        out.append(tuple(exps))
    out.sort(reverse=True)
    return out


@dataclass(frozen=True)
class Form:
    field: Field
    nvars: int
    degree: int
    terms: tuple[tuple[tuple[int, ...], int], ...]

    @classmethod
    def from_dict(cls, field: Field, nvars: int, degree: int,
                  coeffs: Mapping[tuple[int, ...], int]) -> Form:
        clean = {}
        for exps, c in coeffs.items():
            exps = tuple(int(a) for a in exps)
            if len(exps) != nvars or sum(exps) != degree or min(exps) < 0:
                raise FormError(f"exponent {exps} does not fit {nvars} variables of degree {degree}")
            c = int(c)
            if c:
                clean[exps] = c
        return cls(field, nvars, degree, tuple(sorted(clean.items(), reverse=True)))

    @classmethod
    def zero(cls, field: Field, nvars: int, degree: int) -> Form:
        return cls(field, nvars, degree, ())

    @classmethod
    def monomial(cls, field: Field, exps: Sequence[int], coeff: int = 1) -> Form:
        return cls.from_dict(field, len(exps), sum(exps), {tuple(exps): coeff})

    @classmethod
    def variable(cls, field: Field, nvars: int, i: int) -> Form:
        exps = [0] * nvars
        exps[i] = 1
        return cls.monomial(field, exps)

    @classmethod
    def linear(cls, field: Field, coeffs: Sequence[int]) -> Form:
        n = len(coeffs)
        return cls.from_dict(field, n, 1, {tuple(int(i == j) for j in range(n)): c
                                           for i, c in enumerate(coeffs)})

    @property
    def coeffs(self) -> dict[tuple[int, ...], int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: Form) -> None:
        if other.field != self.field or other.nvars != self.nvars:
            raise FormError("forms live in different rings")

    def __add__(self, other: Form) -> Form:
        self._check(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if other.degree != self.degree:
            raise FormError("cannot add forms of different degrees")
        acc = self.coeffs
        for exps, c in other.terms:
            acc[exps] = self.field.add(acc.get(exps, 0), c)
        return Form.from_dict(self.field, self.nvars, self.degree, acc)

    def __neg__(self) -> Form:
        return self.scale(self.field.neg(1))

    def __sub__(self, other: Form) -> Form:
        return self + (-other)

    def scale(self, c: int) -> Form:
        f = self.field
        return Form.from_dict(f, self.nvars, self.degree,
                              {e: f.mul(a, c) for e, a in self.terms})

    def __mul__(self, other: Form) -> Form:
        self._check(other)
        f = self.field
        acc: dict[tuple[int, ...], int] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = f.add(acc.get(e, 0), f.mul(c1, c2))
        return Form.from_dict(f, self.nvars, self.degree + other.degree, acc)

    def __pow__(self, k: int) -> Form:
        out = Form.monomial(self.field, [0] * self.nvars)
        for _ in range(k):
            out = out * self
        return out

    def map_coefficients(self, fn: Callable[[int], int], field: Field) -> Form:
        return Form.from_dict(field, self.nvars, self.degree, {e: fn(c) for e, c in self.terms})

    def frobenius(self, power: int) -> Form:
        """Raise every coefficient to ``power`` (a power of the characteristic)."""
        f = self.field
        return self.map_coefficients(lambda c: f.pow(c, power), f)

    def derivative(self, i: int) -> Form:
        f = self.field
        acc = {}
        for exps, c in self.terms:
            if exps[i] == 0:
                continue
            e = list(exps)
            e[i] -= 1
            acc[tuple(e)] = f.mul(c, f.from_int(exps[i]))
        return Form.from_dict(f, self.nvars, self.degree - 1, acc)

    def evaluate(self, point: Sequence[int]) -> int:
        """Value at the given coordinate tuple (no rescaling is applied)."""
        return int(self.evaluate_many(np.asarray([point], dtype=np.int64))[0])

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Values at each row of an ``(n, nvars)`` array of encodings."""
        f = self.field
        points = np.asarray(points, dtype=np.int64)
        if points.ndim != 2 or points.shape[1] != self.nvars:
            raise FormError(f"points must have {self.nvars} coordinates")
        n = points.shape[0]
        if not self.terms:
            return np.zeros(n, dtype=np.int64)
        vals = []
        for exps, c in self.terms:
            v = np.full(n, c, dtype=np.int64)
            for var, a in enumerate(exps):
                if a:
                    v = f.mul(v, f.pow(points[:, var], a))
            vals.append(v)
        return np.atleast_1d(f.sum(np.stack(vals), axis=0))

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.terms:
            factors = [str(c)] if c != 1 or not any(exps) else []
            for var, a in enumerate(exps):
                if a == 1:
                    factors.append(f"x{var}")
                elif a > 1:
                    factors.append(f"x{var}^{a}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.to_text()


def parse_form(text: str, field: Field, nvars: int | None = None) -> Form:
    """Parse the text grammar into a homogeneous :class:`Form`."""
    raw_terms = []
    sign = 1
    buf = ""
    for ch in text.strip():
        if ch in "+-" and buf.strip():
            raw_terms.append((sign, buf))
            buf = ""
            sign = 1 if ch == "+" else -1
        elif ch in "+-":
            sign = sign * (1 if ch == "+" else -1)
        else:
            buf += ch
    if buf.strip():
        raw_terms.append((sign, buf))
    if not raw_terms:
        raise FormError("empty form")
    parsed = []
    for sgn, term in raw_terms:
        pos, tokens = 0, []
        term = term.strip()
        while pos < len(term):
            m = _TOKEN.match(term, pos)
            if not m:
                raise FormError(f"cannot parse {term!r} at {term[pos:]!r}")
            tokens.append(m.group(1))
            pos = m.end()
            while pos < len(term) and term[pos].isspace():
                pos += 1
        coeff = 1
        powers: dict[int, int] = {}
        i = 0
        if tokens and tokens[0].isdigit():
            coeff = int(tokens[0])
            i = 1
        while i < len(tokens):
            tok = tokens[i]
            if tok == "*":
                i += 1
                continue
            if tok.startswith("x") and tok[1:].isdigit():
                var = int(tok[1:])
            elif tok in _ALIASES:
                var = _ALIASES[tok]
            else:
                raise FormError(f"unexpected token {tok!r} in {term!r}")
            exp = 1
            if i + 1 < len(tokens) and tokens[i + 1] == "^":
                if i + 2 >= len(tokens) or not tokens[i + 2].isdigit():
                    raise FormError(f"missing exponent in {term!r}")
                exp = int(tokens[i + 2])
                i += 2
            powers[var] = powers.get(var, 0) + exp
            i += 1
        if not 0 <= coeff < field.order:
            raise FormError(f"coefficient {coeff} is not an encoding in {field!r}")
        if sgn < 0:
            coeff = field.neg(coeff)
        parsed.append((powers, coeff))
    width = max((max(p) + 1 for p, _ in parsed if p), default=1)
    if nvars is None:
        nvars = width
    elif width > nvars:
        raise FormError(f"form uses {width} variables, expected {nvars}")
    degrees = {sum(p.values()) for p, _ in parsed}
    if len(degrees) != 1:
        raise FormError("form is not homogeneous")
    degree = degrees.pop()
    acc: dict[tuple[int, ...], int] = {}
    for powers, c in parsed:
        exps = tuple(powers.get(v, 0) for v in range(nvars))
        acc[exps] = field.add(acc.get(exps, 0), c)
    return Form.from_dict(field, nvars, degree, acc)
