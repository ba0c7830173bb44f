"""Exact arithmetic in GF(p^e) and in towers GF(q) < GF(q^d).

Elements are handled internally as their canonical integer encodings
``enc = c0 + c1*p + ... + c_{e-1}*p^(e-1)`` where ``c_i`` are the coefficients
of the representing polynomial modulo the field modulus.  Every arithmetic
method of :class:`Field` accepts either Python ints or numpy integer arrays
and returns the same kind, so hot loops can be vectorised.
:class:`FieldElement` is a thin operator-overloading wrapper for the public API.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

# Dense 2-D add/mul tables are built below this order.
_TABLE_LIMIT = 256
MAX_ORDER = 2**20


class FieldError(ValueError):
    """Invalid field construction or mismatched operands."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q = p**e``; raise if q is not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, e


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over GF(p), little-endian coefficient tuples -----------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        factor = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * c) % p
        _trim(a)
    return a


def _monic_polys(p: int, degree: int) -> Iterator[tuple[int, ...]]:
    for low in range(p**degree):
        coeffs = [(low // p**i) % p for i in range(degree)]
        yield tuple(coeffs) + (1,)


def poly_encoding(poly: Sequence[int], p: int) -> int:
    return sum(c * p**i for i, c in enumerate(poly))


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = list(poly)
    deg = len(_trim(list(poly))) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for k in range(1, deg // 2 + 1):
        for divisor in _monic_polys(p, k):
            if not _poly_mod(poly, divisor, p):
                return False
    return True


def irreducible_polynomials(p: int, e: int) -> Iterator[tuple[int, ...]]:
    """Monic irreducible polynomials of degree e, by ascending encoding."""
    for poly in _monic_polys(p, e):
        if is_irreducible(poly, p):
            yield poly


# -- fields --------------------------------------------------------------------

class Field:
    """GF(p^e) with an explicit modulus, optionally designated over a subfield.

    Construct with :func:`make_field` or :func:`extension_field` rather than
    directly; the constructor trusts its arguments.
    """

    def __init__(self, p: int, e: int, modulus: Sequence[int],
                 subfield: Field | None = None, embedding: np.ndarray | None = None):
        self.p = p
        self.e = e
        self.modulus = tuple(int(c) for c in modulus)
        self.order = p**e
        self.subfield = subfield
        self._weights = p ** np.arange(e, dtype=np.int64)
        idx = np.arange(self.order, dtype=np.int64)
        self._digits = (idx[:, None] // self._weights[None, :]) % p
        self._digits.setflags(write=False)
        self._build_tables()
        self._embed = None
        self._restrict = None
        if subfield is not None:
            assert embedding is not None
            self._embed = np.asarray(embedding, dtype=np.int64)
            self._embed.setflags(write=False)
            restrict = np.full(self.order, -1, dtype=np.int64)
            restrict[self._embed] = np.arange(subfield.order)
            restrict.setflags(write=False)
            self._restrict = restrict
        self._key = (p, e, self.modulus,
                     None if subfield is None else (subfield._key, tuple(self._embed.tolist())))
        self._cache: dict = {}

    # construction helpers
    def _companion(self) -> np.ndarray:
        e, p = self.e, self.p
        t = np.zeros((e, e), dtype=np.int64)
        for i in range(e - 1):
            t[i + 1, i] = 1
        for i in range(e):
            t[i, e - 1] = (-self.modulus[i]) % p
        return t

    def _mult_matrix(self, a: int) -> np.ndarray:
        """Matrix of b -> a*b acting on digit vectors."""
        e, p = self.e, self.p
        comp = self._companion()
        acc = np.zeros((e, e), dtype=np.int64)
        power = np.eye(e, dtype=np.int64)
        for c in self._digits[a]:
            acc = (acc + c * power) % p
            power = (comp @ power) % p
        return acc

    def _slow_mul(self, a: int, b: int) -> int:
        v = (self._mult_matrix(a) @ self._digits[b]) % self.p
        return int(v @ self._weights)

    def _slow_pow(self, a: int, k: int) -> int:
        result, base = 1, a
        while k:
            if k & 1:
                result = self._slow_mul(result, base)
            base = self._slow_mul(base, base)
            k >>= 1
        return result

    def _build_tables(self) -> None:
        n, p = self.order, self.p
        group = n - 1
        factors = _prime_factors(group)
        gen = 1
        for cand in range(1, n):
            if all(self._slow_pow(cand, group // r) != 1 for r in factors):
                gen = cand
                break
        self.generator = gen
        # exp table in blocks: block_{j+1} = g^B * block_j
        block = max(1, int(np.ceil(np.sqrt(group))))
        mg = self._mult_matrix(gen)
        vecs = np.zeros((block, self.e), dtype=np.int64)
        cur = self._digits[1].copy()
        for i in range(block):
            vecs[i] = cur
            cur = (mg @ cur) % p
        g_block = int(cur @ self._weights)
        mb = self._mult_matrix(g_block)
        chunks = [vecs]
        total = block
        while total < group:
            vecs = (vecs @ mb.T) % p
            chunks.append(vecs)
            total += block
        exp = (np.concatenate(chunks)[:group] @ self._weights).astype(np.int64)
        log = np.zeros(n, dtype=np.int64)
        log[exp] = np.arange(group)
        self._exp = np.concatenate([exp, exp])
        self._log = log
        neg_digits = (-self._digits) % p
        self._neg = (neg_digits @ self._weights).astype(np.int64)
        inv = np.zeros(n, dtype=np.int64)
        inv[1:] = self._exp[(group - log[1:]) % group]
        self._inv = inv
        self._add_t = self._mul_t = None
        if n <= _TABLE_LIMIT:
            a = np.arange(n)
            self._add_t = self._add_slow(a[:, None], a[None, :])
            self._mul_t = self._mul_log(a[:, None], a[None, :])
        for arr in (self._exp, self._log, self._neg, self._inv, self._add_t, self._mul_t):
            if arr is not None:
                arr.setflags(write=False)

    def _add_slow(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        s = (self._digits[a] + self._digits[b]) % self.p
        return s @ self._weights

    def _mul_log(self, a, b):
        group = self.order - 1
        a = np.asarray(a)
        b = np.asarray(b)
        prod = self._exp[(self._log[a] + self._log[b]) % group]
        return np.where((a == 0) | (b == 0), 0, prod)

    # identity / hashing
    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        base = f"GF({self.p}^{self.e})" if self.e > 1 else f"GF({self.p})"
        if self.subfield is not None:
            base += f" over {self.subfield!r}"
        return base

    def __len__(self) -> int:
        return self.order

    def __call__(self, value: int) -> FieldElement:
        value = int(value)
        if not 0 <= value < self.order:
            raise FieldError(f"encoding {value} out of range for {self!r}")
        return FieldElement(self, value)

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self, i) for i in range(self.order)]

    @property
    def char(self) -> int:
        return self.p

    # arithmetic on encodings
    def add(self, a, b):
        if self._add_t is not None:
            return _out(self._add_t[a, b])
        return _out(self._add_slow(a, b))

    def neg(self, a):
        return _out(self._neg[a])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self._mul_t is not None:
            return _out(self._mul_t[a, b])
        return _out(self._mul_log(a, b))

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return _out(self._inv[a])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, k: int):
        group = self.order - 1
        a = np.asarray(a)
        if k == 0:
            return _out(np.ones_like(a))
        if k < 0:
            a = self._inv[a] if not np.any(a == 0) else self.inv(a)
            k = -k
        res = self._exp[(self._log[a] * (k % group)) % group]
        return _out(np.where(a == 0, 0, res))

    def frobenius(self, a, k: int = 1):
        """x -> x^(p^k)."""
        return self.pow(a, self.p ** (k % self.e) if self.e > 1 else 1)

    def sum(self, a, axis: int = 0):
        """Field sum of an array of encodings along ``axis``."""
        a = np.asarray(a)
        if self.p == 2:
            return _out(np.bitwise_xor.reduce(a, axis=axis))
        if axis < 0:
            axis += a.ndim
        s = self._digits[a].sum(axis=axis) % self.p
        return _out(s @ self._weights)

    def dot(self, a, b):
        """Sum over the last axis of elementwise products."""
        return self.sum(self.mul(a, b), axis=-1)

    def log(self, a) -> int:
        if a == 0:
            raise ZeroDivisionError("log of zero")
        return int(self._log[a])

    def exp(self, k: int) -> int:
        return int(self._exp[k % (self.order - 1)])

    def multiplicative_order(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative order")
        group = self.order - 1
        order = group
        for r in _prime_factors(group):
            while order % r == 0 and self.pow(a, order // r) == 1:
                order //= r
        return order

    def digits(self, a) -> np.ndarray:
        return self._digits[a]

    def from_digits(self, coeffs: Sequence[int]) -> int:
        return poly_encoding([c % self.p for c in coeffs], self.p)

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> prime field."""
        return n % self.p

    # towers
    @property
    def degree(self) -> int:
        """Index [self : subfield]."""
        if self.subfield is None:
            raise FieldError(f"{self!r} has no designated subfield")
        return self.e // self.subfield.e

    def embed(self, a):
        if self._embed is None:
            raise FieldError(f"{self!r} has no designated subfield")
        return _out(self._embed[a])

    def restrict(self, a):
        """Subfield encodings of subfield members; raise on anything else."""
        if self._restrict is None:
            raise FieldError(f"{self!r} has no designated subfield")
        r = self._restrict[a]
        if np.any(np.asarray(r) < 0):
            raise FieldError("element does not lie in the designated subfield")
        return _out(r)

    def in_subfield(self, a):
        if self.subfield is None:
            raise FieldError(f"{self!r} has no designated subfield")
        q = self.subfield.order
        return _out(np.asarray(self.pow(a, q)) == np.asarray(a))

    def sub_frobenius(self, a, k: int = 1):
        """x -> x^(q^k) for q the subfield order (the relative Frobenius)."""
        q = self.subfield.order
        return self.pow(a, q ** (k % self.degree))

    def norm(self, a):
        q, d = self.subfield.order, self.degree
        return self.pow(a, (q**d - 1) // (q - 1))

    def trace(self, a):
        acc = np.asarray(a)
        total = acc
        for _ in range(1, self.degree):
            acc = np.asarray(self.sub_frobenius(acc))
            total = np.asarray(self.add(total, acc))
        return _out(total)

    def coordinates(self, basis: Sequence[int]) -> np.ndarray:
        """Table ``coords[x] -> subfield encodings`` of x over ``basis``.

        Built by enumerating all subfield combinations; raises if ``basis`` is
        not a basis over the designated subfield.
        """
        key = ("coords", tuple(int(b) for b in basis))
        if key in self._cache:
            return self._cache[key]
        sub = self.subfield
        d = len(basis)
        if d != self.degree:
            raise FieldError("basis size does not match extension degree")
        combos = np.array(list(itertools.product(range(sub.order), repeat=d)), dtype=np.int64)
        terms = self.mul(self._embed[combos], np.asarray(basis, dtype=np.int64)[None, :])
        values = self.sum(terms, axis=1)
        table = np.full((self.order, d), -1, dtype=np.int64)
        table[values] = combos
        if np.any(table[:, 0] < 0):
            raise FieldError("elements are not linearly independent over the subfield")
        table.setflags(write=False)
        self._cache[key] = table
        return table

    def to_json(self) -> dict:
        out = {"p": self.p, "e": self.e, "modulus": list(self.modulus)}
        if self.subfield is not None:
            out["subfield"] = self.subfield.to_json()
        return out


def _out(x):
    """Collapse 0-d results to Python ints."""
    arr = np.asarray(x)
    if arr.ndim == 0:
        return int(arr)
    return arr.astype(np.int64, copy=False)


@dataclass(frozen=True)
class FieldElement:
    field: Field
    value: int

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("operands belong to different fields")
            return other.value
        if isinstance(other, (int, np.integer)):
            return self.field.from_int(int(other))
        return NotImplemented

    def _wrap(self, v: int) -> FieldElement:
        return FieldElement(self.field, int(v))

    def __add__(self, other):
        return self._wrap(self.field.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.field.sub(self.value, self._coerce(other)))

    def __rsub__(self, other):
        return self._wrap(self.field.sub(self._coerce(other), self.value))

    def __mul__(self, other):
        return self._wrap(self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.field.div(self.value, self._coerce(other)))

    def __rtruediv__(self, other):
        return self._wrap(self.field.div(self._coerce(other), self.value))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, k: int):
        return self._wrap(self.field.pow(self.value, k))

    def inverse(self) -> FieldElement:
        return self._wrap(self.field.inv(self.value))

    def frobenius(self, k: int = 1) -> FieldElement:
        return self._wrap(self.field.frobenius(self.value, k))

    def order(self) -> int:
        return self.field.multiplicative_order(self.value)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{self.field!r}({self.value})"


def make_field(p: int, e: int = 1, modulus: Sequence[int] | None = None) -> Field:
    """Build GF(p^e).

    Without ``modulus`` the monic irreducible of degree ``e`` with the smallest
    canonical encoding is used, so the representation is reproducible.
    """
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if e < 1:
        raise FieldError("extension degree must be positive")
    if p**e > MAX_ORDER:
        raise FieldError(f"GF({p}^{e}) exceeds the supported order {MAX_ORDER}")
    if modulus is None:
        modulus = next(irreducible_polynomials(p, e))
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != e + 1 or modulus[-1] != 1:
            raise FieldError(f"modulus must be monic of degree {e}")
        if not is_irreducible(modulus, p):
            raise FieldError(f"modulus {list(modulus)} is reducible over GF({p})")
    return Field(p, e, modulus)


def _find_root(big: Field, poly: Sequence[int]) -> int:
    """Least-encoding root in ``big`` of a polynomial over the prime field."""
    x = np.arange(big.order, dtype=np.int64)
    acc = np.zeros_like(x)
    for c in reversed(poly):
        acc = np.asarray(big.add(big.mul(acc, x), c % big.p))
    roots = np.nonzero(acc == 0)[0]
    if roots.size == 0:
        raise FieldError("polynomial has no root in the extension")
    return int(roots[0])


def extension_field(small: Field, d: int, modulus: Sequence[int] | None = None) -> Field:
    """GF(q^d) as GF(p^(e*d)) with an explicit embedding of ``small`` = GF(q).

    The embedding sends the polynomial basis of ``small`` to powers of the
    least root of the small modulus inside the big field.
    """
    if d < 1:
        raise FieldError("extension index must be positive")
    bare = make_field(small.p, small.e * d, modulus)
    root = _find_root(bare, small.modulus)
    powers = [1]
    for _ in range(1, small.e):
        powers.append(bare.mul(powers[-1], root))
    powers = np.asarray(powers, dtype=np.int64)
    images = bare.sum(bare.mul(small._digits, powers[None, :]), axis=1)
    images = np.atleast_1d(images)
    big = Field(bare.p, bare.e, bare.modulus, subfield=small, embedding=images)
    # subfield = fixed points of x -> x^q
    fixed = np.nonzero(np.asarray(big.pow(np.arange(big.order), small.order)) == np.arange(big.order))[0]
    if sorted(images.tolist()) != fixed.tolist():
        raise FieldError("subfield embedding is not the fixed field of Frobenius")
    return big


def tower(q: int, d: int, small_modulus=None, big_modulus=None) -> tuple[Field, Field]:
    """Convenience: ``(GF(q), GF(q^d))`` with the designated embedding."""
    p, e = prime_power(q)
    small = make_field(p, e, small_modulus)
    return small, extension_field(small, d, big_modulus)


def field_from_json(obj: dict) -> Field:
    if "subfield" in obj:
        small = field_from_json(obj["subfield"])
        return extension_field(small, obj["e"] // small.e, obj["modulus"])
    return make_field(obj["p"], obj["e"], obj["modulus"])


def norm_trace(x: FieldElement, subfield: Field) -> tuple[FieldElement, FieldElement]:
    """Relative norm and trace of ``x`` down to ``subfield`` (as big-field elements)."""
    f = x.field
    if f.subfield is None or f.subfield != subfield:
        raise FieldError(f"{subfield!r} is not the designated subfield of {f!r}")
    n = f.norm(x.value)
    t = f.trace(x.value)
    if not (f.in_subfield(n) and f.in_subfield(t)):
        raise FieldError("norm/trace left the subfield")
    return f(n), f(t)


def primitive_element(f: Field) -> FieldElement:
    """Multiplicative generator with the smallest encoding."""
    return f(f.generator)


def primitive_elements(f: Field) -> list[FieldElement]:
    return [f(a) for a in range(1, f.order) if f.multiplicative_order(a) == f.order - 1]


def _independent(big: Field, elems: Sequence[int]) -> bool:
    try:
        big.coordinates(elems)
    except FieldError:
        return False
    return True


def extension_basis(big: Field, small: Field, style: str = "polynomial",
                    generator: int | None = None) -> tuple[int, ...]:
    """A basis of ``big`` over its designated subfield ``small``, as encodings.

    ``polynomial``: 1, g, ..., g^(d-1) for g the class of t (or ``generator``),
    falling back to the least primitive element when t lies in a proper
    subfield.  ``normal``: b, b^q, ..., b^(q^(d-1)) for the least suitable b.
    """
    if big.subfield is None or big.subfield != small:
        raise FieldError(f"{small!r} is not the designated subfield of {big!r}")
    d = big.degree
    if d == 1:
        return (1,)
    if style == "polynomial":
        candidates = [generator] if generator is not None else [big.p if big.order > big.p else 1, big.generator]
        for g in candidates:
            elems = [int(big.pow(g, i)) for i in range(d)]
            if _independent(big, elems):
                return tuple(elems)
        raise FieldError("generator does not span the extension")
    if style == "normal":
        for b in range(1, big.order):
            elems = [int(big.sub_frobenius(b, i)) for i in range(d)]
            if _independent(big, elems):
                return tuple(elems)
        raise FieldError("no normal basis found")  # pragma: no cover
    raise FieldError(f"unknown basis style {style!r}")


def dual_basis(big: Field, basis: Sequence[int]) -> tuple[int, ...]:
    """Trace-dual basis: Tr(dual_i * basis_j) = [i == j]."""
    xs = np.arange(big.order, dtype=np.int64)
    traces = np.stack([np.asarray(big.trace(big.mul(xs, b))) for b in basis], axis=1)
    out = []
    for i in range(len(basis)):
        target = np.zeros(len(basis), dtype=np.int64)
        target[i] = 1
        hits = np.nonzero(np.all(traces == target[None, :], axis=1))[0]
        if hits.size != 1:
            raise FieldError("basis has no unique trace dual")
        out.append(int(hits[0]))
    return tuple(out)


def subfield_basis(big: Field, ell: int) -> tuple[int, ...]:
    """Greedy least-encoding basis over GF(q) of the intermediate field GF(q^ell)."""
    q = big.subfield.order
    xs = np.arange(big.order, dtype=np.int64)
    members = xs[np.asarray(big.pow(xs, q**ell)) == xs]
    sub = big.subfield
    chosen: list[int] = []
    span = {0}
    for x in members.tolist():
        if x in span:
            continue
        chosen.append(x)
        span = {int(big.add(s, big.mul(int(big.embed(c)), x))) for s in span for c in range(sub.order)}
        if len(chosen) == ell:
            break
    return tuple(chosen)
