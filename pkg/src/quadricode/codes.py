"""Code families: evaluation codes, extended Reed-Solomon, tensor and
bidegree codes, the cyclic family B(s) and its extension, puncturing.

Generator rows are monomial evaluations in graded-lex order (x0 major);
columns follow the ambient order of the variety's points.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import geometry as geo
from .finite_field import Field, FieldError
from .forms import Form, monomials
from .geometry import ProjectivePoint
from .linalg import Matrix, kronecker, rank, row_basis, subfield_subcode


class RangeError(ValueError):
    """A parameter violates the hypothesis of the statement it realises."""


@dataclass(frozen=True)
class LinearCode:
    generator: Matrix
    labels: tuple
    provenance: dict = dc_field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if len(self.labels) != self.generator.cols:
            raise ValueError("one label per column is required")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("column labels must be distinct")

    @property
    def field(self) -> Field:
        return self.generator.field

    @property
    def n(self) -> int:
        return self.generator.cols

    @cached_property
    def k(self) -> int:
        return rank(self.generator)

    @cached_property
    def basis(self) -> Matrix:
        """RREF generator without zero rows."""
        return row_basis(self.generator)

    def position(self, label) -> int:
        return self.labels.index(label)

    def with_generator(self, gen: Matrix, **extra) -> LinearCode:
        prov = dict(self.provenance)
        prov.update(extra)
        return LinearCode(gen, self.labels, prov)

    def to_json(self) -> dict:
        return {
            "provenance": _jsonable(self.provenance),
            "field": self.field.to_json(),
            "n": self.n,
            "k": self.k,
            "generator": self.generator.data.tolist(),
            "labels": [label_to_json(lb) for lb in self.labels],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self) -> str:
        fam = self.provenance.get("family", "code")
        return f"<{fam} [{self.n}, {self.k}] over {self.field!r}>"


def label_to_json(label):
    if isinstance(label, ProjectivePoint):
        return list(label.coords)
    if isinstance(label, tuple):
        return [label_to_json(x) for x in label]
    return int(label)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def evaluation_matrix(field: Field, coords: np.ndarray, s: int) -> tuple[Matrix, list]:
    """Rows: all degree-s monomials evaluated at the given coordinate rows."""
    coords = np.asarray(coords, dtype=np.int64)
    mons = monomials(coords.shape[1], s)
    rows = [Form.monomial(field, m).evaluate_many(coords) for m in mons]
    return Matrix(field, np.asarray(rows).reshape(len(mons), coords.shape[0]), cols=coords.shape[0]), mons


def evaluation_code(points: Sequence[ProjectivePoint], s: int,
                    provenance: dict | None = None) -> LinearCode:
    """Image of f -> (f(P_1), ..., f(P_n)) over all forms of degree s."""
    if s < 0:
        raise RangeError("degree must be nonnegative")
    if not points:
        raise ValueError("empty point set")
    field = points[0].field
    gen, mons = evaluation_matrix(field, geo.points_array(points), s)
    prov = {"family": "evaluation", "s": s, "monomials": mons}
    prov.update(provenance or {})
    return LinearCode(gen, tuple(points), prov)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise RangeError(message)


def extended_rs(field: Field, s: int) -> LinearCode:
    """C_{P^1}(s): x^i y^(s-i) at the q+1 points of P^1; [q+1, s+1, q-s+1]."""
    q = field.order
    _require(0 <= s < q, "extended Reed-Solomon requires 0 <= s < q")
    return evaluation_code(geo.projective_line(field), s, {"family": "extended_rs", "q": q})


def tensor_code(a: LinearCode, b: LinearCode) -> LinearCode:
    """Kronecker product; labels are factor tuples in row-major order."""
    if a.field != b.field:
        raise FieldError("codes over different fields")

    def flat(lb):
        return lb if isinstance(lb, tuple) else (lb,)

    labels = tuple(flat(x) + flat(y) for x in a.labels for y in b.labels)
    prov = {"family": "tensor", "factors": [a.provenance, b.provenance]}
    return LinearCode(kronecker(a.generator, b.generator), labels, prov)


def segre_relabel(code: LinearCode) -> LinearCode:
    """Replace tuple-of-P^1 labels by Segre images, in ambient order."""
    images = [geo.segre(list(lb)) for lb in code.labels]
    order = sorted(range(code.n), key=lambda i: images[i])
    gen = code.generator.take_columns(order)
    prov = dict(code.provenance)
    prov["segre_relabelled"] = True
    return LinearCode(gen, tuple(images[i] for i in order), prov)


def bidegree_code(field: Field, a: int, b: int) -> LinearCode:
    """Forms of bidegree (a, b) on the hyperbolic quadric."""
    q = field.order
    _require(0 <= a < q and 0 <= b < q, "bidegree codes require 0 <= a, b < q")
    code = segre_relabel(tensor_code(extended_rs(field, a), extended_rs(field, b)))
    return code.with_generator(code.generator, family="bidegree", q=q, a=a, b=b)


def hyperbolic_code(field: Field, s: int) -> LinearCode:
    q = field.order
    _require(0 <= s < q, "hyperbolic quadric codes require s < q")
    pts = geo.quadric_points(geo.hyperbolic_quadric(field))
    return evaluation_code(pts, s, {"family": "hyperbolic", "q": q})


def elliptic_code(big: Field, s: int, w: int | None = None, strict: bool = True) -> LinearCode:
    q = big.subfield.order
    if strict:
        _require(0 <= s < q - 1, "elliptic quadric codes require s < q-1")
    quad = geo.irreducible_binary_quadratic(big, w)
    pts = geo.quadric_points(geo.elliptic_quadric(quad))
    return evaluation_code(pts, s, {"family": "elliptic", "q": q, "w": quad.w})


def segre_code(field: Field, d: int, s: int) -> LinearCode:
    q = field.order
    _require(d >= 2, "the Segre variety needs d >= 2")
    _require(0 <= s < q, "Segre variety codes require s < q")
    pts, _ = geo.segre_variety(field, d)
    return evaluation_code(pts, s, {"family": "segre", "q": q, "d": d})


def twisted_code(spec: geo.EmbeddingSpec, s: int, strict: bool = True) -> LinearCode:
    q = spec.q
    if strict:
        _require(0 <= s < q - 1, "twisted Segre codes require s < q-1")
    return evaluation_code(spec.points(), s, {"family": "twisted", "q": q, "d": spec.d,
                                             "basis": list(spec.basis), "variant": spec.variant})


def bch_exponents(q: int, d: int, s: int) -> list[int]:
    """i_0 + i_1 q + ... + i_{d-1} q^(d-1) with 0 <= i_j <= s, ascending."""
    return sorted({sum(i * q**j for j, i in enumerate(digs))
                   for digs in itertools.product(range(s + 1), repeat=d)})


def bch_B(big: Field, s: int, alpha: int | None = None) -> LinearCode:
    """Cyclic code over GF(q^d) spanned by (zeta^r)_zeta for r in the exponent set.

    Column k holds zeta = alpha^k, so a cyclic shift is an index rotation.
    """
    q, d = big.subfield.order, big.degree
    _require(0 <= s < q, "B(s) requires 0 <= s < q")
    if alpha is None:
        alpha = big.generator
    n = big.order - 1
    zetas = np.asarray([big.pow(alpha, k) for k in range(n)], dtype=np.int64)
    if len(set(zetas.tolist())) != n:
        raise FieldError("alpha is not primitive")
    exps = bch_exponents(q, d, s)
    rows = np.stack([np.atleast_1d(big.pow(zetas, r)) for r in exps])
    prov = {"family": "bch", "q": q, "d": d, "s": s, "length": n,
            "exponents": sorted({r % n for r in exps}), "alpha": int(alpha)}
    return LinearCode(Matrix(big, rows), tuple(int(z) for z in zetas), prov)


def bch_B_ext(big: Field, s: int) -> LinearCode:
    """x^i y^(m-i), m = s(q^d-1)/(q-1), over P^1(GF(q^d)).

    Forms are evaluated at the representatives (x:1) and (1:0); columns are
    still listed in ambient order of the normalised points.
    """
    q, d = big.subfield.order, big.degree
    _require(0 <= s <= q - 1, "B_ext(s) requires 0 <= s <= q-1")
    m = s * (q**d - 1) // (q - 1)
    pts = geo.projective_line(big)
    reps = np.asarray([geo.affine_representative(p) for p in pts], dtype=np.int64)
    exps = bch_exponents(q, d, s)
    rows = [Form.monomial(big, (i, m - i)).evaluate_many(reps) for i in exps]
    prov = {"family": "bch_ext", "q": q, "d": d, "s": s, "m": m, "exponents": exps}
    return LinearCode(Matrix(big, np.stack(rows)), tuple(pts), prov)


def subfield_restriction(code: LinearCode) -> LinearCode:
    """Subfield subcode over the designated subfield, same labels."""
    big = code.field
    gen = subfield_subcode(code.generator, big.subfield)
    prov = dict(code.provenance)
    prov["family"] = prov.get("family", "code") + "_0"
    prov["subfield_of"] = big.to_json()
    return LinearCode(gen, code.labels, prov)


def bch_B0(big: Field, s: int, alpha: int | None = None) -> LinearCode:
    return subfield_restriction(bch_B(big, s, alpha))


def bch_B0_ext(big: Field, s: int) -> LinearCode:
    return subfield_restriction(bch_B_ext(big, s))


def puncture(code: LinearCode, positions) -> LinearCode:
    """Delete the given column indices; remaining labels keep their order."""
    positions = set(int(p) for p in positions)
    if any(not 0 <= p < code.n for p in positions):
        raise IndexError("puncture position out of range")
    keep = [j for j in range(code.n) if j not in positions]
    prov = dict(code.provenance)
    prov["punctured"] = sorted(positions)
    return LinearCode(code.generator.take_columns(keep), tuple(code.labels[j] for j in keep), prov)


def permute_columns(code: LinearCode, order: Sequence[int], labels: Sequence | None = None) -> LinearCode:
    """Column j of the result is column ``order[j]`` of ``code``."""
    gen = code.generator.take_columns(order)
    labels = tuple(labels) if labels is not None else tuple(code.labels[j] for j in order)
    return LinearCode(gen, labels, dict(code.provenance))


def repetition_code(field: Field, n: int) -> LinearCode:
    return LinearCode(Matrix(field, np.ones((1, n), dtype=np.int64)), tuple(range(n)),
                      {"family": "repetition"})


def code_from_json(obj: dict) -> LinearCode:
    from .finite_field import field_from_json
    f = field_from_json(obj["field"])

    def lb(x):
        if isinstance(x, list) and x and isinstance(x[0], list):
            return tuple(ProjectivePoint(tuple(c), f) for c in x)
        if isinstance(x, list):
            return ProjectivePoint(tuple(x), f)
        return x

    return LinearCode(Matrix(f, obj["generator"], cols=obj["n"]),
                      tuple(lb(x) for x in obj["labels"]), obj.get("provenance", {}))
