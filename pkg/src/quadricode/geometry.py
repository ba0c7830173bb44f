"""Projective points, quadric surfaces, Segre embeddings and their twists.

Points are normalised so that the first nonzero coordinate from the left is 1.
Point sets of a variety are always listed in the ambient enumeration order
(lexicographic on coordinate encodings), which fixes column order for codes.

Segre coordinates are indexed by bitmasks: for points ``(u_j : v_j)``,
``j = 0..d-1``, the coordinate at index ``sum(b_j * 2**j)`` is
``prod_j (v_j if b_j else u_j)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .finite_field import (Field, FieldError, dual_basis, extension_basis,
                           primitive_element, subfield_basis)
from .forms import Form
from .linalg import Matrix, inverse


class GeometryError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ProjectivePoint:
    coords: tuple[int, ...]
    field: Field = dc_field(compare=False, repr=False)

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __iter__(self):
        return iter(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __str__(self) -> str:
        return "(" + ":".join(str(c) for c in self.coords) + ")"


def normalize_array(field: Field, coords: np.ndarray) -> np.ndarray:
    """Scale each row so that its first nonzero entry is 1."""
    coords = np.atleast_2d(np.asarray(coords, dtype=np.int64))
    nonzero = coords != 0
    if not np.all(nonzero.any(axis=1)):
        raise GeometryError("the zero vector is not a projective point")
    lead = coords[np.arange(coords.shape[0]), nonzero.argmax(axis=1)]
    return np.asarray(field.mul(field.inv(lead)[:, None], coords)).reshape(coords.shape)


def normalize(coords: Sequence[int], field: Field) -> ProjectivePoint:
    row = normalize_array(field, np.asarray([list(coords)]))[0]
    return ProjectivePoint(tuple(int(c) for c in row), field)


def points_from_array(field: Field, arr: np.ndarray) -> list[ProjectivePoint]:
    arr = normalize_array(field, arr)
    pts = sorted({tuple(int(c) for c in row) for row in arr})
    return [ProjectivePoint(c, field) for c in pts]


def points_array(points: Sequence[ProjectivePoint]) -> np.ndarray:
    return np.asarray([p.coords for p in points], dtype=np.int64)


def enumerate_projective_points(field: Field, r: int) -> list[ProjectivePoint]:
    """All (q^(r+1)-1)/(q-1) points of P^r, lexicographically sorted."""
    if r < 1:
        raise GeometryError("r must be at least 1")
    q = field.order
    out = []
    for lead in range(r + 1):
        tail = r - lead
        for rest in itertools.product(range(q), repeat=tail):
            out.append(ProjectivePoint((0,) * lead + (1,) + rest, field))
    out.sort()
    return out


def projective_points_array(field: Field, r: int) -> np.ndarray:
    return points_array(enumerate_projective_points(field, r))


def evaluate_form(f: Form, point: ProjectivePoint) -> int:
    """Value of f at the normalised representative of ``point``."""
    if point.field != f.field or len(point) != f.nvars:
        raise GeometryError("form and point do not match")
    return f.evaluate(point.coords)


# -- quadrics ------------------------------------------------------------------

HYPERBOLIC, ELLIPTIC, OTHER = "hyperbolic", "elliptic", "other"


@dataclass(frozen=True)
class QuadricSpec:
    field: Field
    form: Form
    tag: str

    @property
    def q(self) -> int:
        return self.field.order


def _zeros(field: Field, form: Form) -> list[ProjectivePoint]:
    pts = enumerate_projective_points(field, form.nvars - 1)
    vals = form.evaluate_many(points_array(pts))
    return [p for p, v in zip(pts, vals) if v == 0]


def classify_quadric(form: Form) -> QuadricSpec:
    if form.nvars != 4 or form.degree != 2:
        raise GeometryError("a quadric surface is a degree-2 form in 4 variables")
    q = form.field.order
    count = len(_zeros(form.field, form))
    tag = HYPERBOLIC if count == (q + 1) ** 2 else ELLIPTIC if count == q * q + 1 else OTHER
    return QuadricSpec(form.field, form, tag)


def quadric_points(spec: QuadricSpec, require_smooth: bool = False) -> list[ProjectivePoint]:
    pts = _zeros(spec.field, spec.form)
    q = spec.q
    if require_smooth and len(pts) not in ((q + 1) ** 2, q * q + 1):
        raise GeometryError(f"{len(pts)} points: neither hyperbolic nor elliptic")
    return pts


def hyperbolic_quadric(field: Field) -> QuadricSpec:
    """x0*x3 - x1*x2."""
    m1 = field.neg(1)
    form = Form.from_dict(field, 4, 2, {(1, 0, 0, 1): 1, (0, 1, 1, 0): m1})
    return QuadricSpec(field, form, HYPERBOLIC)


@dataclass(frozen=True)
class BinaryQuadratic:
    """Q(x, y) = (x + w y)(x + w^q y) over GF(q), remembered with its w."""
    form: Form
    w: int
    big: Field

    def __call__(self, u, v):
        return self.form.evaluate_many(np.stack([np.atleast_1d(u), np.atleast_1d(v)], axis=1))


def irreducible_binary_quadratic(big: Field, w: int | None = None) -> BinaryQuadratic:
    """Monic quadratic form over GF(q) with no root on P^1(GF(q)).

    Built as ``x^2 + Tr(w) x y + N(w) y^2`` with w in GF(q^2) outside GF(q);
    ``w`` defaults to the least primitive element of ``big``.
    """
    small = big.subfield
    if small is None or big.degree != 2:
        raise FieldError("need GF(q^2) with designated subfield GF(q)")
    if w is None:
        w = primitive_element(big).value
    if big.in_subfield(w):
        raise FieldError("w must lie outside GF(q)")
    tr = big.restrict(big.trace(w))
    nm = big.restrict(big.norm(w))
    form = Form.from_dict(small, 2, 2, {(2, 0): 1, (1, 1): tr, (0, 2): nm})
    return BinaryQuadratic(form, int(w), big)


def elliptic_quadric(quad: BinaryQuadratic) -> QuadricSpec:
    """x0*x3 - Q(x1, x2)."""
    f = quad.form.field
    coeffs = {(1, 0, 0, 1): 1}
    for (a, b), c in quad.form.terms:
        coeffs[(0, a, b, 0)] = f.neg(c)
    return QuadricSpec(f, Form.from_dict(f, 4, 2, coeffs), ELLIPTIC)


def elliptic_param(quad: BinaryQuadratic, u: int = 0, v: int = 0,
                   infinity: bool = False) -> ProjectivePoint:
    """(1:u:v:Q(u,v)), or (0:0:0:1) when ``infinity`` is set."""
    f = quad.form.field
    if infinity:
        return ProjectivePoint((0, 0, 0, 1), f)
    return ProjectivePoint((1, int(u), int(v), int(quad(u, v)[0])), f)


def elliptic_points_param(quad: BinaryQuadratic) -> list[ProjectivePoint]:
    q = quad.form.field.order
    pts = [elliptic_param(quad, u, v) for u in range(q) for v in range(q)]
    pts.append(elliptic_param(quad, infinity=True))
    return sorted(pts)


def twist_matrix_d2(big: Field, w: int) -> Matrix:
    """The 4x4 twisting matrix with middle block [[1, w], [1, w^q]]."""
    if big.in_subfield(w):
        raise FieldError("w must lie outside the subfield")
    wq = big.sub_frobenius(w)
    return Matrix(big, [[1, 0, 0, 0], [0, 1, w, 0], [0, 1, wq, 0], [0, 0, 0, 1]])


def apply_projective(m: Matrix, point: ProjectivePoint) -> ProjectivePoint:
    return normalize(m.apply(point.coords), m.field)


def induced_permutation(m: Matrix, points: Sequence[ProjectivePoint]) -> list[int]:
    """perm[i] = index of m * points[i]; raises if the set is not preserved."""
    index = {p.coords: i for i, p in enumerate(points)}
    arr = points_array(points)
    images = normalize_array(m.field, np.asarray(m.field.dot(arr[:, None, :], m.data[None, :, :])))
    perm = []
    for row in images:
        key = tuple(int(c) for c in row)
        if key not in index:
            raise GeometryError(f"image {key} leaves the point set")
        perm.append(index[key])
    return perm


def cycle_type(perm: Sequence[int]) -> list[int]:
    seen = [False] * len(perm)
    lengths = []
    for i in range(len(perm)):
        if seen[i]:
            continue
        n, j = 0, i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            n += 1
        lengths.append(n)
    return sorted(lengths)


def cyclic_automorphism(big: Field, w: int) -> Matrix:
    """4x4 matrix over GF(q) acting on x0*x3 = Q(x1,x2) as multiplication by w.

    Fixes (1:0:0:0) and (0:0:0:1) and cycles the other q^2-1 points when w is
    primitive; a non-primitive w is rejected.
    """
    if big.multiplicative_order(w) != big.order - 1:
        raise GeometryError("w is not primitive: the induced map is not a single cycle")
    small = big.subfield
    n = big.restrict(big.norm(w))
    t = big.restrict(big.trace(w))
    return Matrix(small, [[1, 0, 0, 0], [0, 0, small.neg(n), 0], [0, 1, t, 0], [0, 0, 0, n]])


# -- projective line and Segre -------------------------------------------------

def projective_line(field: Field) -> list[ProjectivePoint]:
    return enumerate_projective_points(field, 1)


def affine_representative(point: ProjectivePoint) -> tuple[int, int]:
    """(x:1) for finite points and (1:0) for infinity."""
    f = point.field
    x, y = point.coords
    if y == 0:
        return (1, 0)
    return (int(f.div(x, y)), 1)


def segre_array(field: Field, factors: np.ndarray) -> np.ndarray:
    """Rows of Segre coordinates from an ``(n, d, 2)`` array of (u_j, v_j)."""
    factors = np.asarray(factors, dtype=np.int64)
    n, d, _ = factors.shape
    out = np.ones((n, 2**d), dtype=np.int64)
    for mask in range(2**d):
        for j in range(d):
            col = factors[:, j, (mask >> j) & 1]
            out[:, mask] = field.mul(out[:, mask], col)
    return out


def segre(points: Sequence[ProjectivePoint]) -> ProjectivePoint:
    if len(points) < 2:
        raise GeometryError("Segre needs at least two factors")
    f = points[0].field
    arr = np.asarray([[p.coords for p in points]])
    return normalize(segre_array(f, arr)[0], f)


def segre_variety(field: Field, d: int) -> tuple[list[ProjectivePoint], dict]:
    """Points of the Segre image of (P^1)^d in ambient order, with preimages."""
    line = projective_line(field)
    combos = list(itertools.product(line, repeat=d))
    arr = np.asarray([[p.coords for p in c] for c in combos])
    coords = normalize_array(field, segre_array(field, arr))
    pre = {}
    for c, row in zip(combos, coords):
        pre[ProjectivePoint(tuple(int(x) for x in row), field)] = c
    return sorted(pre), pre


def segre_relations_d3(point: ProjectivePoint) -> bool:
    """The nine quadrics cutting out the Segre image of (P^1)^3 in P^7.

    Written in the affine labels (t^3, t^2x, ...) mapped to bitmask
    coordinates: x, y, z are factors 0, 1, 2.
    """
    f = point.field
    c = point.coords
    t3, x, y, z = c[0], c[1], c[2], c[4]
    xy, yz, zx, xyz = c[3], c[6], c[5], c[7]
    rels = []
    for (a, b, cc, ab, bc, ca) in [(x, y, z, xy, yz, zx), (y, z, x, yz, zx, xy), (z, x, y, zx, xy, yz)]:
        rels.append((a, b, t3, ab))
        rels.append((a, bc, t3, xyz))
        rels.append((a, xyz, ab, ca))
    return all(f.mul(p1, p2) == f.mul(p3, p4) for p1, p2, p3, p4 in rels)


# -- twisted embeddings ----------------------------------------------------------

def _rot(mask: int, d: int) -> int:
    full = (1 << d) - 1
    return ((mask << 1) | (mask >> (d - 1))) & full


def frobenius_orbits(d: int) -> list[tuple[int, ...]]:
    """Orbits of bitmasks under cyclic rotation of the d factors."""
    seen, out = set(), []
    for s in range(2**d):
        if s in seen:
            continue
        orbit = [s]
        t = _rot(s, d)
        while t != s:
            orbit.append(t)
            t = _rot(t, d)
        seen.update(orbit)
        out.append(tuple(orbit))
    return out


@dataclass(frozen=True)
class EmbeddingSpec:
    """Twisted Segre embedding of P^1 over GF(q^d) into P^(2^d - 1) over GF(q).

    ``coordinate_forms[S]`` is the GF(q)-rational form giving coordinate S of
    the twisted map in the variables (x0, x1', ..., xd'); ``mu`` maps those
    coordinates to the Segre coordinates of the untwisted map.
    """
    small: Field
    big: Field
    d: int
    basis: tuple[int, ...]
    coordinate_forms: tuple[Form, ...]
    mu: Matrix
    mu_inv: Matrix
    orbits: tuple[tuple[int, ...], ...]
    variant: str

    @property
    def q(self) -> int:
        return self.small.order

    @property
    def r(self) -> int:
        return 2**self.d - 1

    def affine_points(self) -> np.ndarray:
        q, d = self.q, self.d
        grid = np.array(list(itertools.product(range(q), repeat=d)), dtype=np.int64).reshape(-1, d)
        return np.hstack([np.ones((grid.shape[0], 1), dtype=np.int64), grid])

    def phi_prime_array(self, affine: np.ndarray) -> np.ndarray:
        return np.stack([g.evaluate_many(affine) for g in self.coordinate_forms], axis=1)

    def points(self) -> list[ProjectivePoint]:
        """E(GF(q)): images of the affine chart plus (0:...:0:1)."""
        arr = self.phi_prime_array(self.affine_points())
        inf = np.zeros((1, 2**self.d), dtype=np.int64)
        inf[0, -1] = 1
        return points_from_array(self.small, np.vstack([arr, inf]))

    def psi(self, point: ProjectivePoint) -> np.ndarray:
        """Segre coordinates of ((x:y), (x^q:y^q), ...) over GF(q^d)."""
        big = self.big
        x, y = affine_representative(point)
        out = np.ones(2**self.d, dtype=np.int64)
        for mask in range(2**self.d):
            for j in range(self.d):
                base = x if (mask >> j) & 1 else y
                out[mask] = big.mul(int(out[mask]), big.sub_frobenius(base, j))
        return out

    def psi_tw(self, point: ProjectivePoint) -> ProjectivePoint:
        """mu^{-1} o psi, landing on a GF(q)-rational point of E."""
        v = normalize_array(self.big, self.mu_inv.apply(self.psi(point)))[0]
        small = np.atleast_1d(self.big.restrict(v))
        return ProjectivePoint(tuple(int(c) for c in small), self.small)

    def point_map(self) -> dict[ProjectivePoint, ProjectivePoint]:
        return {p: self.psi_tw(p) for p in projective_line(self.big)}

    def norm_form(self) -> Form:
        return self.coordinate_forms[-1]


def _linear_forms(big: Field, basis: Sequence[int], d: int) -> list[Form]:
    return [Form.linear(big, [0] + [int(big.sub_frobenius(a, j)) for a in basis]) for j in range(d)]


def segre_monomials(big: Field, basis: Sequence[int], d: int) -> list[Form]:
    """phi o lambda: M_S = x0^(d-|S|) * prod_{j in S} sigma^j(L)."""
    lin = _linear_forms(big, basis, d)
    x0 = Form.variable(big, d + 1, 0)
    out = []
    for mask in range(2**d):
        m = Form.monomial(big, [0] * (d + 1))
        for j in range(d):
            m = m * (lin[j] if (mask >> j) & 1 else x0)
        out.append(m)
    return out


def build_twisted_embedding(big: Field, d: int | None = None, basis: Sequence[int] | None = None,
                            variant: str = "orbit", verify: bool = True) -> EmbeddingSpec:
    """Factor phi o lambda = mu o phi' with phi' over GF(q) and mu over GF(q^d).

    Coordinates of phi' are built per Frobenius orbit of Segre coordinates:
    for an orbit T_0..T_{l-1} and a GF(q)-basis g_i of GF(q^l), the rational
    coordinates are ``G_i = sum_k g_i^(q^k) M_{T_k}``; the singleton orbit
    uses the trace-dual of ``basis`` so that it reproduces (x1', ..., xd').
    ``variant="derivative"`` replaces the orbit of (d-1)-subsets by
    ``x0 * dR/dx_i'`` for R the norm form.
    """
    small = big.subfield
    if small is None:
        raise FieldError("need a designated subfield")
    if d is None:
        d = big.degree
    if d != big.degree or d < 2:
        raise GeometryError("d must equal the extension degree and be at least 2")
    if basis is None:
        basis = extension_basis(big, small)
    basis = tuple(int(b) for b in basis)
    big.coordinates(basis)  # raises unless a basis
    if variant not in ("orbit", "derivative"):
        raise GeometryError(f"unknown variant {variant!r}")
    full = 2**d - 1
    mons = segre_monomials(big, basis, d)
    dual = dual_basis(big, basis)
    forms: list[Form | None] = [None] * 2**d
    mu = np.zeros((2**d, 2**d), dtype=np.int64)
    orbits = frobenius_orbits(d)
    comp_orbit = next(o for o in orbits if (full ^ 1) in o)
    for orbit in orbits:
        ell = len(orbit)
        if variant == "derivative" and orbit == comp_orbit and ell == d:
            orbit = tuple(full ^ (1 << k) for k in range(d))
            norm = mons[full]
            x0 = Form.variable(big, d + 1, 0)
            gens = [x0 * norm.derivative(i + 1) for i in range(d)]
            coeff = [[int(big.sub_frobenius(basis[i], k)) for k in range(d)] for i in range(d)]
        else:
            gamma = dual if ell == d else subfield_basis(big, ell)
            coeff = [[int(big.sub_frobenius(g, k)) for k in range(ell)] for g in gamma]
            gens = []
            for row in coeff:
                g = Form.zero(big, d + 1, d)
                for k, c in enumerate(row):
                    g = g + mons[orbit[k]].scale(c)
                gens.append(g)
        for i, row in enumerate(coeff):
            combo = Form.zero(big, d + 1, d)
            for k, c in enumerate(row):
                combo = combo + mons[orbit[k]].scale(c)
            if combo != gens[i]:
                raise GeometryError("orbit coordinate does not expand over the Segre monomials")
        cinv = inverse(Matrix(big, coeff)).data
        for i, g in enumerate(gens):
            try:
                forms[orbit[i]] = g.map_coefficients(lambda c: int(big.restrict(c)), small)
            except FieldError as exc:
                raise GeometryError("orbit coordinate is not defined over GF(q)") from exc
            for k in range(ell):
                mu[orbit[k], orbit[i]] = cinv[k, i]
    mu_m = Matrix(big, mu)
    spec = EmbeddingSpec(small, big, d, basis, tuple(forms), mu_m, inverse(mu_m),
                         tuple(orbits), variant)
    if verify and small.order**d <= 4096:
        _verify_factorisation(spec, mons)
    return spec


def _verify_factorisation(spec: EmbeddingSpec, mons: Sequence[Form]) -> None:
    big = spec.big
    affine = spec.affine_points()
    lifted = np.asarray(big.embed(affine))
    lhs = np.stack([m.evaluate_many(lifted) for m in mons], axis=1)
    rational = np.asarray(big.embed(spec.phi_prime_array(affine)))
    rhs = np.asarray(big.dot(rational[:, None, :], spec.mu.data[None, :, :]))
    if not np.array_equal(lhs, rhs):
        raise GeometryError("mu o phi' differs from phi o lambda at a rational point")
    if len(spec.points()) != spec.q**spec.d + 1:
        raise GeometryError("twisted embedding is not injective on rational points")


def norm_form_is_anisotropic(spec: EmbeddingSpec) -> bool:
    """True when the norm form has no nonzero GF(q)-rational zero.

    Any reducible form of degree >= 2 in >= 2 variables over GF(q) would
    have a linear factor or a factor with a nonzero zero, so this certifies
    irreducibility of the top coordinate.
    """
    affine = spec.affine_points()[1:]
    r = spec.norm_form()
    vals = r.evaluate_many(np.hstack([np.zeros((affine.shape[0], 1), dtype=np.int64), affine[:, 1:]]))
    return bool(np.all(vals != 0))
