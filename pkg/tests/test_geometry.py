from __future__ import annotations

import itertools

import numpy as np
import pytest

from quadricode import geometry as geo
from quadricode.finite_field import make_field, prime_power, primitive_elements, tower
from quadricode.forms import Form, parse_form
from quadricode.geometry import GeometryError, ProjectivePoint

from conftest import tower_variants


def _field(q):
    return make_field(*prime_power(q))


def brute_points(f, r):
    """Every nonzero vector, normalised, deduplicated."""
    seen = set()
    for v in itertools.product(range(f.order), repeat=r + 1):
        if any(v):
            seen.add(geo.normalize(v, f).coords)
    return sorted(seen)


def test_normalize_examples():
    f = make_field(3)
    assert geo.normalize((0, 2, 1), f).coords == (0, 1, 2)
    assert geo.normalize((1, 2, 1), f).coords == (1, 2, 1)
    with pytest.raises(GeometryError):
        geo.normalize((0, 0, 0), f)


@pytest.mark.parametrize("q,r", [(2, 1), (3, 3), (4, 2), (9, 1), (5, 2)])
def test_projective_points(q, r):
    f = _field(q)
    pts = geo.enumerate_projective_points(f, r)
    assert len(pts) == (q ** (r + 1) - 1) // (q - 1)
    assert [p.coords for p in pts] == brute_points(f, r)
    assert all(geo.normalize(p.coords, f) == p for p in pts)
    assert pts == sorted(pts)


def test_line_over_gf9_has_ten_points():
    assert len(geo.projective_line(make_field(3, 2))) == 10


def test_evaluate_form_examples():
    f = make_field(3)
    pts = geo.enumerate_projective_points(f, 3)
    zero = Form.zero(f, 4, 2)
    assert all(geo.evaluate_form(zero, p) == 0 for p in pts)
    x0 = Form.variable(f, 4, 0)
    assert geo.evaluate_form(x0, ProjectivePoint((1, 2, 0, 1), f)) == 1
    hyp = parse_form("x0*x3 - x1*x2", f)
    assert sum(geo.evaluate_form(hyp, p) == 0 for p in pts) == 16


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
def test_quadric_point_counts(q):
    small, big = tower(q, 2)
    hyp = geo.quadric_points(geo.hyperbolic_quadric(small))
    ell = geo.quadric_points(geo.elliptic_quadric(geo.irreducible_binary_quadratic(big)))
    assert len(hyp) == (q + 1) ** 2 and len(ell) == q * q + 1


def test_example_quadric_over_gf5():
    f = make_field(5)
    spec = geo.classify_quadric(parse_form("3y^2 + 3yz + z^2 + 4xt", f))
    assert spec.tag == geo.ELLIPTIC
    assert len(geo.quadric_points(spec)) == 26


@pytest.mark.parametrize("q", [3, 4, 5])
def test_classified_smooth_quadrics_have_standard_counts(q):
    f = _field(q)
    rng = np.random.default_rng(q)
    for _ in range(25):
        coeffs = {m: int(rng.integers(0, q)) for m in [(2, 0, 0, 0), (1, 0, 0, 1), (0, 1, 1, 0),
                                                       (0, 2, 0, 0), (0, 0, 2, 0), (0, 1, 0, 1)]}
        coeffs[(1, 0, 0, 1)] = 1
        spec = geo.classify_quadric(Form.from_dict(f, 4, 2, coeffs))
        if spec.tag != geo.OTHER:
            n = len(geo.quadric_points(spec))
            assert n == {geo.HYPERBOLIC: (q + 1) ** 2, geo.ELLIPTIC: q * q + 1}[spec.tag]


def test_irreducible_binary_quadratic_examples():
    small, big = tower(3, 2)
    quad = geo.irreducible_binary_quadratic(big)
    line = geo.projective_line(small)
    assert all(quad.form.evaluate(p.coords) != 0 for p in line)
    _, big4 = tower(4, 2)
    assert geo.irreducible_binary_quadratic(big4).form.evaluate((1, 0)) == 1
    # over GF(25) the form splits as (x - w y)(x - w^5 y)
    small5, big5 = tower(5, 2)
    quad5 = geo.irreducible_binary_quadratic(big5)
    lifted = quad5.form.map_coefficients(lambda c: int(big5.embed(c)), big5)
    roots = [t for t in range(25) if lifted.evaluate((t, 1)) == 0]
    assert len(roots) == 2
    assert big5.pow(roots[0], 5) == roots[1]


def test_segre_examples():
    f = make_field(3)
    one_zero = ProjectivePoint((1, 0), f)
    assert geo.segre([one_zero, one_zero]).coords == (1, 0, 0, 0)
    for pts in itertools.product(geo.projective_line(f), repeat=2):
        x = geo.segre(list(pts)).coords
        assert f.mul(x[0], x[3]) == f.mul(x[1], x[2])


@pytest.mark.parametrize("q,d", [(2, 2), (3, 2), (2, 3), (3, 3), (4, 3), (2, 4)])
def test_segre_variety(q, d):
    f = _field(q)
    pts, pre = geo.segre_variety(f, d)
    assert len(pts) == len(set(pts)) == (q + 1) ** d
    assert set(pre) == set(pts)
    if d == 3:
        assert all(geo.segre_relations_d3(p) for p in pts)
    if d == 2:
        hyp = geo.quadric_points(geo.hyperbolic_quadric(f))
        assert pts == hyp


def test_segre_relations_detect_non_segre_point():
    f = make_field(3)
    assert not geo.segre_relations_d3(ProjectivePoint((1, 1, 0, 0, 0, 0, 0, 1), f))


@pytest.mark.parametrize("small,big", tower_variants(3, 2))
def test_elliptic_param(small, big):
    quad = geo.irreducible_binary_quadratic(big)
    assert geo.elliptic_param(quad).coords == (1, 0, 0, 0)
    assert geo.elliptic_param(quad, infinity=True).coords == (0, 0, 0, 1)
    param = geo.elliptic_points_param(quad)
    assert param == geo.quadric_points(geo.elliptic_quadric(quad))
    assert len(param) == 10


@pytest.mark.parametrize("q", [3, 4, 5])
def test_twist_matrix(q):
    small, big = tower(q, 2)
    w = primitive_elements(big)[0].value
    a = geo.twist_matrix_d2(big, w)
    e1 = ProjectivePoint(tuple(int(big.embed(c)) for c in (1, 0, 0, 0)), big)
    e4 = ProjectivePoint(tuple(int(big.embed(c)) for c in (0, 0, 0, 1)), big)
    assert geo.apply_projective(a, e1) == e1 and geo.apply_projective(a, e4) == e4
    spec = geo.build_twisted_embedding(big, basis=(1, w))
    # a carries the twisted points onto the Segre points of the graph of Frobenius
    images = {geo.apply_projective(a, ProjectivePoint(tuple(int(big.embed(c)) for c in p.coords), big))
              for p in spec.points()}
    segre_frob = {geo.normalize(spec.psi(p), big) for p in geo.projective_line(big)}
    assert images == segre_frob


@pytest.mark.parametrize("q,d", [(3, 2), (4, 2), (5, 2), (2, 3), (3, 3), (4, 3), (2, 4)])
def test_twisted_embedding_bijective(q, d):
    for small, big in tower_variants(q, d):
        spec = geo.build_twisted_embedding(big)
        pts = spec.points()
        assert len(pts) == q**d + 1
        pmap = spec.point_map()
        assert len(set(pmap.values())) == q**d + 1 and set(pmap.values()) == set(pts)
        assert pmap[ProjectivePoint((1, 0), big)].coords == (0,) * (2**d - 1) + (1,)
        assert geo.norm_form_is_anisotropic(spec)


def test_twisted_embedding_d2_is_the_elliptic_quadric():
    small, big = tower(3, 2)
    for w in (primitive_elements(big)[0].value, primitive_elements(big)[-1].value):
        quad = geo.irreducible_binary_quadratic(big, w)
        spec = geo.build_twisted_embedding(big, basis=(1, w))
        forms = spec.coordinate_forms
        assert forms[0].to_text() == "x0^2"
        q3 = Form.from_dict(small, 3, 2, {(0, a, b): c for (a, b), c in quad.form.terms})
        assert forms[-1] == q3
        assert spec.points() == geo.quadric_points(geo.elliptic_quadric(quad))


def test_twisted_embedding_d3_shape():
    small, big = tower(2, 3)
    spec = geo.build_twisted_embedding(big)
    degrees = [f.degree for f in spec.coordinate_forms]
    assert degrees == [3] * 8
    lead = [f.terms for f in spec.coordinate_forms]
    assert lead[0] == (((3, 0, 0, 0), 1),)
    # coordinates 1, 2, 4 are x0^2 times the linear forms u, v, w
    assert sorted(spec.coordinate_forms[m].to_text() for m in (1, 2, 4)) == ["x0^2*x1", "x0^2*x2", "x0^2*x3"]
    assert len(spec.points()) == 9


def test_derivative_variant_agrees_on_points():
    small, big = tower(3, 3)
    a = geo.build_twisted_embedding(big)
    b = geo.build_twisted_embedding(big, variant="derivative")
    assert len(b.points()) == 28
    assert b.coordinate_forms[0] == a.coordinate_forms[0]


@pytest.mark.parametrize("q", [3, 4, 5])
def test_cyclic_automorphism(q):
    small, big = tower(q, 2)
    quad = geo.irreducible_binary_quadratic(big)
    pts = geo.quadric_points(geo.elliptic_quadric(quad))
    perm = geo.induced_permutation(geo.cyclic_automorphism(big, quad.w), pts)
    assert geo.cycle_type(perm) == [1, 1, q * q - 1]
    fixed = sorted(pts[i].coords for i in range(len(pts)) if perm[i] == i)
    assert fixed == [(0, 0, 0, 1), (1, 0, 0, 0)]


def test_cyclic_automorphism_rejects_non_primitive():
    small, big = tower(3, 2)
    non_primitive = next(x for x in range(9) if not big.in_subfield(x) and big.multiplicative_order(x) != 8)
    with pytest.raises(GeometryError):
        geo.cyclic_automorphism(big, non_primitive)


def test_affine_representative():
    f = make_field(5)
    assert geo.affine_representative(ProjectivePoint((1, 0), f)) == (1, 0)
    assert geo.affine_representative(ProjectivePoint((1, 3), f)) == (2, 1)
