"""Acceptance criteria, one recorded PASS/FAIL line each (see the terminal summary)."""

from __future__ import annotations

import itertools
import time

import numpy as np
import pytest

from quadricode import analysis as an
from quadricode import codes as cd
from quadricode import geometry as geo
from quadricode.finite_field import make_field, prime_power, primitive_elements, tower
from quadricode.forms import parse_form
from quadricode.linalg import in_row_space, row_space_equal

from conftest import tower_variants

HYPERBOLIC = [(3, 1), (3, 2), (4, 1), (4, 2), (4, 3), (5, 1), (5, 2)]
ELLIPTIC = [(3, 1), (4, 1), (4, 2), (5, 1), (5, 2), (7, 1)]
CYCLIC = [(3, 1), (4, 1), (4, 2)]


def _field(q):
    return make_field(*prime_power(q))


def _elliptic(q, s, big=None, w=None):
    if big is None:
        _, big = tower(q, 2)
    return cd.elliptic_code(big, s, w)


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def test_01_hyperbolic_parameters(criterion):
    found = []
    with Clock() as clk:
        for q, s in HYPERBOLIC:
            rep = an.min_distance_exhaustive(cd.hyperbolic_code(_field(q), s))
            found.append(((q, s), (rep.n, rep.k, rep.d_exact), ((q + 1) ** 2, (s + 1) ** 2, (q - s + 1) ** 2)))
    ok = all(got == want for _, got, want in found) and clk.seconds < 10
    criterion("1. hyperbolic parameters", ok, f"{len(found)} instances, {clk.seconds:.2f}s")
    assert all(got == want for _, got, want in found), found
    assert clk.seconds < 10


def test_02_bidegree_parameters(criterion):
    bad = []
    count = 0
    with Clock() as clk:
        for q in (3, 4):
            f = _field(q)
            for a, b in itertools.product(range(q), repeat=2):
                if (a + 1) * (b + 1) > 9:
                    continue
                count += 1
                rep = an.min_distance_exhaustive(cd.bidegree_code(f, a, b))
                want = ((q + 1) ** 2, (a + 1) * (b + 1), (q - a + 1) * (q - b + 1))
                if (rep.n, rep.k, rep.d_exact) != want:
                    bad.append((q, a, b, rep.d_exact))
    criterion("2. bidegree codes", not bad and clk.seconds < 30, f"{count} instances, {clk.seconds:.2f}s")
    assert not bad and clk.seconds < 30


def test_03_elliptic_parameters(criterion):
    found = []
    with Clock() as clk:
        for q, s in ELLIPTIC:
            rep = an.min_distance_exhaustive(_elliptic(q, s))
            found.append(((rep.n, rep.k, rep.d_exact), (q * q + 1, (s + 1) ** 2, q * q + 1 - s * (q + 1))))
    ok = all(g == w for g, w in found)
    criterion("3. elliptic parameters", ok and clk.seconds < 60, f"{len(found)} instances, {clk.seconds:.2f}s")
    assert ok, found
    assert clk.seconds < 60


def _first_breaking_swap(cE, cB, pmap):
    labels = list(cB.labels)
    for a, b in itertools.combinations(labels, 2):
        res = an.equivalence_via_map(cE, cB, an.swap_images(pmap, a, b))
        if not res:
            return res
    return None


def test_04_equivalence(criterion):
    results = []
    with Clock() as clk:
        for q, s in ELLIPTIC:
            _, big = tower(q, 2)
            quad = geo.irreducible_binary_quadratic(big)
            spec = geo.build_twisted_embedding(big, basis=(1, quad.w))
            cE, cB = cd.elliptic_code(big, s, quad.w), cd.bch_B0_ext(big, s)
            pmap = spec.point_map()
            broken = _first_breaking_swap(cE, cB, pmap)
            results.append(bool(an.equivalence_via_map(cE, cB, pmap)) and broken is not None
                           and broken.witness is not None)
    ok = all(results)
    criterion("4. equivalence via psi_tw", ok and clk.seconds < 5, f"{sum(results)}/{len(results)}, {clk.seconds:.2f}s")
    assert ok and clk.seconds < 5


def test_05_bch_structure(criterion):
    rows = []
    with Clock() as clk:
        for q, s in CYCLIC:
            _, big = tower(q, 2)
            b0 = cd.bch_B0(big, s)
            rep = an.min_distance_exhaustive(b0)
            dd = an.designed_distance(b0)
            rows.append(dict(
                params=(rep.n, rep.k, rep.d_exact) == (q * q - 1, (s + 1) ** 2, q * q - 1 - s * (q + 1)),
                shift=an.automorphism_check(b0, an.cyclic_shift(b0.n)),
                roots=an.bch_zero_check(cd.bch_B(big, s), np.random.default_rng(q * 10 + s)),
                equal=dd == rep.d_exact,
            ))
    ok = all(all(r.values()) for r in rows)
    criterion("5. BCH structure", ok and clk.seconds < 10, f"designed = exact in {sum(r['equal'] for r in rows)}/3, {clk.seconds:.2f}s")
    assert ok, rows
    assert clk.seconds < 10


def test_06_cyclic_automorphism(criterion):
    ok = True
    with Clock() as clk:
        for q in (3, 4, 5):
            _, big = tower(q, 2)
            quad = geo.irreducible_binary_quadratic(big)
            pts = geo.quadric_points(geo.elliptic_quadric(quad))
            perm = geo.induced_permutation(geo.cyclic_automorphism(big, quad.w), pts)
            fixed = sorted(pts[i].coords for i in range(len(pts)) if perm[i] == i)
            ok &= fixed == [(0, 0, 0, 1), (1, 0, 0, 0)] and geo.cycle_type(perm) == [1, 1, q * q - 1]
    criterion("6. cyclic automorphism", ok and clk.seconds < 1, f"{clk.seconds:.2f}s")
    assert ok and clk.seconds < 1


def test_07_segre_and_twisted(criterion):
    with Clock() as clk:
        f3 = _field(3)
        ch = an.min_distance_exhaustive(cd.segre_code(f3, 3, 1))
        _, big27 = tower(3, 3)
        spec27 = geo.build_twisted_embedding(big27)
        ce27 = cd.twisted_code(spec27, 1)
        ce3 = an.min_distance_exhaustive(ce27)
        _, big64 = tower(4, 3)
        ce4 = an.min_distance_exhaustive(cd.twisted_code(geo.build_twisted_embedding(big64), 1))
        equiv = an.equivalence_via_map(ce27, cd.bch_B0_ext(big27, 1), spec27.point_map())
    checks = {
        "C_H(3,3,1)": (ch.n, ch.k, ch.d_exact) == (64, 8, 27),
        "C_E(3,3,1)": (ce3.n, ce3.k, ce3.d_exact) == (28, 8, 15),
        "C_E(4,3,1)": (ce4.n, ce4.k, ce4.d_exact) == (65, 8, 44),
        "equivalence": bool(equiv),
    }
    ok = all(checks.values()) and clk.seconds < 60
    criterion("7. Segre d >= 3", ok, f"{sum(checks.values())}/4 sub-checks, {clk.seconds:.2f}s")
    assert ok, checks


@pytest.mark.xfail(strict=True, reason="stated d=1 contradicts (q-s+1)^d = 16; exhaustive search finds 16")
def test_07_segre_q2_d4_as_stated(criterion):
    rep = an.min_distance_exhaustive(cd.segre_code(_field(2), 4, 1))
    ok = (rep.n, rep.k, rep.d_exact) == (81, 16, 1)
    criterion("7. Segre d >= 3", ok, f"C_H(2,4,1) stated [81,16,1], exhaustive [{rep.n},{rep.k},{rep.d_exact}]")
    assert ok


def test_07_segre_q2_d4_formula():
    rep = an.min_distance_exhaustive(cd.segre_code(_field(2), 4, 1))
    assert (rep.n, rep.k, rep.d_exact) == (81, 16, (2 - 1 + 1) ** 4)


def test_08_out_of_budget_bounds(criterion):
    with Clock() as clk:
        _, big = tower(4, 3)
        spec = geo.build_twisted_embedding(big)
        rep, checks = an.twisted_bounds(spec, 2)
        code = cd.twisted_code(spec, 2)
        over_budget = an.scalar_classes(4, code.k) > an.DEFAULT_BUDGET
        witness_ok = in_row_space(code.generator, rep.witness) and an.weight(rep.witness) == rep.d_upper
    target = 65 - 2 * 21
    ok = (rep.k == 27 and rep.d_exact is None and over_budget and all(checks.values()) and witness_ok
          and rep.d_lower <= target <= rep.d_upper and clk.seconds < 30)
    criterion("8. honest bounds", ok, f"{rep.d_lower} <= {target} <= {rep.d_upper}, {clk.seconds:.2f}s")
    assert ok


def test_09_corollaries(criterion):
    outcome = []
    with Clock() as clk:
        f3 = _field(3)
        _, pre = geo.segre_variety(f3, 2)
        line = geo.projective_line(f3)
        for s in (1, 2):
            code = cd.hyperbolic_code(f3, s)
            res = an.max_section_points(code)
            fibers = all(
                (dec := an.ruling_decomposition(z, pre, line)) is not None and len(dec[0]) == len(dec[1]) == s
                for z in res.zero_sets)
            outcome.append(res.max_count == 2 * s * 4 - s * s == code.n - res.d_exact and fibers)
        for q, s in [(3, 1), (4, 1), (4, 2)]:
            code = _elliptic(q, s)
            res = an.max_section_points(code)
            outcome.append(res.max_count == s * (q + 1) == code.n - res.d_exact)
    ok = all(outcome) and clk.seconds < 60
    criterion("9. corollaries", ok, f"{sum(outcome)}/5 instances, {clk.seconds:.2f}s")
    assert ok


def test_10_worked_example(criterion):
    with Clock() as clk:
        f5 = make_field(5)
        spec = geo.classify_quadric(parse_form("3y^2 + 3yz + z^2 + 4xt", f5))
        pts = geo.quadric_points(spec)
        cubic = parse_form("3x^3 + 2x^2y + 2xy^2 + 3x^2z + 4xyz + 3y^2z + 2x^2t + 2xyt + 4xzt"
                           " + 4yzt + xt^2 + 3yt^2 + 2zt^2", f5)
        count = an.curve_point_count(pts, cubic)
    ok = spec.tag == geo.ELLIPTIC and len(pts) == 26 and count == 18 == 3 * (5 + 1) and clk.seconds < 1
    criterion("10. q=5 example", ok, f"{len(pts)} quadric points, {count} curve points")
    assert ok


def test_11_lemma_uv(criterion):
    with Clock() as clk:
        ok = all(an.lemma_uv_check(s) for s in range(11))
    criterion("11. lemma UV", ok and clk.seconds < 1, "0 <= s <= 10")
    assert ok and clk.seconds < 1


def _choices(q):
    """(big field, w) for two moduli and two primitive elements."""
    for _, big in tower_variants(q, 2):
        prims = primitive_elements(big)
        for w in (prims[0].value, prims[-1].value):
            yield big, w


def test_12_property_suite_under_choices(criterion):
    failures = []
    with Clock() as clk:
        for q in (3, 4, 5):
            f = _field(q)
            for s in range(q):
                rs = cd.extended_rs(f, s)
                t = cd.segre_relabel(cd.tensor_code(rs, rs))
                h = cd.hyperbolic_code(f, s)
                if t.labels != h.labels or not row_space_equal(t.generator, h.generator):
                    failures.append(("tensor", q, s))
            for big, w in _choices(q):
                quad = geo.irreducible_binary_quadratic(big, w)
                spec = geo.build_twisted_embedding(big, basis=(1, w))
                pts = geo.quadric_points(geo.elliptic_quadric(quad))
                perm = geo.induced_permutation(geo.cyclic_automorphism(big, w), pts)
                if geo.cycle_type(perm) != [1, 1, q * q - 1]:
                    failures.append(("cycle", q, w))
                for s in range(q - 1):
                    cE = cd.elliptic_code(big, s, w)
                    if cE.k != (s + 1) ** 2:
                        failures.append(("dim", q, w, s))
                    if not an.equivalence_via_map(cE, cd.bch_B0_ext(big, s), spec.point_map()):
                        failures.append(("equiv", q, w, s))
                    if q <= 4 or s <= 1:
                        d = an.min_distance_exhaustive(cE).d_exact
                        if d != q * q + 1 - s * (q + 1):
                            failures.append(("d", q, w, s, d))
                for s in range(1, q - 1):
                    b0 = cd.bch_B0(big, s)
                    if an.designed_distance(b0) > an.min_distance_exhaustive(b0).d_exact:
                        failures.append(("bch", q, w, s))
        for q, d in [(3, 3), (4, 3), (2, 4)]:
            for _, big in tower_variants(q, d):
                spec = geo.build_twisted_embedding(big)
                if set(spec.point_map().values()) != set(spec.points()):
                    failures.append(("psi", q, d))
                if q > 2 and not an.equivalence_via_map(cd.twisted_code(spec, 1), cd.bch_B0_ext(big, 1),
                                                        spec.point_map()):
                    failures.append(("equiv_d", q, d))
    ok = not failures and clk.seconds < 300
    criterion("12. choice independence", ok, f"{len(failures)} failures, {clk.seconds:.2f}s")
    assert ok, failures
