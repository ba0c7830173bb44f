"""Parameter verification: exhaustive minimum distance, BCH designed distance,
permutation equivalence, automorphisms and maximal plane/surface sections.
"""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

import numpy as np

from . import codes as cd
from . import geometry as geo
from .codes import LinearCode
from .finite_field import Field
from .forms import Form
from .geometry import ProjectivePoint
from .linalg import Matrix, in_row_space, kernel, rank, row_basis, row_space_equal, rref_with_transform

DEFAULT_BUDGET = 2_000_000
_CHUNK = 1 << 15


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} scalar classes, budget is {budget}")
        self.required = required
        self.budget = budget


def thread_count() -> int:
    env = os.environ.get("QUADRICODE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def scalar_classes(q: int, k: int) -> int:
    return (q**k - 1) // (q - 1)


@dataclass
class ParamReport:
    n: int
    k: int
    d_exact: int | None = None
    d_lower: int | None = None
    d_upper: int | None = None
    method: list[str] = dc_field(default_factory=list)
    elapsed_ms: float | None = None
    witness: list[int] | None = None

    def __post_init__(self):
        if self.d_exact is not None:
            if self.d_lower is not None and self.d_lower > self.d_exact:
                raise ValueError("lower bound exceeds exact distance")
            if self.d_upper is not None and self.d_upper < self.d_exact:
                raise ValueError("upper bound below exact distance")

    def to_json(self, timings: bool = True) -> dict:
        return {
            "n": self.n, "k": self.k, "d_exact": self.d_exact,
            "d_lower": self.d_lower, "d_upper": self.d_upper,
            "method": list(self.method), "witness": self.witness,
            "elapsed_ms": self.elapsed_ms if timings else None,
        }


# -- exhaustive scan -------------------------------------------------------------

@dataclass
class ScanResult:
    min_weight: int
    witness: np.ndarray
    message: np.ndarray
    minimizers: list[np.ndarray]
    minimizer_messages: list[np.ndarray]
    classes: int


def _tables(f: Field) -> tuple[np.ndarray, np.ndarray]:
    if f._add_t is None:
        raise ValueError(f"exhaustive scans need a tabulated field, got {f!r}")
    return f._add_t.astype(np.uint8), f._mul_t.astype(np.uint8)


def _span(rows: np.ndarray, add_t: np.ndarray, mul_t: np.ndarray) -> np.ndarray:
    """All combinations of ``rows``; index digits in base q, first row most significant."""
    n = rows.shape[1]
    span = np.zeros((1, n), dtype=np.uint8)
    for row in rows[::-1]:
        multiples = mul_t[:, row]  # (q, n)
        span = add_t[multiples[:, None, :], span[None, :, :]].reshape(-1, n)
    return span


def _digits(idx: int, q: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        out.append(idx % q)
        idx //= q
    return out[::-1]


def scan_codewords(code: LinearCode, budget: int = DEFAULT_BUDGET, collect: bool = False,
                   threads: int | None = None) -> ScanResult:
    """Weights of one codeword per scalar class (leading message coordinate 1).

    Work is split deterministically into (leading row, chunk) tasks; the
    results are merged by a min-reduction that does not depend on scheduling.
    """
    f = code.field
    q = f.order
    basis = code.basis.data.astype(np.uint8)
    k, n = basis.shape
    if k == 0:
        raise ValueError("the zero code has no minimum distance")
    classes = scalar_classes(q, k)
    if classes > budget:
        raise BudgetExceeded(classes, budget)
    add_t, mul_t = _tables(f)
    spans = [None] * (k + 1)
    spans[k] = np.zeros((1, n), dtype=np.uint8)
    for i in range(k - 1, 0, -1):
        multiples = mul_t[:, basis[i]]
        spans[i] = add_t[multiples[:, None, :], spans[i + 1][None, :, :]].reshape(-1, n)
    tasks = [(i, lo, min(lo + _CHUNK, spans[i + 1].shape[0]))
             for i in range(k) for lo in range(0, spans[i + 1].shape[0], _CHUNK)]

    def run(task):
        i, lo, hi = task
        block = add_t[basis[i][None, :], spans[i + 1][lo:hi]]
        weights = np.count_nonzero(block, axis=1)
        w = int(weights.min())
        hits = np.nonzero(weights == w)[0] if collect else np.argmin(weights)[None]
        return w, [(i, lo + int(h), block[h]) for h in hits]

    workers = threads or thread_count()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]
    best = min(w for w, _ in results)
    found = [hit for w, hits in results if w == best for hit in hits]

    def message(i, idx):
        m = np.zeros(k, dtype=np.int64)
        m[i] = 1
        m[i + 1:] = _digits(idx, q, k - 1 - i)
        return m

    first = found[0]
    return ScanResult(best, first[2].astype(np.int64), message(first[0], first[1]),
                      [h[2].astype(np.int64) for h in found] if collect else [],
                      [message(h[0], h[1]) for h in found] if collect else [], classes)


def support_search(code: LinearCode, budget: int = DEFAULT_BUDGET) -> tuple[int, np.ndarray]:
    """Smallest support of a nonzero codeword, by increasing support size.

    A codeword of weight w is a kernel vector of w columns of the parity-check
    matrix, so d is the size of the smallest dependent column set.  Useful when
    d is small and the dimension is large.
    """
    f = code.field
    checks = kernel(code.generator)
    if checks.rows == 0:
        return 1, np.eye(1, code.n, dtype=np.int64)[0]
    h = checks.data
    tried = 0
    for w in range(1, code.n + 1):
        for support in itertools.combinations(range(code.n), w):
            tried += 1
            if tried > budget:
                raise BudgetExceeded(tried, budget)
            sub = Matrix(f, h[:, support], cols=w)
            if rank(sub) < w:
                vec = kernel(sub).data[0]
                c = np.zeros(code.n, dtype=np.int64)
                c[list(support)] = vec
                return w, c
    raise AssertionError("unreachable")  # pragma: no cover


def min_distance_exhaustive(code: LinearCode, budget: int = DEFAULT_BUDGET,
                            threads: int | None = None) -> ParamReport:
    """Exact minimum distance.

    Enumerates scalar classes of messages when they fit the budget, otherwise
    searches supports of increasing size (at most ``budget`` of them).
    """
    start = time.perf_counter()
    q = code.field.order
    if code.k == 0:
        raise ValueError("the zero code has no minimum distance")
    if scalar_classes(q, code.k) <= budget:
        res = scan_codewords(code, budget, threads=threads)
        d, witness, tag = res.min_weight, res.witness, "exhaustive"
    else:
        try:
            d, witness = support_search(code, budget)
        except BudgetExceeded:
            raise BudgetExceeded(scalar_classes(q, code.k), budget) from None
        tag = "exhaustive_support"
    ms = (time.perf_counter() - start) * 1e3
    return ParamReport(code.n, code.k, d_exact=d, d_upper=d, method=[tag],
                       elapsed_ms=round(ms, 3), witness=witness.tolist())


def weight(vec) -> int:
    return int(np.count_nonzero(np.asarray(vec)))


# -- BCH bound ---------------------------------------------------------------------

def longest_cyclic_gap(exponents: Sequence[int], n: int) -> int:
    present = np.zeros(n, dtype=bool)
    present[[e % n for e in exponents]] = True
    if present.all():
        return 0
    if not present.any():
        return n
    start = int(np.nonzero(present)[0][0])
    best = run = 0
    for step in range(1, n + 1):
        if present[(start + step) % n]:
            run = 0
        else:
            run += 1
            best = max(best, run)
    return best


def designed_distance(code: LinearCode) -> int:
    """1 + longest run of consecutive residues (mod n) outside the exponent set."""
    prov = code.provenance
    if "exponents" not in prov or "length" not in prov:
        raise ValueError("code carries no cyclic provenance")
    return longest_cyclic_gap(prov["exponents"], prov["length"]) + 1


def bch_zero_check(code: LinearCode, rng: np.random.Generator, samples: int = 8) -> bool:
    """Independent check of the root convention behind :func:`designed_distance`.

    For random codewords c of the cyclic code over GF(q^d), the polynomial
    sum_k c_k X^k must vanish at alpha^(-t) for every t outside the exponent
    set, and must not vanish identically at alpha^(-t) for t inside it.
    """
    f = code.field
    prov = code.provenance
    n, alpha, exps = prov["length"], prov["alpha"], set(prov["exponents"])
    gen = code.generator.data
    seen_nonzero = set()
    for _ in range(samples):
        msg = rng.integers(0, f.order, size=gen.shape[0])
        c = np.atleast_1d(f.sum(f.mul(msg[:, None], gen), axis=0))
        for t in range(n):
            beta = f.pow(alpha, -t)
            pts = np.asarray([f.pow(beta, k) for k in range(n)], dtype=np.int64)
            val = f.dot(c, pts)
            if t not in exps and val != 0:
                return False
            if val != 0:
                seen_nonzero.add(t)
    return seen_nonzero == exps


# -- equivalence and automorphisms ------------------------------------------------

@dataclass
class Equivalence:
    equal: bool
    witness: list[int] | None = None

    def __bool__(self) -> bool:
        return self.equal


def equivalence_via_map(cE: LinearCode, cB: LinearCode,
                        point_map: Mapping) -> Equivalence:
    """Row-space equality after moving column ``b`` of cB to the position of ``point_map[b]``."""
    if set(point_map) != set(cB.labels):
        raise ValueError("map domain differs from the labels of the second code")
    images = list(point_map.values())
    if len(set(images)) != len(images) or set(images) != set(cE.labels):
        raise ValueError("map is not a bijection onto the labels of the first code")
    inverse = {v: k for k, v in point_map.items()}
    order = [cB.position(inverse[lb]) for lb in cE.labels]
    moved = cB.generator.take_columns(order)
    if row_space_equal(cE.generator, moved):
        return Equivalence(True)
    for row in cE.basis.data:
        if not in_row_space(moved, row):
            return Equivalence(False, row.tolist())
    for row in row_basis(moved).data:
        if not in_row_space(cE.generator, row):
            return Equivalence(False, row.tolist())
    return Equivalence(False)  # pragma: no cover


def swap_images(point_map: Mapping, a, b) -> dict:
    out = dict(point_map)
    out[a], out[b] = point_map[b], point_map[a]
    return out


def permuted_generator(code: LinearCode, perm: Sequence[int], scale: Sequence[int] | None = None) -> Matrix:
    """Columns ``i -> scale[i] * column perm[i]`` (the codeword c -> c o perm)."""
    if len(perm) != code.n:
        raise ValueError("permutation length differs from code length")
    gen = code.generator.take_columns(perm)
    if scale is None:
        return gen
    f = code.field
    return Matrix(f, np.asarray(f.mul(gen.data, np.asarray(scale)[None, :])).reshape(gen.shape))


def automorphism_check(code: LinearCode, perm: Sequence[int], scale: Sequence[int] | None = None) -> bool:
    """True when c -> (scale_i * c_perm(i)) preserves the code."""
    if sorted(perm) != list(range(code.n)):
        raise ValueError("not a permutation")
    return row_space_equal(code.generator, permuted_generator(code, perm, scale))


def cyclic_shift(n: int) -> list[int]:
    return [(i + 1) % n for i in range(n)]


def sample_sl2(f: Field, rng: np.random.Generator) -> tuple[int, int, int, int]:
    """Random (a, b, c, d) with ad - bc = 1."""
    while True:
        a, b, c = (int(x) for x in rng.integers(0, f.order, size=3))
        if a:
            d = f.div(f.add(1, f.mul(b, c)), a)
            return a, b, c, d
        if b:
            c = f.neg(f.inv(b))
            d = int(rng.integers(0, f.order))
            return a, b, c, d


def mobius_action(g: tuple[int, int, int, int], points: Sequence[ProjectivePoint],
                  degree: int) -> tuple[list[int], list[int]]:
    """Permutation and scalars realising f -> f o g on evaluations at (x:1), (1:0).

    Returns ``perm, scale`` with (f o g)(rep P_i) = scale_i * f(rep P_perm(i)),
    ``degree`` being the common degree of the evaluated forms.
    """
    f = points[0].field
    a, b, c, d = g
    index = {p: i for i, p in enumerate(points)}
    perm, scale = [], []
    for p in points:
        x, y = geo.affine_representative(p)
        img = (f.add(f.mul(a, x), f.mul(b, y)), f.add(f.mul(c, x), f.mul(d, y)))
        target = geo.normalize(img, f)
        rx, ry = geo.affine_representative(target)
        lam = f.div(img[1], ry) if ry else f.div(img[0], rx)
        perm.append(index[target])
        scale.append(f.pow(lam, degree))
    return perm, scale


# -- sections and witnesses ------------------------------------------------------

@dataclass
class SectionResult:
    max_count: int
    n: int
    d_exact: int
    zero_sets: list[frozenset]
    forms: list[Form] | None


def max_section_points(code: LinearCode, budget: int = DEFAULT_BUDGET,
                       threads: int | None = None) -> SectionResult:
    """Largest number of zeros of a form not vanishing on the variety.

    One form per scalar class of forms modulo the ideal, i.e. per class of
    nonzero messages on the code's reduced basis.
    """
    res = scan_codewords(code, budget, collect=True, threads=threads)
    zero_sets = [frozenset(code.labels[j] for j in np.nonzero(c == 0)[0]) for c in res.minimizers]
    forms = None
    mons = code.provenance.get("monomials")
    if mons is not None:
        _, t, _ = rref_with_transform(code.generator)
        f = code.field
        tk = t.data[:code.k]
        forms = []
        for m in res.minimizer_messages:
            coeffs = np.atleast_1d(f.sum(f.mul(m[:, None], tk), axis=0))
            forms.append(Form.from_dict(f, len(mons[0]), sum(mons[0]),
                                        {tuple(e): int(c) for e, c in zip(mons, coeffs)}))
    return SectionResult(code.n - res.min_weight, code.n, res.min_weight, zero_sets, forms)


def ruling_decomposition(zero_set, preimage: Mapping, line: Sequence[ProjectivePoint]):
    """Return (A, B) with zero_set = {(a, b) : a in A or b in B}, or None."""
    pairs = {preimage[p] for p in zero_set}
    A = {a for a in line if all((a, b) in pairs for b in line)}
    B = {b for b in line if all((a, b) in pairs for a in line)}
    union = {(a, b) for a in line for b in line if a in A or b in B}
    return (A, B) if union == pairs else None


def curve_point_count(points: Sequence[ProjectivePoint], form: Form) -> int:
    """Rational points of the variety where ``form`` vanishes."""
    vals = form.evaluate_many(geo.points_array(points))
    return int(np.count_nonzero(vals == 0))


def lemma_uv_sets(s: int) -> tuple[set, set]:
    U = {(i + k, j + k) for i in range(s + 1) for j in range(s + 1) for k in range(s + 1)
         if i + j + k <= s}
    V = {(i, j) for i in range(s + 1) for j in range(s + 1)}
    return U, V


def lemma_uv_check(s: int) -> bool:
    U, V = lemma_uv_sets(s)
    return U == V and len(V) == (s + 1) ** 2


def pullback_exponents(q: int, d: int, s: int) -> set[int]:
    """Exponents i of x^i y^(m-i) in products of s pullbacks of Segre coordinates."""
    base = {sum(q**j for j in range(d) if (mask >> j) & 1) for mask in range(2**d)}
    acc = {0}
    for _ in range(s):
        acc = {a + b for a in acc for b in base}
    return acc


def pullback_exponents_d2(q: int, s: int) -> set[int]:
    """(b+d) + q(c+d) over a+b+c+d = s, from the monomials in y^(q+1), xy^q, x^q y, x^(q+1)."""
    return {(b + dd) + q * (c + dd) for a in range(s + 1) for b in range(s + 1 - a)
            for c in range(s + 1 - a - b) for dd in [s - a - b - c]}


@dataclass
class ProductWitness:
    codeword: np.ndarray
    weight: int
    factors: list[np.ndarray]


def product_witness(points: Sequence[ProjectivePoint], s: int,
                    budget: int = DEFAULT_BUDGET) -> ProductWitness | None:
    """Product of s minimum-weight degree-1 codewords with disjoint zero sets.

    The pointwise product of evaluations of s linear forms is the evaluation
    of their product, a form of degree s; when the zero sets are pairwise
    disjoint its weight is n - s * (n - d_1).
    """
    c1 = cd.evaluation_code(points, 1)
    res = scan_codewords(c1, budget, collect=True)
    masks = [int("".join("1" if x == 0 else "0" for x in c), 2) for c in res.minimizers]

    def search(start, acc, chosen):
        if len(chosen) == s:
            return chosen
        for i in range(start, len(masks)):
            if masks[i] & acc == 0:
                found = search(i + 1, acc | masks[i], chosen + [i])
                if found:
                    return found
        return None

    chosen = search(0, 0, [])
    if chosen is None:
        return None
    f = c1.field
    prod = np.ones(c1.n, dtype=np.int64)
    for i in chosen:
        prod = np.asarray(f.mul(prod, res.minimizers[i]))
    return ProductWitness(prod, weight(prod), [res.minimizers[i] for i in chosen])


def cyclic_column_order(punctured_ext: LinearCode, cyclic: LinearCode) -> list[int]:
    """Columns of ``punctured_ext`` matched to zeta = alpha^k of the cyclic code."""
    f = punctured_ext.labels[0].field
    return [punctured_ext.position(geo.normalize((z, 1), f)) for z in cyclic.labels]


def special_positions(code: LinearCode) -> list[int]:
    """Columns of (0:1) and (1:0) on P^1."""
    f = code.labels[0].field
    return [code.position(ProjectivePoint((0, 1), f)), code.position(ProjectivePoint((1, 0), f))]


def twisted_bounds(spec: geo.EmbeddingSpec, s: int, budget: int = DEFAULT_BUDGET) -> tuple[ParamReport, dict]:
    """Bracket d(C_E(s)) without enumerating the code.

    Lower bound: C_E(s) equals B0_ext(s) up to the point map psi_tw,
    puncturing B0_ext(s) at (0:1), (1:0) is injective and lands in B(s), so
    d >= BCH designed distance of B(s).  Upper bound: a product witness.
    Every link of the chain is checked; a broken link drops the bound.
    """
    start = time.perf_counter()
    big = spec.big
    cE = cd.twisted_code(spec, s)
    ext = cd.bch_B_ext(big, s)
    ext0 = cd.subfield_restriction(ext)
    cyc = cd.bch_B(big, s)
    checks = {}
    checks["equivalence"] = bool(equivalence_via_map(cE, ext0, spec.point_map()))
    punct = cd.puncture(ext, special_positions(ext))
    checks["puncture_is_B"] = row_space_equal(
        punct.generator.take_columns(cyclic_column_order(punct, cyc)), cyc.generator)
    punct0 = cd.puncture(ext0, special_positions(ext0))
    checks["puncture_injective"] = punct0.k == ext0.k
    checks["bch_zeros"] = bch_zero_check(cyc, np.random.default_rng(0), samples=4)
    method = []
    lower = None
    if all(checks.values()):
        lower = designed_distance(cyc)
        method.append("designed_distance")
    upper, witness = None, None
    pw = product_witness(spec.points(), s, budget)
    if pw is not None and in_row_space(cE.generator, pw.codeword):
        upper, witness = pw.weight, pw.codeword.tolist()
        method.append("product_witness")
    checks["witness_in_code"] = upper is not None
    ms = (time.perf_counter() - start) * 1e3
    return ParamReport(cE.n, cE.k, d_lower=lower, d_upper=upper, method=method,
                       elapsed_ms=round(ms, 3), witness=witness), checks


@dataclass
class GroupActionReport:
    samples: int
    literal: int
    monomial: int

    @property
    def discrepancy(self) -> bool:
        return self.literal < self.samples <= self.monomial


def psl2_invariance(code: LinearCode, big: Field, rng: np.random.Generator,
                    samples: int = 20) -> GroupActionReport:
    """Test invariance of a code on P^1(big) under random elements of SL(2, big).

    Each element is tried as a bare column permutation and as the monomial map
    carrying the scalars picked up by the representatives (x:1), (1:0).
    """
    degree = code.provenance["m"]
    f = code.field
    points = list(code.labels)
    literal = monomial = 0
    for _ in range(samples):
        g = sample_sl2(big, rng)
        perm, scale = mobius_action(g, points, degree)
        if f != big:
            scale = [big.restrict(x) for x in scale]
        literal += automorphism_check(code, perm)
        monomial += automorphism_check(code, perm, scale)
    return GroupActionReport(samples, literal, monomial)
