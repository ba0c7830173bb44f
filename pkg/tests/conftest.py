from __future__ import annotations

import itertools

import numpy as np
import pytest

from quadricode.finite_field import irreducible_polynomials, prime_power, tower


def second_modulus(p: int, degree: int) -> tuple[int, ...]:
    """Second irreducible in canonical order: an alternative to the default."""
    return next(itertools.islice(irreducible_polynomials(p, degree), 1, None))


def tower_variants(q: int, d: int):
    """Default tower and one with a different modulus for the big field."""
    p, e = prime_power(q)
    return [tower(q, d), tower(q, d, big_modulus=second_modulus(p, e * d))]


def poly_mulmod(a: list[int], b: list[int], modulus: list[int], p: int) -> list[int]:
    """Schoolbook product of coefficient lists (constant first) reduced mod a monic modulus."""
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    deg = len(modulus) - 1
    for top in range(len(out) - 1, deg - 1, -1):
        c = out[top]
        if c:
            for k in range(deg + 1):
                out[top - deg + k] = (out[top - deg + k] - c * modulus[k]) % p
    return (out + [0] * deg)[:deg]


def brute_min_distance(gen: np.ndarray, field) -> int:
    """Minimum weight over every nonzero message, no scalar-class reduction."""
    gen = np.asarray(gen)
    best = gen.shape[1] + 1
    for msg in itertools.product(range(field.order), repeat=gen.shape[0]):
        if not any(msg):
            continue
        word = np.zeros(gen.shape[1], dtype=np.int64)
        for m, row in zip(msg, gen):
            word = np.asarray(field.add(word, field.mul(m, row)))
        w = int(np.count_nonzero(word))
        if w:
            best = min(best, w)
    return best


@pytest.fixture(scope="session")
def gf9():
    return tower(3, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA: dict[str, list[tuple[bool, str]]] = {}


@pytest.fixture
def criterion():
    """Record one outcome line per acceptance criterion."""
    def record(label: str, ok: bool, detail: str = "") -> bool:
        _CRITERIA.setdefault(label, []).append((bool(ok), detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")

    def order(label):
        head = label.split()[0].rstrip(".")
        return (int(head) if head.isdigit() else 99, label)

    for label in sorted(_CRITERIA, key=order):
        results = _CRITERIA[label]
        ok = all(r for r, _ in results)
        details = "; ".join(d for _, d in results if d)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {details}")
