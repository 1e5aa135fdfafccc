"""Shared fields, random generators and hypothesis strategies."""

from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from waringforms import CLASS_NUMBER_ONE, FieldSpec, HermitianForm, Matrix

RATIONAL = FieldSpec.rational()
GAUSS = FieldSpec.imag_quad(1)
EISENSTEIN = FieldSpec.imag_quad(3)
ALL_IMAG = [FieldSpec.imag_quad(l) for l in CLASS_NUMBER_ONE]
ALL_FIELDS = [RATIONAL] + ALL_IMAG


def field_id(f: FieldSpec) -> str:
    return "Q" if f.is_rational else f"Q(sqrt-{f.ell})"


@pytest.fixture(params=ALL_FIELDS, ids=field_id)
def any_field(request):
    return request.param


@pytest.fixture(params=ALL_IMAG, ids=field_id)
def imag_field(request):
    return request.param


def random_element(rng: random.Random, f: FieldSpec, h: int):
    if f.is_rational:
        return f(rng.randint(-h, h))
    return f(rng.randint(-h, h), rng.randint(-h, h))


def random_unimodular(rng: random.Random, f: FieldSpec, n: int, steps: int = 6, h: int = 2) -> Matrix:
    """Product of elementary transvections and unit scalings."""
    U = Matrix.identity(f, n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        rows = [[f.one if a == b else f.zero for b in range(n)] for a in range(n)]
        if i != j:
            rows[i][j] = random_element(rng, f, h)
        else:
            rows[i][i] = rng.choice(f.units)
        U = U @ Matrix(f, rows)
    return U


def random_pd_form(rng: random.Random, f: FieldSpec, n: int, h: int = 3, extra: int = 1) -> HermitianForm:
    """R* R + I for a random integral R, so positive definite and integral."""
    g = n + extra
    R = Matrix(f, [[random_element(rng, f, h) for _ in range(n)] for _ in range(g)])
    G = R.H @ R + Matrix.identity(f, n)
    return HermitianForm(G)


def small_entry_pd_form(rng: random.Random, f: FieldSpec, n: int, bound: int, off_norm: int | None = None) -> HermitianForm:
    """Random integral positive definite Gram matrix with entries at most `bound`, by rejection.

    Off-diagonal entries have norm at most off_norm (default bound^2).
    """
    off_norm = bound * bound if off_norm is None else off_norm
    h = max(1, int(off_norm**0.5))
    while True:
        rows = [[f.zero] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = f(rng.randint(1, bound))
            for j in range(i + 1, n):
                x = random_element(rng, f, h)
                while x.norm() > off_norm:
                    x = random_element(rng, f, h)
                rows[i][j] = x
                rows[j][i] = x.conj()
        form = HermitianForm(Matrix(f, rows))
        if form.is_positive_definite():
            return form


def int_matrix(f: FieldSpec, rows) -> Matrix:
    return Matrix(f, rows)


@st.composite
def gaussian_elements(draw, f: FieldSpec = GAUSS, h: int = 20):
    a = draw(st.integers(-h, h))
    b = 0 if f.is_rational else draw(st.integers(-h, h))
    return f(a, b)


@st.composite
def rational_points(draw, f: FieldSpec, den: int = 12, h: int = 10):
    from fractions import Fraction

    a = Fraction(draw(st.integers(-h * den, h * den)), draw(st.integers(1, den)))
    b = 0 if f.is_rational else Fraction(draw(st.integers(-h * den, h * den)), draw(st.integers(1, den)))
    return f(a, b)


# ---------------------------------------------------------------------------
# acceptance report: one line per criterion, printed at the end of the run

ACCEPTANCE_LINES: dict[int, str] = {}


def record_acceptance(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
