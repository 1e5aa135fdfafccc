"""The eleven acceptance criteria, each at its stated size and time limit.

Every test records a one-line PASS/FAIL summary that is printed at the end of
the pytest run (section "acceptance criteria").
"""

import math
import random
import time
from fractions import Fraction

import mpmath
import pytest

from waringforms import (
    CLASS_NUMBER_ONE,
    Certificate,
    FieldSpec,
    HermitianForm,
    Matrix,
    Representation,
    SearchBudget,
    Success,
    balance,
    certify_constants,
    decompose,
    four_squares,
    is_positive_semidefinite,
    maclaurin_c,
    prove_not_representable,
    search_representation,
    two_by_two_T,
    weak_reduce,
)
from waringforms.bounds import alpha
from waringforms.decomposer import BelowThreshold, BlockFailure, Caps, default_profile
from waringforms.reduction import entry_bound_violations

from conftest import GAUSS, RATIONAL, random_pd_form, random_unimodular, record_acceptance, small_entry_pd_form
from test_bounds import c_oracle
from test_decomposer import E6, large_minimum_form


def test_1_exact_soundness():
    rng = random.Random(101)
    caps = Caps(oracle=SearchBudget(g_max=8, node_cap=100_000, time_cap=5.0))
    start = time.monotonic()
    checked = passed = 0
    for _ in range(200):
        form = small_entry_pd_form(rng, RATIONAL, rng.randint(1, 4), 10)
        out = decompose(form, caps=caps)
        rep = out.representation if isinstance(out, Success) else getattr(out, "fallback", None)
        if isinstance(rep, Representation):
            checked += 1
            passed += rep.verify()
    elapsed = time.monotonic() - start
    ok = passed == checked and elapsed < 300
    record_acceptance(1, "exact soundness", ok, f"{passed}/{checked} representations verified over 200 forms in {elapsed:.1f}s (< 300s)")
    assert ok


def test_2_e6_negative():
    start = time.monotonic()
    cert = prove_not_representable(HermitianForm.from_rows(RATIONAL, E6))
    elapsed = time.monotonic() - start
    ok = isinstance(cert, Certificate) and cert.replay() and elapsed < 60
    record_acceptance(2, "E6 not a sum of squares", ok, f"certificate with {getattr(cert, 'nodes', 0)} nodes, replayed, {elapsed:.2f}s (< 60s)")
    assert ok


def random_psd_binary(rng: random.Random) -> HermitianForm:
    while True:
        a, c = rng.randint(0, 50), rng.randint(0, 50)
        b = rng.randint(-50, 50)
        if a * c >= b * b:
            return HermitianForm.from_rows(RATIONAL, [[a, b], [b, c]])


def test_3_binary_forms_five_squares():
    rng = random.Random(303)
    budget = SearchBudget(g_max=5, node_cap=2_000_000, time_cap=60.0)
    start = time.monotonic()
    good = 0
    for _ in range(500):
        rep = search_representation(random_psd_binary(rng), budget)
        good += isinstance(rep, Representation) and rep.g <= 5 and rep.verify()
    elapsed = time.monotonic() - start
    ok = good == 500 and elapsed < 600
    record_acceptance(3, "binary forms in five squares", ok, f"{good}/500 with g <= 5 in {elapsed:.1f}s (< 600s)")
    assert ok


def random_unipotent(rng: random.Random, f: FieldSpec, n: int) -> Matrix:
    def q():
        return Fraction(rng.randint(-100, 100), rng.randint(1, 100))

    rows = [[f.zero] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = f.one
        for j in range(i + 1, n):
            rows[i][j] = f(q()) if f.is_rational else f(q(), q())
    return Matrix(f, rows)


def test_4_balanced_entries():
    rng = random.Random(404)
    start = time.monotonic()
    good = 0
    for k in range(1000):
        f = RATIONAL if k % 2 else GAUSS
        X = random_unipotent(rng, f, rng.randint(2, 8))
        Y, _ = balance(X)
        T = X @ Y
        good += Y.is_integral() and not entry_bound_violations(T, f) and not entry_bound_violations(T.unipotent_inverse(), f)
    elapsed = time.monotonic() - start
    ok = good == 1000 and elapsed < 300
    record_acceptance(4, "balanced entries within c(j-i)", ok, f"{good}/1000 over Q and Q(i) in {elapsed:.1f}s (< 300s)")
    assert ok


def reduction_input(rng: random.Random, f: FieldSpec, n: int) -> HermitianForm:
    # alternate plain Gram matrices with skewed ones hidden by a unimodular change of basis
    if rng.random() < 0.5:
        return random_pd_form(rng, f, n, h=3)
    D = Matrix.diag(f, [rng.randint(1, 4) ** (2 * i + 1) for i in range(n)])
    U = random_unimodular(rng, f, n, steps=2 * n, h=3)
    return HermitianForm(U.H @ D @ U)


def test_5_alpha_ratio():
    rng = random.Random(505)
    start = time.monotonic()
    good = 0
    for k in range(200):
        f = RATIONAL if k % 2 else GAUSS
        n = rng.randint(2, 5)
        h, _, _ = weak_reduce(reduction_input(rng, f, n))
        good += all(h[i] / h[j] <= alpha(f, j - i) for i in range(n) for j in range(i + 1, n))
    elapsed = time.monotonic() - start
    ok = good == 200
    record_acceptance(5, "h_i / h_j <= alpha(j-i)", ok, f"{good}/200 weakly reduced forms over Z and Z[i] in {elapsed:.1f}s")
    assert ok


@pytest.mark.parametrize("n", [2, 3])
def test_6_end_to_end(n):
    form = large_minimum_form(RATIONAL, n)
    prof = default_profile(RATIONAL)
    start = time.monotonic()
    out = decompose(form, prof)
    elapsed = time.monotonic() - start
    ok = isinstance(out, Success) and out.g <= 6 * n * n and out.representation.verify() and elapsed < 60
    g = out.g if isinstance(out, Success) else None
    detail = f"n={n}: {type(out).__name__}, g={g} (bound {6 * n * n}, target {prof.target_rows(n)}), {elapsed:.2f}s (< 60s)"
    prev = ""
    from conftest import ACCEPTANCE_LINES

    if n == 3 and 6 in ACCEPTANCE_LINES:
        prev = ACCEPTANCE_LINES[6].split(": ", 1)[1] + "; "
        ok = ok and ACCEPTANCE_LINES[6].startswith("[PASS]")
    record_acceptance(6, "large-minimum forms decomposed", ok, prev + detail)
    assert isinstance(out, Success) and out.g <= 6 * n * n and out.representation.verify() and elapsed < 60


def test_7_unit_pattern_identity():
    start = time.monotonic()
    total = good = 0
    for ell in CLASS_NUMBER_ONE:
        f = FieldSpec.imag_quad(ell)
        lim = 2 ** (f.sigma + 1) - 1
        Nw = f.norm_omega
        for a in range(-lim, lim + 1):
            for b in range(-lim, lim + 1):
                p = f(a, b)
                n_ij, n_ji, T = two_by_two_T(p)
                lo, hi = abs(b) // 2, (abs(b) + 1) // 2
                want_ij = abs(a) + lo * Nw + hi
                want_ji = abs(a) + lo + hi * Nw
                total += 1
                good += (
                    (n_ij, n_ji) == (want_ij, want_ji)
                    and T.ncols == abs(a) + abs(b)
                    and T @ T.H == Matrix(f, [[want_ij, p], [p.conj(), want_ji]])
                )
    elapsed = time.monotonic() - start
    ok = good == total and elapsed < 60
    record_acceptance(7, "2x2 unit-pattern identity", ok, f"{good}/{total} residues over nine fields in {elapsed:.2f}s (< 60s)")
    assert ok


def test_8_maclaurin_and_certification():
    fields = [RATIONAL] + [FieldSpec.imag_quad(l) for l in CLASS_NUMBER_ONE]
    mismatches = 0
    for f in fields:
        oracle = c_oracle(f, 64)
        for m in range(65):
            c = maclaurin_c(f, m)
            mismatches += (c.p, c.q) != oracle[m]
    certified = []
    for f in fields:
        prof = certify_constants(f, 200)
        d3_ok = prof.D3 >= 144 * f.beta2 * prof.D1**4 * prof.D2**6
        certified.append(prof.verify() == [] and d3_ok)
    ok = mismatches == 0 and all(certified)
    record_acceptance(8, "c(m) oracle and constant certification", ok, f"{mismatches} mismatches over m <= 64 for 10 fields; {sum(certified)}/10 profiles certified on [1, 200]")
    assert ok


def small_entry(rng: random.Random, f: FieldSpec, n: int, hermitian_diag: bool):
    """Random element with norm at most 1/n^2 (rational on the diagonal)."""
    den = rng.randint(1, 40) * n
    while True:
        a = Fraction(rng.randint(-den, den), den * n)
        b = Fraction(0) if (f.is_rational or hermitian_diag) else Fraction(rng.randint(-den, den), den * n)
        x = f(a, b)
        if x.norm() <= Fraction(1, n * n):
            return x


def test_9_small_perturbation_psd():
    rng = random.Random(909)
    fields = [RATIONAL] + [FieldSpec.imag_quad(l) for l in CLASS_NUMBER_ONE]
    good = 0
    for k in range(200):
        f = fields[k % len(fields)]
        n = rng.randint(1, 10)
        rows = [[f.zero] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = small_entry(rng, f, n, True)
            for j in range(i + 1, n):
                x = small_entry(rng, f, n, False)
                rows[i][j], rows[j][i] = x, x.conj()
        good += is_positive_semidefinite(Matrix.identity(f, n) + Matrix(f, rows))
    ok = good == 200
    record_acceptance(9, "I_n + S psd for N(s_ij) <= 1/n^2", ok, f"{good}/200")
    assert ok


def test_10_four_squares():
    start = time.monotonic()
    good = sum(sum(c * c for c in four_squares(b)) == b for b in range(10**4 + 1))
    rng = random.Random(1010)
    big = [10**12 + rng.randint(-10**6, 10**6) for _ in range(20)]
    good_big = sum(sum(c * c for c in four_squares(b)) == b for b in big)
    elapsed = time.monotonic() - start
    ok = good == 10**4 + 1 and good_big == 20 and elapsed < 60
    record_acceptance(10, "four squares", ok, f"{good}/10001 small, {good_big}/20 near 10^12 in {elapsed:.2f}s (< 60s)")
    assert ok


def test_11_phi_behaviour():
    prof = default_profile(RATIONAL)
    vals = [prof.phi_lower_bound(10**k) for k in range(13)]
    mono = all(x <= y for x, y in zip(vals, vals[1:]))
    lo, hi = prof.k_E()
    k = 4 + 2 * mpmath.sqrt(2)
    lo_m = mpmath.mpf(lo.numerator) / lo.denominator
    hi_m = mpmath.mpf(hi.numerator) / hi.denominator
    within = lo_m - mpmath.mpf(10) ** -6 <= k <= hi_m + mpmath.mpf(10) ** -6 and hi_m - lo_m < mpmath.mpf(10) ** -6
    ok = mono and within
    record_acceptance(11, "phi lower bound and k_Q", ok, f"phi(10^k), k=0..12: {vals}; k_Q in [{float(lo):.9f}, {float(hi):.9f}]")
    assert ok
