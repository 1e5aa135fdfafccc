import itertools
import random
from fractions import Fraction

import pytest

from waringforms import HermitianForm, Matrix, balance, balanced_hkz, shortest_vector, weak_reduce
from waringforms.bounds import maclaurin_c
from waringforms.linalg import NotPositiveSemidefinite, schur_complement
from waringforms.number_field import AlgebraicBound
from waringforms.enumeration import lll_gram, quadratic_value, short_vectors, shortest_vectors
from waringforms.reduction import entry_bound_violations, exp_product, scalar_restriction_gram

from conftest import GAUSS, RATIONAL, EISENSTEIN, field_id, random_element, random_pd_form, random_unimodular

A2 = [[2, 1], [1, 2]]


def box_minimum(form: HermitianForm, r: int) -> Fraction:
    """Exhaustive minimum over coefficient boxes |a|, |b| <= r."""
    f = form.field
    n = form.n
    if f.is_rational:
        ring = [f(a) for a in range(-r, r + 1)]
    else:
        ring = [f(a, b) for a in range(-r, r + 1) for b in range(-r, r + 1)]
    best = None
    for x in itertools.product(ring, repeat=n):
        if any(x):
            v = form.value(x)
            best = v if best is None or v < best else best
    return best


class TestShortestVector:
    def test_examples(self):
        mu, v = shortest_vector(HermitianForm.from_rows(RATIONAL, A2))
        assert mu == 2 and v == [1, 0]
        for f in (RATIONAL, GAUSS, EISENSTEIN):
            mu, v = shortest_vector(Matrix.identity(f, 3))
            assert mu == 1 and v == [1, 0, 0]
        mu, v = shortest_vector(HermitianForm.from_rows(GAUSS, [[2]]))
        assert mu == 2 and v == [1]

    def test_restriction_of_scalars_values(self):
        M = random_pd_form(random.Random(1), GAUSS, 2).gram
        G = scalar_restriction_gram(M)
        x = [3, -1, 2, 5]
        vec = [GAUSS(3, -1), GAUSS(2, 5)]
        direct = HermitianForm(M).value(vec)
        via = sum(G[i][j] * x[i] * x[j] for i in range(4) for j in range(4))
        assert direct == via

    @pytest.mark.parametrize("f", [RATIONAL, GAUSS], ids=field_id)
    def test_box_oracle(self, f):
        rng = random.Random(2024)
        count = 200 if f.is_rational else 25
        r = 3 if f.is_rational else 1
        for _ in range(count):
            form = random_pd_form(rng, f, 3 if f.is_rational else 2, h=2)
            mu, v = shortest_vector(form)
            assert form.value(v) == mu
            assert mu == box_minimum(form, r)

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveSemidefinite):
            shortest_vector(Matrix(RATIONAL, [[1, 2], [2, 1]]))


class TestWeakReduce:
    def test_identity(self):
        h, X, U = weak_reduce(Matrix.identity(RATIONAL, 3))
        assert h == [1, 1, 1]
        assert X == Matrix.identity(RATIONAL, 3) and U == Matrix.identity(RATIONAL, 3)

    def test_examples(self):
        h, X, U = weak_reduce(Matrix(RATIONAL, [[5, 2], [2, 1]]))
        assert h == [1, 1]
        h, X, U = weak_reduce(Matrix(RATIONAL, A2))
        assert h == [2, Fraction(3, 2)]
        assert X == Matrix(RATIONAL, [[1, Fraction(1, 2)], [0, 1]])

    @pytest.mark.parametrize("f", [RATIONAL, GAUSS, EISENSTEIN], ids=field_id)
    def test_projected_minima(self, f):
        # each h_i is the minimum of the i-th projection, recomputed on an independent box
        rng = random.Random(5)
        for _ in range(6):
            form = random_pd_form(rng, f, 3, h=2)
            h, X, U = weak_reduce(form)
            cur = U.H @ form.gram @ U
            assert cur == X.H @ Matrix.diag(f, h) @ X
            from waringforms.number_field import is_unit

            assert is_unit(U.det())
            assert h[0] == box_minimum(form, 2 if f.is_rational else 1)
            for i in range(3):
                S = schur_complement(cur, i)
                assert h[i] == S[0, 0]


class TestBalance:
    def test_identity(self):
        Y, slices = balance(Matrix.identity(RATIONAL, 3))
        assert Y == Matrix.identity(RATIONAL, 3)
        assert all(not any(z.entries) for z in slices)

    def test_two_by_two(self):
        X = Matrix(RATIONAL, [[1, Fraction(5, 2)], [0, 1]])
        Y, slices = balance(X)
        assert Y == Matrix(RATIONAL, [[1, -2], [0, 1]])
        assert X @ Y == Matrix(RATIONAL, [[1, Fraction(1, 2)], [0, 1]])
        assert slices[0].entries == (Fraction(1, 2),)

    def test_three_by_three(self):
        h = Fraction(-1, 2)
        X = Matrix(RATIONAL, [[1, h, h], [0, 1, h], [0, 0, 1]])
        Y, slices = balance(X)
        T = X @ Y
        c2 = maclaurin_c(RATIONAL, 2)
        assert c2 == Fraction(5, 8)
        assert AlgebraicBound(T[0, 2].norm(), 0, RATIONAL.beta2) <= c2 * c2
        assert exp_product(RATIONAL, 3, slices) == T
        assert exp_product(RATIONAL, 3, slices, inverse=True) == T.unipotent_inverse()

    def test_random_gaussian(self):
        rng = random.Random(9)
        n = 5
        for _ in range(10):
            rows = [[GAUSS.zero] * n for _ in range(n)]
            for i in range(n):
                rows[i][i] = GAUSS.one
                for j in range(i + 1, n):
                    rows[i][j] = GAUSS(Fraction(rng.randint(-300, 300), rng.randint(1, 7)), Fraction(rng.randint(-300, 300), rng.randint(1, 7)))
            X = Matrix(GAUSS, rows)
            Y, _ = balance(X)
            assert Y.is_integral() and Y.is_unipotent()
            T = X @ Y
            assert entry_bound_violations(T, GAUSS) == []
            assert entry_bound_violations(T.unipotent_inverse(), GAUSS) == []


class TestBalancedHKZ:
    def test_identity(self):
        red = balanced_hkz(Matrix.identity(GAUSS, 3))
        assert red.H == [1, 1, 1] and red.T == Matrix.identity(GAUSS, 3)

    def test_a2(self):
        red = balanced_hkz(HermitianForm.from_rows(RATIONAL, A2))
        assert red.H == [2, Fraction(3, 2)]
        assert abs(red.T[0, 1].a) == Fraction(1, 2)
        assert all(v in (True, []) for v in red.report().values())

    @pytest.mark.parametrize("f", [RATIONAL, GAUSS], ids=field_id)
    def test_conjugated_diagonal(self, f):
        rng = random.Random(31)
        for _ in range(3):
            base = Matrix(f, [[10**6 if i == j else random_element(rng, f, 3) * (1 if i < j else 0) for j in range(3)] for i in range(3)])
            G = base + base.H - Matrix.diag(f, [10**6] * 3)
            U = random_unimodular(rng, f, 3)
            form = HermitianForm(U.H @ G @ U)
            red = balanced_hkz(form)
            rep = red.report()
            assert rep["reconstruction"] and rep["factorization"] and rep["h1_is_minimum"]
            assert rep["alpha_violations"] == [] and rep["entry_bound_violations"] == []


class TestEnumeration:
    def test_lll_gram_is_a_unimodular_change(self):
        rng = random.Random(77)
        for _ in range(30):
            n = rng.randint(2, 5)
            D = [[Fraction(rng.randint(1, 10**6)) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
            form = HermitianForm.from_rows(RATIONAL, D).transform(random_unimodular(rng, RATIONAL, n, steps=2 * n, h=3))
            G = [[form.gram[i, j].a for j in range(n)] for i in range(n)]
            Gr, B = lll_gram(G)
            for i in range(n):
                for j in range(n):
                    assert Gr[i][j] == sum(B[i][a] * G[a][b] * B[j][b] for a in range(n) for b in range(n))
            det = Matrix(RATIONAL, [[RATIONAL(x) for x in row] for row in B]).det()
            assert det in (RATIONAL(1), RATIONAL(-1))

    def test_short_vectors_against_box(self):
        rng = random.Random(8)
        for _ in range(40):
            form = random_pd_form(rng, RATIONAL, 3, h=2)
            G = [[form.gram[i, j].a for j in range(3)] for i in range(3)]
            bound = min(G[i][i] for i in range(3)) + 2
            got = {x for x, _ in short_vectors(G, bound)}
            want = {x for x in itertools.product(range(-6, 7), repeat=3)
                    if any(x) and quadratic_value(G, x) <= bound}
            assert got == want

    def test_skewed_lattice_terminates(self):
        G = [[Fraction(10**9), Fraction(10**9 - 1)], [Fraction(10**9 - 1), Fraction(10**9)]]
        best, vecs = shortest_vectors(G)
        assert best == 2 and vecs == [(-1, 1), (1, -1)]
