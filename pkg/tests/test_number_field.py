import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from waringforms import AlgebraicBound, FieldSpec, canonical_associate, ideal_gcd, norm, round_to_ring
from waringforms.number_field import FieldError, divides, is_unit

from conftest import ALL_FIELDS, ALL_IMAG, GAUSS, RATIONAL, field_id, rational_points


def complex_norm(z) -> float:
    c = complex(z)
    return c.real**2 + c.imag**2


class TestArithmetic:
    def test_omega_relation(self, imag_field):
        w = imag_field.omega
        assert w * w == w * imag_field.trace_omega - imag_field.norm_omega

    def test_norm_examples(self):
        assert norm(RATIONAL(-3)) == 9
        assert norm(GAUSS(1, 1)) == 2
        assert norm(FieldSpec.imag_quad(7).omega) == 2

    def test_norm_matches_complex_modulus(self, any_field):
        for a, b in itertools.product(range(-3, 4), repeat=2):
            if any_field.is_rational and b:
                continue
            z = any_field(a, b)
            assert math.isclose(float(z.norm()), complex_norm(z), rel_tol=1e-12, abs_tol=1e-12)

    @pytest.mark.parametrize("f", ALL_FIELDS, ids=field_id)
    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_norm_multiplicative_and_conj(self, f, data):
        x = data.draw(rational_points(f))
        y = data.draw(rational_points(f))
        assert (x * y).norm() == x.norm() * y.norm()
        assert (x * y).conj() == x.conj() * y.conj()
        assert x.conj().conj() == x
        assert (x * x.conj()) == x.norm()
        if y:
            assert (x / y) * y == x

    def test_units(self):
        assert len(GAUSS.units) == 4
        assert len(FieldSpec.imag_quad(3).units) == 6
        assert len(FieldSpec.imag_quad(163).units) == 2
        for f in ALL_FIELDS:
            assert all(is_unit(u) for u in f.units)

    def test_rejects_non_pid(self):
        with pytest.raises(FieldError):
            FieldSpec(5)

    def test_mixing_fields(self):
        with pytest.raises(FieldError):
            GAUSS(1) + FieldSpec.imag_quad(2)(1)


def circumradius_point(f: FieldSpec):
    """A point at maximal distance from the ring, from the geometry of the lattice cell."""
    if f.ell % 4 == 3:
        # circumcentre of 0, 1, omega: real part 1/2, imaginary part (l - 1) / (4 sqrt l)
        b = Fraction(f.ell - 1, 2 * f.ell)
        return f(Fraction(1, 2) - b / 2, b)
    return f(Fraction(1, 2), Fraction(1, 2))


class TestRounding:
    def test_spec_examples(self):
        c, eta = round_to_ring(RATIONAL(Fraction(7, 2)))
        assert c == 3 and eta == Fraction(1, 2) and eta.norm() == Fraction(1, 4)
        c, eta = round_to_ring(GAUSS(0))
        assert c == 0 and eta == 0
        E = FieldSpec.imag_quad(3)
        c, eta = round_to_ring(E.omega)
        assert c == E.omega and eta.norm() == 0

    @pytest.mark.parametrize("f", ALL_IMAG, ids=field_id)
    def test_beta_is_the_covering_radius(self, f):
        # the deep hole realises beta^2 exactly, and a fine grid never exceeds it
        p = circumradius_point(f)
        c, eta = round_to_ring(p)
        assert eta.norm() == f.beta2
        worst = Fraction(0)
        den = 24
        for i in range(den):
            for j in range(den):
                _, e = round_to_ring(f(Fraction(i, den), Fraction(j, den)))
                worst = max(worst, e.norm())
        assert worst <= f.beta2
        assert worst >= f.beta2 * Fraction(9, 10)

    @pytest.mark.parametrize("f", ALL_FIELDS, ids=field_id)
    @given(data=st.data())
    @settings(max_examples=60, deadline=None)
    def test_rounding_is_minimal(self, f, data):
        x = data.draw(rational_points(f))
        c, eta = round_to_ring(x)
        assert c.is_integral and c + eta == x
        assert eta.norm() <= f.beta2
        a0, b0 = math.floor(x.a), math.floor(x.b)
        brute = min(
            (x - f(a, b)).norm()
            for a in range(a0 - 3, a0 + 5)
            for b in ([0] if f.is_rational else range(b0 - 3, b0 + 5))
        )
        assert eta.norm() == brute


def ideal_norm_oracle(a, b) -> int:
    """Index of the Z-lattice spanned by a, a w, b, b w: gcd of the 2x2 minors."""
    f = a.field
    vecs = [(int(z.a), int(z.b)) for z in (a, a * f.omega, b, b * f.omega)]
    g = 0
    for u, v in itertools.combinations(vecs, 2):
        g = math.gcd(g, u[0] * v[1] - u[1] * v[0])
    return g


class TestIdealGcd:
    def test_integers(self):
        g, x, y = ideal_gcd(RATIONAL(6), RATIONAL(10))
        assert abs(g.a) == 2 and x * 6 + y * 10 == g

    def test_unit_argument(self, imag_field):
        f = imag_field
        g, _, _ = ideal_gcd(f.units[-1], f(7, 3))
        assert is_unit(g)

    def test_q_sqrt_minus_19(self):
        f = FieldSpec.imag_quad(19)
        a, b = f(2), f(1, 1)
        g, x, y = ideal_gcd(a, b)
        assert g.norm() == ideal_norm_oracle(a, b)
        assert x * a + y * b == g

    @pytest.mark.parametrize("f", ALL_IMAG, ids=field_id)
    @given(a1=st.integers(-12, 12), a2=st.integers(-12, 12), b1=st.integers(-12, 12), b2=st.integers(-12, 12))
    @settings(max_examples=30, deadline=None)
    def test_generator_against_lattice_index(self, f, a1, a2, b1, b2):
        a, b = f(a1, a2), f(b1, b2)
        if not a and not b:
            return
        g, x, y = ideal_gcd(a, b)
        assert x * a + y * b == g
        assert divides(g, a) and divides(g, b)
        assert g.norm() == ideal_norm_oracle(a, b)
        assert canonical_associate(g) == g


class TestAlgebraicBound:
    @given(
        p=st.fractions(min_value=-10, max_value=10, max_denominator=50),
        q=st.fractions(min_value=-10, max_value=10, max_denominator=50),
        r=st.fractions(min_value=-10, max_value=10, max_denominator=50),
    )
    @settings(max_examples=100, deadline=None)
    def test_order_matches_floats(self, p, q, r):
        b2 = Fraction(1, 2)
        x = AlgebraicBound(p, q, b2)
        fx = float(p) + float(q) * math.sqrt(0.5)
        if abs(fx - float(r)) > 1e-9:
            assert (x < r) == (fx < float(r))
        assert (x - x).sign() == 0

    def test_exact_tie(self):
        # (1 + beta)^2 = 3/2 + 2 beta with beta^2 = 1/2
        b = AlgebraicBound(0, 1, Fraction(1, 2))
        assert (1 + b) * (1 + b) == AlgebraicBound(Fraction(3, 2), 2, Fraction(1, 2))
        assert b * b == Fraction(1, 2)
