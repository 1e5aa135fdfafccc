"""Scalar bound functions: Hermite-type constants, alpha, c(m), G_E(n) and friends.

Every transcendental quantity is evaluated in interval arithmetic
(mpmath.iv) and converted to a one-sided rational enclosure, so comparisons
made downstream are exact statements about rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import mpmath
from mpmath.ctx_iv import MPIntervalContext

from .number_field import AlgebraicBound, FieldSpec

IV = MPIntervalContext()
IV.prec = 160


class ProfileError(ValueError):
    pass


# ---------------------------------------------------------------------------
# interval helpers


def _frac(raw) -> Fraction:
    p, q = mpmath.libmp.to_rational(raw)
    return Fraction(int(p), int(q))


def upper(x) -> Fraction:
    """Rational upper end of an interval."""
    return _frac(x._mpi_[1])


def lower(x) -> Fraction:
    return _frac(x._mpi_[0])


def ivq(x) -> "IV.mpf":
    """Tight interval around a rational."""
    x = Fraction(x)
    return IV.mpf(x.numerator) / IV.mpf(x.denominator)


def round_up_sig(x: Fraction, digits: int = 3) -> Fraction:
    """Smallest number with `digits` significant decimal digits that is >= x (x > 0)."""
    if x <= 0:
        raise ValueError("round_up_sig needs a positive number")
    e = len(str(x.numerator)) - len(str(x.denominator))
    while Fraction(10) ** e > x:
        e -= 1
    while Fraction(10) ** (e + 1) <= x:
        e += 1
    scale = Fraction(10) ** (e - digits + 1)
    k = -((-x) // scale)
    return k * scale


def harmonic(m: int) -> Fraction:
    """Sigma(m) = 1 + 1/2 + ... + 1/m."""
    return sum((Fraction(1, k) for k in range(1, m + 1)), Fraction(0))


@lru_cache(maxsize=None)
def _harmonic_cached(m: int) -> Fraction:
    return harmonic(m)


@lru_cache(maxsize=None)
def beta_iv(field: FieldSpec):
    return IV.sqrt(ivq(field.beta2))


# ---------------------------------------------------------------------------
# volumes and Hermite-type constants


@lru_cache(maxsize=None)
def omega_n_iv(n: int):
    """Volume of the unit ball in R^n."""
    if n < 1:
        raise ValueError("n >= 1")
    if n % 2 == 0:
        return IV.pi ** (n // 2) / factorial(n // 2)
    return IV.pi ** ((n - 1) // 2) * (2 ** (n + 1)) * factorial((n + 1) // 2) / factorial(n + 1)


@lru_cache(maxsize=None)
def sigma_iv(field: FieldSpec, n: int):
    if n < 1:
        raise ValueError("sigma_n needs n >= 1")
    if field.is_rational:
        return 4 * omega_n_iv(n) ** (-ivq(Fraction(2, n)))
    return 2 * omega_n_iv(2 * n) ** (-ivq(Fraction(1, n))) * IV.sqrt(abs(field.disc))


def sigma_n(field: FieldSpec, n: int) -> Fraction:
    """Rational upper bound on sigma_{n,E}, which dominates the Hermite-type constant."""
    return upper(sigma_iv(field, n))


def hermite_relaxation(field: FieldSpec, n: int) -> Fraction:
    """Upper enclosure of e^{-1+1/n} n^{1+1/n} |d_E|^{1/2}, valid for every n >= 1."""
    if n < 1:
        raise ValueError("n >= 1")
    x = IV.exp(ivq(Fraction(1 - n, n))) * ivq(n) ** ivq(Fraction(n + 1, n)) * IV.sqrt(abs(field.disc))
    return upper(x)


@lru_cache(maxsize=None)
def _alpha_prefix(field: FieldSpec, m: int):
    """prod_{k=2}^{m+1} sigma_k^{1/(k-1)}."""
    if m == 0:
        return ivq(1)
    return _alpha_prefix(field, m - 1) * sigma_iv(field, m + 1) ** ivq(Fraction(1, m))


def alpha_iv(field: FieldSpec, m: int):
    if m < 1:
        raise ValueError("alpha(m) needs m >= 1")
    for k in range(1, m):  # fill the cache bottom-up, keeps recursion shallow
        _alpha_prefix(field, k)
    return sigma_iv(field, m + 1) * _alpha_prefix(field, m)


def alpha(field: FieldSpec, m: int) -> Fraction:
    """Rational upper bound on alpha(m) = sigma_{m+1} prod_{k=2}^{m+1} sigma_k^{1/(k-1)}."""
    return upper(alpha_iv(field, m))


# ---------------------------------------------------------------------------
# c(m): Maclaurin coefficients of exp(beta x / (1 - x))


@lru_cache(maxsize=None)
def maclaurin_c(field: FieldSpec, m: int) -> AlgebraicBound:
    """Exact c(m) = sum_{k=1}^m C(m-1, k-1) beta^k / k! in Q(beta); c(0) = 1."""
    b2 = field.beta2
    if m < 0:
        raise ValueError("m >= 0")
    if m == 0:
        return AlgebraicBound(1, 0, b2)
    p = Fraction(0)
    q = Fraction(0)
    for k in range(1, m + 1):
        coeff = Fraction(comb(m - 1, k - 1), factorial(k)) * b2 ** (k // 2)
        if k % 2:
            q += coeff
        else:
            p += coeff
    return AlgebraicBound(p, q, b2)


def maclaurin_c_series(field: FieldSpec, mmax: int) -> list[AlgebraicBound]:
    """c(0..mmax) from the recurrence f_m = (1/m) sum_j j g_j f_{m-j} for f = exp(g)."""
    b2 = field.beta2
    beta = AlgebraicBound(0, 1, b2)
    f = [AlgebraicBound(1, 0, b2)]
    for m in range(1, mmax + 1):
        acc = AlgebraicBound(0, 0, b2)
        for j in range(1, m + 1):
            acc = acc + (beta * f[m - j]) * j
        f.append(acc / m)
    return f


def algebraic_iv(x: AlgebraicBound, field: FieldSpec):
    return ivq(x.p) + ivq(x.q) * beta_iv(field)


def k_E(field: FieldSpec) -> tuple[Fraction, Fraction]:
    """Enclosure [lo, hi] of (4 + 4 sqrt 2) sqrt(beta)."""
    x = (4 + 4 * IV.sqrt(2)) * IV.sqrt(beta_iv(field))
    return lower(x), upper(x)


# ---------------------------------------------------------------------------
# profiles


def _alpha_shape_iv(field: FieldSpec, m: int):
    """|d_E|^{(1 + Sigma(m))/2} e^{(ln m)^2 / 2}."""
    d = ivq(abs(field.disc))
    s = ivq(1 + _harmonic_cached(m))
    return d ** (s / 2) * IV.exp(IV.log(ivq(m)) ** 2 / 2)


def _c_shape_iv(field: FieldSpec, m: int):
    """e^{2 sqrt(beta m)}."""
    return IV.exp(2 * IV.sqrt(beta_iv(field) * m))


@dataclass(frozen=True)
class BoundsProfile:
    """Range-certified constants D1, D2, D3 for one field.

    D1 and D2 are only claimed for 1 <= m <= certification_range; every
    evaluator refuses arguments outside that range.
    """

    field: FieldSpec
    D1: Fraction
    D2: Fraction
    D3: Fraction
    certification_range: int
    notes: dict = dc_field(default_factory=dict, compare=False)

    def _check(self, n: int):
        if n > self.certification_range:
            raise ProfileError(
                f"n={n} lies beyond the certification range {self.certification_range}"
            )

    @property
    def sigma(self) -> int:
        return self.field.sigma

    def alpha_bar_iv(self, n: int):
        self._check(n)
        return ivq(self.D1) * _alpha_shape_iv(self.field, n)

    def alpha_bar(self, n: int) -> Fraction:
        """Upper enclosure of D1 |d_E|^{(1+Sigma(n))/2} e^{(ln n)^2/2}."""
        return upper(self.alpha_bar_iv(n))

    def c_bar_iv(self, m: int):
        self._check(m)
        return ivq(self.D2) * _c_shape_iv(self.field, m)

    def c_bar(self, m: int) -> Fraction:
        """Upper enclosure of D2 e^{2 sqrt(beta m)}."""
        return upper(self.c_bar_iv(m))

    def G_iv(self, n: int):
        if n < 2:
            raise ValueError("G_E(n) is defined for n >= 2")
        self._check(n)
        f = self.field
        d = ivq(abs(f.disc))
        expo = (4 + 4 * IV.sqrt(2)) * IV.sqrt(beta_iv(f) * n) + 2 * IV.log(ivq(n)) ** 2
        return ivq(self.D3) * d ** (2 * ivq(1 + _harmonic_cached(n))) * ivq(n) ** 10 * IV.exp(expo)

    def G(self, n: int) -> Fraction:
        """Upper enclosure of G_E(n); thresholds built on it are conservative."""
        return upper(self.G_iv(n))

    def G_lower(self, n: int) -> Fraction:
        return lower(self.G_iv(n))

    def target_rows(self, n: int) -> int:
        """2^{sigma+2} n^2 + n."""
        return 2 ** (self.sigma + 2) * n * n + n

    def g_upper_bound(self, n: int) -> tuple[Fraction, Fraction]:
        """(sum_{j=2}^n G_E(j) + 4, n G_E(n)); both are 4 when n = 1."""
        if n < 1:
            raise ValueError("n >= 1")
        if n == 1:
            return Fraction(4), Fraction(4)
        rec = sum((self.G(j) for j in range(2, n + 1)), Fraction(4))
        return rec, n * self.G(n)

    def phi_lower_bound(self, s: int) -> int:
        """min{n >= 2 : G_E(n) > s}, a certified lower bound on phi*_O(s)."""
        if s < 1:
            raise ValueError("s >= 1")
        n = 2
        while not self.G(n) > s:
            n += 1
        return n

    def k_E(self) -> tuple[Fraction, Fraction]:
        return k_E(self.field)

    def verify(self) -> list[str]:
        """Re-check every certified inequality; returns the list of failures."""
        f = self.field
        bad = []
        b2 = f.beta2
        d12 = self.D1**2 * self.D2**2
        need = max(
            b2,
            d12,
            144 * b2 * self.D1**4 * self.D2**6,
            2 ** (f.sigma + 2) * (f.norm_omega + 4) * d12,
        )
        if self.D3 < need:
            bad.append("D3 below the required maximum")
        for m in range(0, self.certification_range + 1):
            c_hi = upper(algebraic_iv(maclaurin_c(f, m), f))
            if not c_hi <= lower(ivq(self.D2) * _c_shape_iv(f, m)):
                bad.append(f"c({m}) exceeds D2 e^(2 sqrt(beta m))")
        for m in range(1, self.certification_range + 1):
            if not alpha(f, m) <= lower(ivq(self.D1) * _alpha_shape_iv(f, m)):
                bad.append(f"alpha({m}) exceeds the D1 envelope")
        for n in range(2, self.certification_range + 1):
            if not self.G_lower(n) > self.target_rows(n):
                bad.append(f"G_E({n}) <= 2^(sigma+2) n^2 + n")
        return bad

    def to_json(self) -> dict:
        return {
            "schema": "waring-forms/1",
            "kind": "bounds_profile",
            "field": self.field.to_json(),
            "D1": str(self.D1),
            "D2": str(self.D2),
            "D3": str(self.D3),
            "certification_range": self.certification_range,
        }

    @classmethod
    def from_json(cls, doc: dict, *, check: bool = True) -> "BoundsProfile":
        prof = cls(
            FieldSpec.from_json(doc["field"]),
            Fraction(doc["D1"]),
            Fraction(doc["D2"]),
            Fraction(doc["D3"]),
            int(doc["certification_range"]),
        )
        if check:
            bad = prof.verify()
            if bad:
                raise ProfileError("profile is not certified: " + "; ".join(bad[:3]))
        return prof

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def certify_constants(field: FieldSpec, certification_range: int = 200) -> BoundsProfile:
    """Smallest 3-significant-digit D1, D2 valid on [1, range], then D3 from them."""
    if certification_range < 64:
        raise ValueError("certification range must be at least 64")
    f = field
    d1 = Fraction(0)
    for m in range(1, certification_range + 1):
        d1 = max(d1, upper(alpha_iv(f, m) / _alpha_shape_iv(f, m)))
    # m = 0 is included so that c_bar(0) = D2 >= c(0) = 1
    d2 = Fraction(0)
    for m in range(0, certification_range + 1):
        d2 = max(d2, upper(algebraic_iv(maclaurin_c(f, m), f) / _c_shape_iv(f, m)))
    D1 = round_up_sig(d1)
    D2 = round_up_sig(d2)
    # rounding to 3 digits can land exactly on an endpoint; nudge until the lower
    # interval end clears, so verify() holds strictly on enclosures
    while any(
        not alpha(f, m) <= lower(ivq(D1) * _alpha_shape_iv(f, m)) for m in range(1, certification_range + 1)
    ):
        D1 = round_up_sig(D1 * Fraction(1001, 1000))
    while any(
        not upper(algebraic_iv(maclaurin_c(f, m), f)) <= lower(ivq(D2) * _c_shape_iv(f, m))
        for m in range(0, certification_range + 1)
    ):
        D2 = round_up_sig(D2 * Fraction(1001, 1000))
    b2 = f.beta2
    d12 = D1**2 * D2**2
    D3 = max(
        b2,
        d12,
        144 * b2 * D1**4 * D2**6,
        2 ** (f.sigma + 2) * (f.norm_omega + 4) * d12,
    )
    D3 = round_up_sig(D3)
    prof = BoundsProfile(f, D1, D2, D3, certification_range)
    bad = prof.verify()
    if bad:
        raise ProfileError("certification failed: " + "; ".join(bad[:3]))
    return prof
