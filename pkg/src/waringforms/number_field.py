"""Exact arithmetic in Q and the nine imaginary quadratic fields of class number one.

Elements are stored as a + b*omega with rational a, b, where omega generates
the ring of integers: omega = sqrt(-l) when l = 1, 2 mod 4 and
omega = (1 + sqrt(-l))/2 when l = 3 mod 4.  For Q, omega = 1 and b is always 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from importlib import resources
from typing import Union

from .enumeration import short_vectors

CLASS_NUMBER_ONE = (1, 2, 3, 7, 11, 19, 43, 67, 163)

Rational = Union[int, Fraction]


class FieldError(ValueError):
    pass


def _load_sigma_defaults() -> dict[int, int]:
    text = resources.files("waringforms").joinpath("data/fields.json").read_text()
    return {int(k): int(v) for k, v in json.loads(text)["sigma_defaults"].items()}


SIGMA_DEFAULTS = _load_sigma_defaults()


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot read {x!r} as a rational")


@dataclass(frozen=True)
class FieldSpec:
    """E = Q (ell is None) or E = Q(sqrt(-ell)) with its configured sigma."""

    ell: int | None = None
    sigma: int = 0

    def __post_init__(self):
        if self.ell is not None and self.ell not in CLASS_NUMBER_ONE:
            raise FieldError(
                f"ell={self.ell} is not one of the class-number-one values {CLASS_NUMBER_ONE}"
            )
        if self.sigma < 0:
            raise FieldError("sigma must be nonnegative")
        if self.ell is None and self.sigma != 0:
            raise FieldError("sigma is 0 for the rational field")

    @classmethod
    def rational(cls) -> "FieldSpec":
        return cls(None, 0)

    @classmethod
    def imag_quad(cls, ell: int, sigma: int | None = None) -> "FieldSpec":
        if sigma is None:
            if ell not in SIGMA_DEFAULTS:
                raise FieldError(f"no sigma default for ell={ell}")
            sigma = SIGMA_DEFAULTS[ell]
        return cls(ell, sigma)

    @property
    def is_rational(self) -> bool:
        return self.ell is None

    @cached_property
    def trace_omega(self) -> int:
        if self.ell is None:
            return 2  # omega = 1; unused because b stays 0
        return 1 if self.ell % 4 == 3 else 0

    @cached_property
    def norm_omega(self) -> int:
        if self.ell is None:
            return 1
        return (self.ell + 1) // 4 if self.ell % 4 == 3 else self.ell

    @cached_property
    def disc(self) -> int:
        """Field discriminant d_E (1 for Q)."""
        if self.ell is None:
            return 1
        return -self.ell if self.ell % 4 == 3 else -4 * self.ell

    @cached_property
    def beta2(self) -> Fraction:
        """Square of the Euclidean-minimum radius beta_E."""
        if self.ell is None:
            return Fraction(1, 4)
        if self.ell % 4 == 3:
            return Fraction((self.ell + 1) ** 2, 16 * self.ell)
        return Fraction(self.ell + 1, 4)

    @cached_property
    def two_is_inert(self) -> bool:
        return self.ell is not None and self.ell % 8 == 3

    @cached_property
    def units(self) -> tuple["FieldElement", ...]:
        if self.ell is None:
            return (self(1), self(-1))
        found = []
        for a in range(-2, 3):
            for b in range(-2, 3):
                if a * a + self.trace_omega * a * b + self.norm_omega * b * b == 1:
                    found.append(self(a, b))
        return tuple(sorted(found, key=lambda u: (u.a, u.b), reverse=True))

    def omega_complex(self) -> complex:
        if self.ell is None:
            return complex(1.0)
        if self.ell % 4 == 3:
            return complex(0.5, math.sqrt(self.ell) / 2)
        return complex(0.0, math.sqrt(self.ell))

    def __call__(self, a: Rational | str = 0, b: Rational | str = 0) -> "FieldElement":
        return FieldElement(self, a, b)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1, 0)

    @property
    def omega(self) -> "FieldElement":
        return self.one if self.ell is None else FieldElement(self, 0, 1)

    def to_json(self) -> dict:
        if self.ell is None:
            return {"field": "Q"}
        return {"field": "imag_quad", "ell": self.ell, "sigma": self.sigma}

    @classmethod
    def from_json(cls, doc: dict) -> "FieldSpec":
        kind = doc.get("field")
        if kind == "Q":
            return cls.rational()
        if kind == "imag_quad":
            return cls.imag_quad(int(doc["ell"]), doc.get("sigma"))
        raise FieldError(f"unknown field kind {kind!r}")

    def __str__(self):
        return "Q" if self.ell is None else f"Q(sqrt(-{self.ell}))"


class FieldElement:
    """Immutable a + b*omega with rational a, b."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: FieldSpec, a=0, b=0):
        a = as_fraction(a)
        b = as_fraction(b)
        if field.ell is None and b:
            raise FieldError("rational field elements have b = 0")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field.ell != self.field.ell:
                raise FieldError(f"mixing elements of {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        f = self.field
        if f.ell is None:
            return FieldElement(f, self.a * o.a, 0)
        bb = self.b * o.b
        # omega^2 = t*omega - N(omega)
        return FieldElement(
            f,
            self.a * o.a - f.norm_omega * bb,
            self.a * o.b + self.b * o.a + f.trace_omega * bb,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero field element")
        c = self * o.conj()
        return FieldElement(self.field, c.a / n, c.b / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return (self.field.one / self) ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "FieldElement":
        if self.field.ell is None:
            return self
        return FieldElement(self.field, self.a + self.field.trace_omega * self.b, -self.b)

    def norm(self) -> Fraction:
        """x * x^* as a nonnegative rational."""
        f = self.field
        if f.ell is None:
            return self.a * self.a
        return self.a * self.a + f.trace_omega * self.a * self.b + f.norm_omega * self.b * self.b

    def real_part(self) -> Fraction:
        if self.field.ell is None:
            return self.a
        return self.a + Fraction(self.field.trace_omega, 2) * self.b

    @property
    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field.ell == other.field.ell and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.field.ell, self.a, self.b))

    def __complex__(self):
        w = self.field.omega_complex()
        return float(self.a) + float(self.b) * w

    def key(self) -> tuple:
        """Total order used for canonical choices; zero is the smallest element."""
        return (self.norm(), self.a, self.b)

    def __repr__(self):
        return f"FieldElement({self.field}, {self.a}, {self.b})"

    def __str__(self):
        if self.field.ell is None or self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}w"
        return f"{self.a}{'+' if self.b > 0 else '-'}{abs(self.b)}w"

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b)}


def element_from_json(field: FieldSpec, doc) -> FieldElement:
    if isinstance(doc, dict):
        return FieldElement(field, as_fraction(str(doc.get("a", 0))), as_fraction(str(doc.get("b", 0))))
    if isinstance(doc, (int, str)):
        return FieldElement(field, as_fraction(doc), 0)
    raise FieldError(f"cannot parse element {doc!r}")


def norm(x: FieldElement) -> Fraction:
    return x.norm()


def canonical_associate(z: FieldElement) -> FieldElement:
    """The unit multiple of z with the largest (a, b); zero maps to zero."""
    if not z:
        return z
    return max((u * z for u in z.field.units), key=lambda w: (w.a, w.b))


def round_to_ring(x: FieldElement) -> tuple[FieldElement, FieldElement]:
    """Split x = c + eta with c integral and N(eta) <= beta^2.

    Among minimisers of N(x - c) the one with smallest (|a|, |b|, a, b) wins.
    """
    f = x.field
    if f.ell is None:
        lo = math.floor(x.a)
        cands = [lo, lo + 1]
        c = min(cands, key=lambda k: ((x.a - k) ** 2, abs(k), k))
        cf = FieldElement(f, c, 0)
        return cf, x - cf
    t = f.trace_omega
    best = None
    for bc in range(math.floor(x.b) - 1, math.ceil(x.b) + 2):
        # N = (da + t*db/2)^2 + (N(omega) - t^2/4) db^2 with da = x.a - ac
        centre = x.a + Fraction(t, 2) * (x.b - bc)
        for ac in (math.floor(centre), math.floor(centre) + 1):
            c = FieldElement(f, ac, bc)
            n = (x - c).norm()
            k = (n, abs(ac), abs(bc), ac, bc)
            if best is None or k < best[0]:
                best = (k, c)
    c = best[1]
    return c, x - c


def _int_coords(z: FieldElement) -> tuple[int, int]:
    if not z.is_integral:
        raise FieldError(f"{z} is not in the ring of integers")
    return int(z.a), int(z.b)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _echelon(rows: list[list[int]]) -> list[list[int]]:
    """Integer row echelon on [v0, v1 | coefficient...] rows, pivots in columns 0 and 1."""
    rows = [r[:] for r in rows]
    basis = []
    for col in (0, 1):
        while True:
            live = [r for r in rows if r[col] != 0]
            if len(live) <= 1:
                break
            piv = min(live, key=lambda r: abs(r[col]))
            for r in live:
                if r is not piv:
                    q = r[col] // piv[col]
                    for k in range(len(r)):
                        r[k] -= q * piv[k]
        live = [r for r in rows if r[col] != 0]
        if live:
            piv = live[0]
            basis.append(piv)
            rows = [r for r in rows if r is not piv]
    return basis


def ideal_gcd(a: FieldElement, b: FieldElement) -> tuple[FieldElement, FieldElement, FieldElement]:
    """A generator g of the ideal (a, b) with g = x*a + y*b, returned as (g, x, y).

    The generator is normalised to its canonical associate.  Works in the
    non-Euclidean rings too: the ideal is treated as a rank-2 Z-lattice and
    an element of norm equal to the ideal norm is found by enumeration.
    """
    f = a.field
    if not a and not b:
        raise FieldError("ideal_gcd(0, 0) is undefined")
    _int_coords(a)
    _int_coords(b)
    if f.ell is None:
        g, x, y = _ext_gcd(int(a.a), int(b.a))
        return f(g), f(x), f(y)
    if not b:
        g = canonical_associate(a)
        return g, g / a, f.zero
    if not a:
        g = canonical_associate(b)
        return g, f.zero, g / b
    gens = [a, a * f.omega, b, b * f.omega]
    rows = []
    for i, z in enumerate(gens):
        coeff = [0, 0, 0, 0]
        coeff[i] = 1
        rows.append([int(z.a), int(z.b)] + coeff)
    basis = _echelon(rows)
    if len(basis) != 2:
        raise FieldError("degenerate ideal lattice")
    r1, r2 = basis
    index = abs(r1[0] * r2[1])
    e1, e2 = f(r1[0], r1[1]), f(r2[0], r2[1])
    G = [
        [e1.norm(), (e1.conj() * e2).real_part()],
        [(e2.conj() * e1).real_part(), e2.norm()],
    ]
    hits = [u for u, v in short_vectors(G, index) if v == index]
    if not hits:
        raise FieldError("no generator found; is the ring a PID?")
    u1, u2 = hits[0]
    g = canonical_associate(u1 * e1 + u2 * e2)
    # coordinates of g in the triangular basis (r1, r2)
    u1 = Fraction(int(g.a), r1[0])
    u2 = (int(g.b) - u1 * r1[1]) / r2[1]
    assert u1.denominator == 1 and u2.denominator == 1
    c = [int(u1) * r1[2 + k] + int(u2) * r2[2 + k] for k in range(4)]
    x = f(c[0], c[1])
    y = f(c[2], c[3])
    if x * a + y * b != g:
        raise FieldError("internal error: Bezout witnesses do not reproduce the generator")
    return g, x, y


def divides(d: FieldElement, z: FieldElement) -> bool:
    if not d:
        return not z
    return (z / d).is_integral


def is_unit(z: FieldElement) -> bool:
    return z.is_integral and z.norm() == 1


class AlgebraicBound:
    """p + q*beta in Q(beta) with beta = sqrt(beta2) > 0, ordered exactly."""

    __slots__ = ("p", "q", "beta2")

    def __init__(self, p, q, beta2):
        self.p = as_fraction(p)
        self.q = as_fraction(q)
        self.beta2 = as_fraction(beta2)

    def _coerce(self, other):
        if isinstance(other, AlgebraicBound):
            if other.beta2 != self.beta2:
                raise FieldError("mixing different Q(beta)")
            return other
        if isinstance(other, (int, Fraction)):
            return AlgebraicBound(other, 0, self.beta2)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgebraicBound(self.p + o.p, self.q + o.q, self.beta2)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicBound(-self.p, -self.q, self.beta2)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgebraicBound(
            self.p * o.p + self.q * o.q * self.beta2, self.p * o.q + self.q * o.p, self.beta2
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgebraicBound(self.p / other, self.q / other, self.beta2)
        return NotImplemented

    def sign(self) -> int:
        p, q = self.p, self.q
        if p >= 0 and q >= 0:
            return 0 if (p == 0 and q == 0) else 1
        if p <= 0 and q <= 0:
            return -1
        d = p * p - q * q * self.beta2
        s = (d > 0) - (d < 0)
        return s if p > 0 else -s

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return (self - o).sign() == 0

    def __hash__(self):
        return hash((self.p, self.q, self.beta2))

    def __lt__(self, other):
        return (self - self._coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - self._coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - self._coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - self._coerce(other)).sign() >= 0

    def __float__(self):
        return float(self.p) + float(self.q) * math.sqrt(float(self.beta2))

    def to_mpf(self, ctx=None):
        import mpmath

        ctx = ctx or mpmath.mp
        b2 = self.beta2
        return ctx.mpf(self.p.numerator) / self.p.denominator + (
            ctx.mpf(self.q.numerator) / self.q.denominator
        ) * ctx.sqrt(ctx.mpf(b2.numerator) / b2.denominator)

    def __repr__(self):
        return f"AlgebraicBound({self.p} + {self.q}*beta, beta^2={self.beta2})"
