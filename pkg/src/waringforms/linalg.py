"""Exact matrices over E, hermitian forms, and the graded triangular algebra.

Conventions: M* is the conjugate transpose, a form with Gram M takes the value
x* M x, and a representation R of M satisfies M = R* R.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

import mpmath

from .number_field import FieldElement, FieldError, FieldSpec, ideal_gcd, is_unit


class MatrixError(ValueError):
    pass


class NotPositiveSemidefinite(MatrixError):
    pass


def _elt(field: FieldSpec, x) -> FieldElement:
    if isinstance(x, FieldElement):
        if x.field.ell != field.ell:
            raise FieldError("matrix entry from another field")
        return x
    return FieldElement(field, x, 0)


class Matrix:
    """Immutable dense matrix with FieldElement entries."""

    __slots__ = ("field", "rows", "_ncols")

    def __init__(self, field: FieldSpec, rows: Iterable[Iterable], ncols: int | None = None):
        object.__setattr__(self, "field", field)
        rows = tuple(tuple(_elt(field, x) for x in r) for r in rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise MatrixError("ragged matrix")
        if rows:
            ncols = len(rows[0])
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_ncols", ncols or 0)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field: FieldSpec, r: int, c: int) -> "Matrix":
        return cls(field, [[0] * c for _ in range(r)], c)

    @classmethod
    def diag(cls, field: FieldSpec, entries: Sequence) -> "Matrix":
        n = len(entries)
        return cls(field, [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> tuple[FieldElement, ...]:
        return self.rows[i]

    def col(self, j: int) -> tuple[FieldElement, ...]:
        return tuple(r[j] for r in self.rows)

    def to_lists(self) -> list[list[FieldElement]]:
        return [list(r) for r in self.rows]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field.ell == other.field.ell and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise MatrixError("shape mismatch in +")
        return Matrix(self.field, [[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise MatrixError("shape mismatch in -")
        return Matrix(self.field, [[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, [[-x for x in r] for r in self.rows], self.ncols)

    def scale(self, c) -> "Matrix":
        c = _elt(self.field, c)
        return Matrix(self.field, [[c * x for x in r] for r in self.rows], self.ncols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise MatrixError(f"cannot multiply {self.shape} by {other.shape}")
        zero = self.field.zero
        cols = list(zip(*other.rows)) if other.rows else [()] * other.ncols
        out = []
        for r in self.rows:
            nz = [(k, x) for k, x in enumerate(r) if x]
            row = []
            for c in cols:
                acc = zero
                for k, x in nz:
                    y = c[k]
                    if y:
                        acc = acc + x * y
                row.append(acc)
            out.append(row)
        return Matrix(self.field, out, other.ncols)

    @property
    def H(self) -> "Matrix":
        """Conjugate transpose."""
        return Matrix(self.field, [[r[j].conj() for r in self.rows] for j in range(self.ncols)], self.nrows)

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, [[r[j] for r in self.rows] for j in range(self.ncols)], self.nrows)

    def conj(self) -> "Matrix":
        return Matrix(self.field, [[x.conj() for x in r] for r in self.rows], self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(self.field, [[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_hermitian(self) -> bool:
        if not self.is_square():
            return False
        n = self.nrows
        return all(self.rows[i][j] == self.rows[j][i].conj() for i in range(n) for j in range(i, n))

    def is_integral(self) -> bool:
        return all(x.is_integral for r in self.rows for x in r)

    def is_upper(self) -> bool:
        return all(not self.rows[i][j] for i in range(self.nrows) for j in range(min(i, self.ncols)))

    def is_strictly_upper(self) -> bool:
        return self.is_upper() and all(not self.rows[i][i] for i in range(min(self.nrows, self.ncols)))

    def is_unipotent(self) -> bool:
        return self.is_square() and self.is_upper() and all(self.rows[i][i] == 1 for i in range(self.nrows))

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def max_norm(self) -> Fraction:
        return max((x.norm() for r in self.rows for x in r), default=Fraction(0))

    def det(self) -> FieldElement:
        if not self.is_square():
            raise MatrixError("det of non-square matrix")
        a = self.to_lists()
        n = len(a)
        d = self.field.one
        for i in range(n):
            p = next((r for r in range(i, n) if a[r][i]), None)
            if p is None:
                return self.field.zero
            if p != i:
                a[i], a[p] = a[p], a[i]
                d = -d
            piv = a[i][i]
            d = d * piv
            for r in range(i + 1, n):
                if a[r][i]:
                    f = a[r][i] / piv
                    a[r] = [x - f * y for x, y in zip(a[r], a[i])]
        return d

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise MatrixError("inverse of non-square matrix")
        n = self.nrows
        one, zero = self.field.one, self.field.zero
        a = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(self.rows)]
        for i in range(n):
            p = next((r for r in range(i, n) if a[r][i]), None)
            if p is None:
                raise MatrixError("singular matrix")
            a[i], a[p] = a[p], a[i]
            piv = a[i][i]
            a[i] = [x / piv for x in a[i]]
            for r in range(n):
                if r != i and a[r][i]:
                    f = a[r][i]
                    a[r] = [x - f * y for x, y in zip(a[r], a[i])]
        return Matrix(self.field, [r[n:] for r in a])

    def unipotent_inverse(self) -> "Matrix":
        """Inverse of a unipotent upper-triangular matrix by back substitution."""
        if not self.is_unipotent():
            raise MatrixError("not unipotent")
        n = self.nrows
        zero = self.field.zero
        inv = [[self.field.one if i == j else zero for j in range(n)] for i in range(n)]
        for j in range(n):
            for i in range(j - 1, -1, -1):
                acc = zero
                for k in range(i + 1, j + 1):
                    if self.rows[i][k]:
                        acc = acc + self.rows[i][k] * inv[k][j]
                inv[i][j] = -acc
        return Matrix(self.field, inv)

    def gram(self) -> "Matrix":
        """R* R."""
        return self.H @ self

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix({self.field}, [{body}])"


def matrix(field: FieldSpec, rows) -> Matrix:
    return rows if isinstance(rows, Matrix) else Matrix(field, rows)


# ---------------------------------------------------------------------------
# hermitian forms


class HermitianForm:
    """Integral hermitian Gram matrix over the ring of integers."""

    __slots__ = ("gram", "name")

    def __init__(self, gram: Matrix, name: str | None = None, *, check_integral: bool = True):
        if not gram.is_square():
            raise MatrixError("Gram matrix must be square")
        if not gram.is_hermitian():
            for i in range(gram.nrows):
                for j in range(gram.ncols):
                    if gram[i, j] != gram[j, i].conj():
                        raise MatrixError(f"Gram matrix is not hermitian at entry ({i}, {j})")
        if check_integral and not gram.is_integral():
            raise MatrixError("Gram matrix entries must lie in the ring of integers")
        self.gram = gram
        self.name = name

    @classmethod
    def from_rows(cls, field: FieldSpec, rows, name=None) -> "HermitianForm":
        return cls(Matrix(field, rows), name)

    @property
    def field(self) -> FieldSpec:
        return self.gram.field

    @property
    def n(self) -> int:
        return self.gram.nrows

    def value(self, x: Sequence) -> Fraction:
        """x* M x for a coefficient vector x."""
        f = self.field
        v = Matrix(f, [[xi] for xi in x])
        val = (v.H @ self.gram @ v)[0, 0]
        return val.a

    def discriminant(self) -> FieldElement:
        return self.gram.det()

    def is_positive_definite(self) -> bool:
        try:
            _, h = ldl(self.gram)
        except NotPositiveSemidefinite:
            return False
        return all(x > 0 for x in h)

    def transform(self, U: Matrix) -> "HermitianForm":
        """The form with Gram U* M U."""
        return HermitianForm(U.H @ self.gram @ U, self.name, check_integral=False)

    def scaled(self, s: int) -> "HermitianForm":
        return HermitianForm(self.gram.scale(s), self.name)

    def __eq__(self, other):
        return isinstance(other, HermitianForm) and self.gram == other.gram

    def __repr__(self):
        return f"HermitianForm({self.gram!r})"


# ---------------------------------------------------------------------------
# exact factorizations


def ldl(M: Matrix) -> tuple[Matrix, list[Fraction]]:
    """M = X* diag(h) X with X unipotent upper triangular, for M positive definite.

    Raises NotPositiveSemidefinite as soon as a pivot is not positive.
    """
    if not M.is_hermitian():
        raise MatrixError("ldl needs a hermitian matrix")
    f = M.field
    n = M.nrows
    X = [[f.one if i == j else f.zero for j in range(n)] for i in range(n)]
    h: list[Fraction] = []
    for i in range(n):
        d = M[i, i]
        for k in range(i):
            if X[k][i]:
                d = d - X[k][i].norm() * h[k]
        if d.b != 0 or d.a <= 0:
            raise NotPositiveSemidefinite(f"pivot {i} is {d}")
        h.append(d.a)
        for j in range(i + 1, n):
            acc = M[i, j]
            for k in range(i):
                if X[k][i] and X[k][j]:
                    acc = acc - X[k][i].conj() * X[k][j] * h[k]
            X[i][j] = acc / d.a
    return Matrix(f, X), h


def is_positive_semidefinite(M: Matrix) -> bool:
    """Exact decision by pivoted LDL*; a zero pivot forces its row to vanish."""
    if not M.is_hermitian():
        raise MatrixError("is_positive_semidefinite needs a hermitian matrix")
    a = M.to_lists()
    idx = list(range(M.nrows))
    while idx:
        diag = {i: a[i][i].a for i in idx}
        if any(v < 0 for v in diag.values()):
            return False
        zero = [i for i in idx if diag[i] == 0]
        for i in zero:
            if any(a[i][j] for j in idx):
                return False
        idx = [i for i in idx if diag[i] != 0]
        if not idx:
            return True
        p = max(idx, key=lambda i: diag[i])
        piv = diag[p]
        rest = [i for i in idx if i != p]
        for i in rest:
            if not a[i][p]:
                continue
            fi = a[i][p] / piv
            for j in rest:
                if a[p][j]:
                    a[i][j] = a[i][j] - fi * a[p][j]
        idx = rest
    return True


def schur_complement(M: Matrix, k: int) -> Matrix:
    """Gram of the projection of basis vectors k.. away from the span of 0..k-1."""
    n = M.nrows
    if k == 0:
        return M
    A = M.submatrix(range(k), range(k))
    B = M.submatrix(range(k), range(k, n))
    C = M.submatrix(range(k, n), range(k, n))
    return C - B.H @ A.inverse() @ B


# ---------------------------------------------------------------------------
# graded triangular algebra


@dataclass(frozen=True)
class GradedSlice:
    """The k-th superdiagonal of an n x n matrix: an element of T_k."""

    k: int
    entries: tuple[FieldElement, ...]

    @property
    def n(self) -> int:
        return len(self.entries) + self.k

    @classmethod
    def of(cls, M: Matrix, k: int) -> "GradedSlice":
        n = M.nrows
        return cls(k, tuple(M[i, i + k] for i in range(n - k)))

    def to_matrix(self, field: FieldSpec, n: int | None = None) -> Matrix:
        n = self.n if n is None else n
        rows = [[field.zero] * n for _ in range(n)]
        for i, x in enumerate(self.entries):
            if i + self.k < n:
                rows[i][i + self.k] = x
        return Matrix(field, rows)


def grade(M: Matrix) -> int:
    """Largest k with M in A_k (n for the zero matrix); requires M upper triangular."""
    n = M.nrows
    for k in range(n):
        if any(M[i, i + k] for i in range(n - k)):
            return k
    return n


def shift_matrix(field: FieldSpec, n: int) -> Matrix:
    """D = sum_i E_{i,i+1}."""
    return Matrix(field, [[1 if j == i + 1 else 0 for j in range(n)] for i in range(n)])


def nilpotent_exp(Z: Matrix) -> Matrix:
    """exp(Z) = sum_{m<n} Z^m/m! for strictly upper triangular Z."""
    if not Z.is_square() or not Z.is_strictly_upper():
        raise MatrixError("nilpotent_exp needs a strictly upper triangular matrix")
    n = Z.nrows
    f = Z.field
    result = Matrix.identity(f, n)
    power = Matrix.identity(f, n)
    for m in range(1, n):
        power = power @ Z
        if power.is_zero():
            break
        result = result + power.scale(Fraction(1, factorial(m)))
    return result


# ---------------------------------------------------------------------------
# numerical Cholesky


def _to_mp(x: FieldElement, ctx, omega):
    a = ctx.mpf(x.a.numerator) / x.a.denominator
    if x.field.ell is None:
        return a
    b = ctx.mpf(x.b.numerator) / x.b.denominator
    return a + b * omega


def mp_omega(field: FieldSpec, ctx):
    if field.ell is None:
        return ctx.mpf(1)
    r = ctx.sqrt(field.ell)
    if field.ell % 4 == 3:
        return ctx.mpc(ctx.mpf(1) / 2, r / 2)
    return ctx.mpc(0, r)


def cholesky_upper(M: Matrix, bits: int = 128) -> list[list]:
    """Upper-triangular W with W* W = M, entries carried at bits + 32 binary digits.

    M must be hermitian positive semidefinite; this is checked exactly first.
    Returns mpmath numbers (mpf for Q, mpc otherwise).
    """
    if not is_positive_semidefinite(M):
        raise NotPositiveSemidefinite("cholesky_upper needs a positive semidefinite matrix")
    ctx = mpmath.mp.clone()
    ctx.prec = bits + 32
    omega = mp_omega(M.field, ctx)
    n = M.nrows
    m = [[_to_mp(M[i, j], ctx, omega) for j in range(n)] for i in range(n)]
    real = M.field.ell is None
    zero = ctx.mpf(0)
    W = [[zero] * n for _ in range(n)]
    for i in range(n):
        s = m[i][i]
        for k in range(i):
            s -= abs(W[k][i]) ** 2
        s = ctx.re(s) if not real else s
        if s <= 0:
            continue  # row stays zero on the kernel
        d = ctx.sqrt(s)
        W[i][i] = d
        for j in range(i + 1, n):
            t = m[i][j]
            for k in range(i):
                t -= (ctx.conj(W[k][i]) if not real else W[k][i]) * W[k][j]
            W[i][j] = t / d
    return W


def mp_to_coords(z, field: FieldSpec) -> tuple[Fraction, Fraction]:
    """Rational coordinates (a, b) with a + b*omega close to the complex number z.

    The real and imaginary parts are read exactly; only the division by
    sqrt(ell) is rounded, at a precision above that of z.
    """
    if hasattr(z, "_mpc_"):
        re_raw, im_raw = z._mpc_
    else:
        raw = z._mpf_ if hasattr(z, "_mpf_") else mpmath.mpf(z)._mpf_
        re_raw, im_raw = raw, mpmath.libmp.fzero
    re = _raw_frac(re_raw)
    if field.ell is None:
        return re, Fraction(0)
    prec = max(mpmath.mp.prec, im_raw[3] + 64 if im_raw[1] else 0, 64)
    ctx = mpmath.mp.clone()
    ctx.prec = prec
    y = ctx.mpf(im_raw) / ctx.sqrt(field.ell)
    if field.ell % 4 == 3:
        b = _raw_frac((2 * y)._mpf_)
        return re - b / 2, b
    return re, _raw_frac(y._mpf_)


def _raw_frac(raw) -> Fraction:
    p, q = mpmath.libmp.to_rational(raw)
    return Fraction(int(p), int(q))


def residual_max(M: Matrix, W: list[list]) -> Fraction:
    """Exact max |M - W* W| entry norm, W converted exactly from binary floats (Q only)."""
    n = M.nrows
    f = M.field
    Wf = [[f(*mp_to_coords(W[i][j], f)) for j in range(n)] for i in range(n)]
    R = M - Matrix(f, Wf).H @ Matrix(f, Wf)
    return R.max_norm()


# ---------------------------------------------------------------------------
# unimodular completion


def extend_to_unimodular(v: Sequence[FieldElement]) -> Matrix:
    """A matrix in GL_n(O) whose first column is v; v must be primitive."""
    if not v:
        raise MatrixError("empty vector")
    f = v[0].field
    v = [x if isinstance(x, FieldElement) else f(x) for x in v]
    n = len(v)
    for x in v:
        if not x.is_integral:
            raise MatrixError(f"entry {x} is not integral")
    # W accumulates row operations with W v = (g, 0, ..., 0)
    W = [[f.one if i == j else f.zero for j in range(n)] for i in range(n)]
    cur = list(v)
    for k in range(1, n):
        a, b = cur[0], cur[k]
        if not b:
            continue
        if not a:
            W[0], W[k] = W[k], [-x for x in W[0]]
            cur[0], cur[k] = b, -a
            continue
        g, x, y = ideal_gcd(a, b)
        ap, bp = a / g, b / g
        r0 = [x * p + y * q for p, q in zip(W[0], W[k])]
        rk = [-bp * p + ap * q for p, q in zip(W[0], W[k])]
        W[0], W[k] = r0, rk
        cur[0], cur[k] = g, f.zero
    g = cur[0]
    if not is_unit(g):
        raise MatrixError(f"vector is not primitive: its entries generate the ideal ({g})")
    ginv = f.one / g
    W[0] = [ginv * x for x in W[0]]
    V = Matrix(f, W).inverse()
    if list(V.col(0)) != v or not is_unit(V.det()):
        raise MatrixError("internal error in unimodular completion")
    return V
