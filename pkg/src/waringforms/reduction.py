"""Minimal vectors, weak (HKZ-style) reduction, balancing and balanced-HKZ forms."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from .enumeration import EnumerationError, shortest_vectors
from .linalg import (
    GradedSlice,
    HermitianForm,
    Matrix,
    MatrixError,
    NotPositiveSemidefinite,
    extend_to_unimodular,
    ldl,
    nilpotent_exp,
    schur_complement,
)
from .number_field import AlgebraicBound, FieldElement, FieldSpec, canonical_associate, round_to_ring


class ReductionError(ValueError):
    pass


def _gram_matrix(M) -> Matrix:
    return M.gram if isinstance(M, HermitianForm) else M


def scalar_restriction_gram(M: Matrix) -> list[list[Fraction]]:
    """Rational Gram of O^n viewed as Z^n (for Q) or Z^{2n} with basis 1, omega per slot."""
    f = M.field
    n = M.nrows
    if f.is_rational:
        return [[M[i, j].a for j in range(n)] for i in range(n)]
    basis = [f.one, f.omega]
    G = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for k in range(n):
            m = M[i, k]
            for p in range(2):
                left = basis[p].conj() * m
                for q in range(2):
                    G[2 * i + p][2 * k + q] = (left * basis[q]).real_part()
    return G


def coords_to_vector(field: FieldSpec, x: Sequence[int]) -> list[FieldElement]:
    if field.is_rational:
        return [field(v) for v in x]
    return [field(x[2 * i], x[2 * i + 1]) for i in range(len(x) // 2)]


def normalize_vector(v: Sequence[FieldElement]) -> list[FieldElement]:
    """Unit multiple of v whose first nonzero entry is a canonical associate."""
    lead = next((x for x in v if x), None)
    if lead is None:
        return list(v)
    target = canonical_associate(lead)
    u = target / lead
    return [u * x for x in v]


def vector_key(v: Sequence[FieldElement]) -> tuple:
    """Tie-break order: compare coordinates from the last one backwards by (norm, a, b)."""
    return tuple(x.key() for x in reversed(v))


def shortest_vector(M, node_cap: int | None = None) -> tuple[Fraction, list[FieldElement]]:
    """Minimum of x* M x over nonzero x in O^n and a canonical vector attaining it."""
    G = _gram_matrix(M)
    f = G.field
    try:
        mu, vecs = shortest_vectors(scalar_restriction_gram(G), node_cap=node_cap)
    except EnumerationError as exc:
        if "positive definite" in str(exc):
            raise NotPositiveSemidefinite("shortest_vector needs a positive definite form") from exc
        raise
    cands = {tuple(normalize_vector(coords_to_vector(f, x))) for x in vecs}
    v = min(cands, key=vector_key)
    return mu, list(v)


def all_minimal_vectors(M) -> tuple[Fraction, list[list[FieldElement]]]:
    G = _gram_matrix(M)
    mu, vecs = shortest_vectors(scalar_restriction_gram(G))
    return mu, [coords_to_vector(G.field, x) for x in vecs]


def _embed(V: Matrix, n: int) -> Matrix:
    """diag(I_{n-k}, V)."""
    f = V.field
    k = V.nrows
    off = n - k
    rows = [[f.one if i == j else f.zero for j in range(n)] for i in range(n)]
    for i in range(k):
        for j in range(k):
            rows[off + i][off + j] = V[i, j]
    return Matrix(f, rows)


def weak_reduce(M, certify: bool = True) -> tuple[list[Fraction], Matrix, Matrix]:
    """(h, X, U) with U* M U = X* diag(h) X, U in GL_n(O), X unipotent.

    Each h_i is the minimum of the projection of the lattice orthogonal to the
    first i - 1 basis vectors.  With certify=True every h_i is re-derived by an
    independent enumeration on the final Gram matrix.
    """
    G = _gram_matrix(M)
    if not G.is_hermitian():
        raise MatrixError("weak_reduce needs a hermitian Gram matrix")
    f = G.field
    n = G.nrows
    U = Matrix.identity(f, n)
    cur = G
    for i in range(n):
        S = schur_complement(cur, i)
        _, v = shortest_vector(S)
        if all(x == (1 if k == 0 else 0) for k, x in enumerate(v)):
            continue
        full = _embed(extend_to_unimodular(v), n)
        U = U @ full
        cur = full.H @ cur @ full
    X, h = ldl(cur)
    if U.H @ G @ U != X.H @ Matrix.diag(f, h) @ X:
        raise ReductionError("internal error: U* M U != X* H X")
    if certify:
        for i in range(n):
            mu, _ = shortest_vector(schur_complement(cur, i))
            if mu != h[i]:
                raise ReductionError(f"h_{i + 1} = {h[i]} is not the projected minimum {mu}")
    return h, X, U


def balance(X: Matrix) -> tuple[Matrix, list[GradedSlice]]:
    """Integral unipotent Y and slices Z_k with X Y = exp(Z_1) ... exp(Z_{n-1}).

    Stage k reads off the k-th superdiagonal of X(I + Y_1 + ... + Y_{k-1})
    minus exp(Z_1)...exp(Z_{k-1}), and rounds it into the ring.
    """
    if not X.is_unipotent():
        raise MatrixError("balance needs a unipotent upper-triangular matrix")
    f = X.field
    n = X.nrows
    Y = Matrix.identity(f, n)
    B = Matrix.identity(f, n)
    slices: list[GradedSlice] = []
    for k in range(1, n):
        D = X @ Y - B
        for j in range(k):
            if any(D[i, i + j] for i in range(n - j)):
                raise ReductionError("internal error: congruence mod A_k lost")
        Xk = [D[i, i + k] for i in range(n - k)]
        ys, zs = [], []
        for x in Xk:
            c, eta = round_to_ring(x)
            ys.append(-c)
            zs.append(eta)
        Yk = GradedSlice(k, tuple(ys)).to_matrix(f, n)
        Zk = GradedSlice(k, tuple(zs))
        Y = Y + Yk
        B = B @ nilpotent_exp(Zk.to_matrix(f, n))
        slices.append(Zk)
    if X @ Y != B:
        raise ReductionError("internal error: X Y != prod exp(Z_k)")
    return Y, slices


def exp_product(field: FieldSpec, n: int, slices: Sequence[GradedSlice], inverse: bool = False) -> Matrix:
    """prod_k exp(Z_k), or prod_k exp(-Z_{n-k}) in reverse order for the inverse."""
    P = Matrix.identity(field, n)
    seq = list(reversed(slices)) if inverse else list(slices)
    for Z in seq:
        Zm = Z.to_matrix(field, n)
        P = P @ nilpotent_exp(-Zm if inverse else Zm)
    return P


@dataclass
class ReducedForm:
    """Balanced-HKZ data: U* M U = T* diag(H) T with T = X Y = prod exp(Z_k)."""

    H: list[Fraction]
    T: Matrix
    U: Matrix
    source: HermitianForm
    X: Matrix
    Y: Matrix
    slices: list[GradedSlice] = dc_field(default_factory=list)

    @property
    def field(self) -> FieldSpec:
        return self.T.field

    @property
    def n(self) -> int:
        return self.T.nrows

    def reduced_gram(self) -> Matrix:
        return self.T.H @ Matrix.diag(self.field, self.H) @ self.T

    def T_inverse(self) -> Matrix:
        return self.T.unipotent_inverse()

    def check_reconstruction(self) -> bool:
        U = self.U
        return U.H @ self.source.gram @ U == self.reduced_gram()

    def check_factorization(self) -> bool:
        return exp_product(self.field, self.n, self.slices) == self.T

    def check_alpha_bounds(self) -> list[tuple[int, int]]:
        """Pairs (i, j) violating h_i / h_j <= alpha(j - i); empty when all hold."""
        from .bounds import alpha

        bad = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.H[i] / self.H[j] > alpha(self.field, j - i):
                    bad.append((i, j))
        return bad

    def check_entry_bounds(self) -> list[tuple[str, int, int]]:
        """Entries of T or T^{-1} with |t_ij|^2 > c(j - i)^2, compared in Q(beta)."""
        f = self.field
        bad = []
        for name, mat in (("T", self.T), ("T^-1", self.T_inverse())):
            bad.extend((name, i, j) for i, j in entry_bound_violations(mat, f))
        return bad

    def check_minimum(self) -> bool:
        mu, _ = shortest_vector(self.source)
        return mu == self.H[0]

    def report(self) -> dict:
        return {
            "reconstruction": self.check_reconstruction(),
            "factorization": self.check_factorization(),
            "h1_is_minimum": self.check_minimum(),
            "alpha_violations": [list(p) for p in self.check_alpha_bounds()],
            "entry_bound_violations": [list(p) for p in self.check_entry_bounds()],
        }


def entry_bound_violations(mat: Matrix, field: FieldSpec) -> list[tuple[int, int]]:
    """Positions i < j with N(mat_ij) > c(j - i)^2, decided exactly in Q(beta)."""
    from .bounds import maclaurin_c

    n = mat.nrows
    bad = []
    for i in range(n):
        for j in range(i + 1, n):
            c = maclaurin_c(field, j - i)
            if AlgebraicBound(mat[i, j].norm(), 0, field.beta2) > c * c:
                bad.append((i, j))
    return bad


def balanced_hkz(M, certify: bool = True) -> ReducedForm:
    """weak_reduce followed by balance; U_total = U Y."""
    form = M if isinstance(M, HermitianForm) else HermitianForm(M, check_integral=False)
    h, X, U = weak_reduce(form, certify=certify)
    Y, slices = balance(X)
    T = X @ Y
    red = ReducedForm(H=h, T=T, U=U @ Y, source=form, X=X, Y=Y, slices=slices)
    if certify and not red.check_reconstruction():
        raise ReductionError("internal error: reconstruction identity fails")
    return red
