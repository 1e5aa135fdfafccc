"""End-to-end decomposition of large-minimum forms, representation compression, and scaling."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Union

from .bounds import BoundsProfile, certify_constants
from .linalg import (
    HermitianForm,
    Matrix,
    cholesky_upper,
    extend_to_unimodular,
    is_positive_semidefinite,
    mp_to_coords,
)
from .number_field import FieldSpec, round_to_ring
from .oracle import NotFoundWithin, SearchBudget, search_representation
from .reduction import balanced_hkz, shortest_vector
from .representation import Representation, RepresentationError, rows_gram, verify
from .sos_core import (
    BlockError,
    PremiseViolation,
    assemble_lemma51,
    check_premises,
    expand_blocks,
    four_squares,
)

__all__ = [
    "Caps",
    "Success",
    "BelowThreshold",
    "BlockFailure",
    "DecomposeOutcome",
    "Representation",
    "verify",
    "decompose",
    "compress_representation",
    "scale_form",
    "default_profile",
]


@dataclass(frozen=True)
class Caps:
    """Limits for one decompose call.

    start_bits/max_bits bound the Cholesky precision retry loop; oracle is the
    budget of the exhaustive fallback; force_pipeline runs the block pipeline
    even when the minimum is below G_E(n).
    """

    start_bits: int = 128
    max_bits: int = 1024
    oracle: SearchBudget = SearchBudget(g_max=8, node_cap=200_000, time_cap=20.0)
    block_strategy: str = "auto"
    force_pipeline: bool = False
    threads: int = 1


@dataclass
class Success:
    representation: Representation
    trace: dict = dc_field(default_factory=dict)

    @property
    def g(self) -> int:
        return self.representation.g


@dataclass
class BelowThreshold:
    mu: Fraction
    G: Fraction
    fallback: Union[Representation, NotFoundWithin, None]
    trace: dict = dc_field(default_factory=dict)


@dataclass
class BlockFailure:
    details: str
    fallback: Union[Representation, NotFoundWithin, None] = None
    trace: dict = dc_field(default_factory=dict)


DecomposeOutcome = Union[Success, BelowThreshold, BlockFailure]


@functools.lru_cache(maxsize=None)
def default_profile(field: FieldSpec) -> BoundsProfile:
    return certify_constants(field, 200)


def scale_form(M: HermitianForm, s: int) -> HermitianForm:
    """s M, the Gram matrix of sqrt(s) L."""
    if s < 1:
        raise ValueError("scale factor must be a positive integer")
    return M.scaled(int(s))


def _rows_times(rows, V: Matrix):
    f = V.field
    n = V.ncols
    out = []
    for r in rows:
        out.append([sum((r[i] * V[i, k] for i in range(len(r)) if r[i]), f.zero) for k in range(n)])
    return out


def _targets(profile: BoundsProfile, n: int) -> dict:
    return {"paper_target": profile.target_rows(n), "constructive_bound": 6 * n * n}


def _identity_check(M: HermitianForm) -> bool:
    return M.gram == Matrix.identity(M.field, M.n)


def _split_t(a: list[int], n: int) -> list[list[int]]:
    """t_ij = floor(a_i / n) for j != i, the remainder on t_ii."""
    t = []
    for i, ai in enumerate(a):
        base = ai // n
        row = [base] * n
        row[i] = ai - base * (n - 1)
        t.append(row)
    return t


def _sij_bound_ok(S: Matrix, H, profile: BoundsProfile, n: int) -> bool:
    """N(s_ij) <= 9 n^4 beta^2 cbar(j)^2 abar(n) h_j for i <= j, all quantities rational."""
    b2 = profile.field.beta2
    ab = profile.alpha_bar(n)
    for j in range(n):
        cb = profile.c_bar(j + 1)
        lim = 9 * n**4 * b2 * cb * cb * ab * H[j]
        for i in range(j + 1):
            if S[i, j].norm() > lim:
                return False
    return True


def _fallback(M: HermitianForm, caps: Caps):
    try:
        return search_representation(M, caps.oracle)
    except ValueError:
        return None


def decompose(M: HermitianForm, profile: BoundsProfile | None = None, caps: Caps | None = None) -> DecomposeOutcome:
    """Represent M as a sum of norms of integral linear forms.

    When mu(M) >= G_E(n) the reduce / split / round / assemble pipeline runs
    and the result is verified exactly against M.  Below the threshold the
    exhaustive oracle is tried within caps and BelowThreshold is returned.
    """
    caps = caps or Caps()
    f = M.field
    profile = profile or default_profile(f)
    n = M.n
    if not M.gram.is_integral():
        raise ValueError("decompose needs an integral form")
    if not M.is_positive_definite():
        raise ValueError("decompose needs a positive definite form")
    trace: dict = {"n": n, "field": f.to_json()}
    if _identity_check(M):
        rep = Representation([[f.one if i == j else f.zero for j in range(n)] for i in range(n)], M)
        trace["path"] = "identity"
        return Success(rep, trace)
    if n == 1:
        rows = [[f(c)] for c in four_squares(int(M.gram[0, 0].a)) if c]
        trace["path"] = "four-squares"
        return Success(_checked(Representation(rows, M)), trace)

    red = balanced_hkz(M)
    mu = red.H[0]
    G = profile.G(n)
    trace.update({"mu": mu, "G": G, "h": list(red.H), **_targets(profile, n)})
    if mu < G and not caps.force_pipeline:
        trace["path"] = "below-threshold"
        return BelowThreshold(mu, G, _fallback(M, caps), trace)
    trace["path"] = "pipeline" if mu >= G else "pipeline-forced"

    Mp = red.reduced_gram()
    ab = profile.alpha_bar(n)
    a = []
    for k in range(1, n + 1):
        cb = profile.c_bar(n - k)
        q = red.H[k - 1] / (n * n * ab * cb * cb)
        a.append(q.numerator // q.denominator)
    A = Matrix.diag(f, a)
    trace["a"] = a
    if not is_positive_semidefinite(Mp - A):
        trace["failure"] = "M' - A is not positive semidefinite"
        return BlockFailure(trace["failure"], _fallback(M, caps), trace)

    t = _split_t(a, n)
    sigma = 0 if f.is_rational else f.sigma
    bits = caps.start_bits
    last_error = None
    S = P = None
    while bits <= caps.max_bits:
        W = cholesky_upper(Mp - A, bits)
        P = Matrix(f, [[round_to_ring(f(*mp_to_coords(W[i][j], f)))[0] if j >= i else f.zero for j in range(n)] for i in range(n)])
        S = Mp - A - P.H @ P
        try:
            check_premises(a, S, t, sigma, slack_factor=4)
            last_error = None
            break
        except PremiseViolation as exc:
            last_error = str(exc)
            bits *= 2
    trace["bits"] = bits
    if last_error is not None:
        trace["failure"] = f"premise check failed at every precision: {last_error}"
        return BlockFailure(trace["failure"], _fallback(M, caps), trace)
    trace["sij_bound_holds"] = _sij_bound_ok(S, red.H, profile, n)

    try:
        dec = assemble_lemma51(a, S, t, sigma)
        rows, report = expand_blocks(dec, caps.block_strategy, threads=caps.threads)
    except (PremiseViolation, BlockError) as exc:
        trace["failure"] = str(exc)
        return BlockFailure(str(exc), _fallback(M, caps), trace)
    rows += [list(P.row(i)) for i in range(n)]
    trace["blocks"] = report
    trace["diag"] = dec.diag
    if rows_gram(f, rows, n) != Mp:
        raise AssertionError("pipeline rows do not reproduce the reduced Gram matrix")
    Uinv = red.U.inverse()
    rep = _checked(Representation(_rows_times(rows, Uinv), M))
    trace["g"] = rep.g
    trace["achieved_vs_target_g"] = {"achieved": rep.g, **_targets(profile, n)}
    return Success(rep, trace)


def _checked(rep: Representation) -> Representation:
    if not rep.verify():
        raise AssertionError("representation failed exact verification")
    return rep


def compress_representation(M: HermitianForm, R: Representation, profile: BoundsProfile | None = None) -> Representation:
    """Shrink a representation by peeling off a minimal vector, never increasing g.

    If mu(M) >= G_E(n) the pipeline output replaces R when it is shorter.
    Otherwise, in a basis whose first vector is minimal, the rows with nonzero
    first coefficient number at most mu < G_E(n); the remaining rows live on the
    last n - 1 coordinates and are compressed recursively.
    """
    R = Representation(R.rows, M)
    if not R.verify():
        raise RepresentationError("input rows do not represent the form")
    profile = profile or default_profile(M.field)
    out = _compress(M, list(R.rows), profile)
    rep = _checked(Representation(out, M))
    return rep if rep.g <= R.g else R


def _compress(M: HermitianForm, rows: list, profile: BoundsProfile) -> list:
    f = M.field
    n = M.n
    rows = [list(r) for r in rows if any(r)]
    if n == 0 or not rows:
        return rows
    if n == 1:
        sq = [[f(c)] for c in four_squares(int(M.gram[0, 0].a)) if c]
        return sq if len(sq) < len(rows) else rows
    if not M.is_positive_definite():
        return rows
    mu, v = shortest_vector(M)
    if n <= profile.certification_range and mu >= profile.G(n):
        out = decompose(M, profile)
        if isinstance(out, Success) and out.g < len(rows):
            return [list(r) for r in out.representation.rows]
        return rows
    V = extend_to_unimodular(v)
    Vinv = V.inverse()
    moved = _rows_times(rows, V)
    head = [r for r in moved if r[0]]
    tail = [r[1:] for r in moved if not r[0]]
    if tail:
        tail_gram = rows_gram(f, tail, n - 1)
        new_tail = _compress(HermitianForm(tail_gram, check_integral=False), tail, profile)
        if len(new_tail) < len(tail):
            tail = new_tail
    combined = head + [[f.zero] + list(r) for r in tail]
    back = _rows_times(combined, Vinv)
    return back if len(back) <= len(rows) else rows
