"""Block-level sums of norms: four squares, residue splitting, rank-two blocks and the A + S assembly."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import isqrt
from typing import Sequence

from .linalg import HermitianForm, Matrix, is_positive_semidefinite
from .number_field import FieldElement, FieldSpec, round_to_ring
from .oracle import NotFoundWithin, SearchBudget, search_representation
from .representation import Representation


class BlockError(ValueError):
    """A rank-two block could not be represented; the reduced block is attached."""

    def __init__(self, message: str, block: Matrix | None = None):
        super().__init__(message)
        self.block = block


class ConstructiveSlackInsufficient(BlockError):
    pass


class SearchBudgetExceeded(BlockError):
    pass


class PremiseViolation(ValueError):
    pass


# ---------------------------------------------------------------------------
# sums of two and four integer squares


def _factor(m: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def _prime_two_squares(p: int) -> tuple[int, int]:
    """x^2 + y^2 = p for a prime p = 1 mod 4 (Hermite-Serret descent)."""
    c = 2
    while pow(c, (p - 1) // 2, p) != p - 1:
        c += 1
    x = pow(c, (p - 1) // 4, p)
    a, b = p, x
    while b * b > p:
        a, b = b, a % b
    y = isqrt(p - b * b)
    return b, y


def two_squares(m: int) -> tuple[int, int] | None:
    """(x, y) with x >= y >= 0 and x^2 + y^2 = m, or None when m is not a sum of two squares."""
    if m < 0:
        return None
    if m == 0:
        return (0, 0)
    re, im = 1, 0
    for p, e in _factor(m).items():
        if p % 4 == 3:
            if e % 2:
                return None
            re, im = re * p ** (e // 2), im * p ** (e // 2)
            continue
        x, y = (1, 1) if p == 2 else _prime_two_squares(p)
        for _ in range(e):
            re, im = re * x - im * y, re * y + im * x
    x, y = abs(re), abs(im)
    return (max(x, y), min(x, y))


def _is_three_square(m: int) -> bool:
    if m < 0:
        return False
    while m and m % 4 == 0:
        m //= 4
    return m % 8 != 7


def four_squares(b: int) -> tuple[int, int, int, int]:
    """c1 >= c2 >= c3 >= c4 >= 0 with c1^2 + c2^2 + c3^2 + c4^2 = b.

    Factors of 4 are stripped first.  The leading squares are then chosen as
    large as possible, which keeps the remainders of size about sqrt(b), so the
    final two-square step only ever factors small numbers.
    """
    b = int(b)
    if b < 0:
        raise ValueError("four_squares needs b >= 0")
    if b == 0:
        return (0, 0, 0, 0)
    scale = 1
    while b % 4 == 0:
        b //= 4
        scale *= 2
    c1 = isqrt(b)
    while not _is_three_square(b - c1 * c1):
        c1 -= 1
    m = b - c1 * c1
    c2 = isqrt(m)
    while True:
        two = two_squares(m - c2 * c2)
        if two is not None:
            break
        c2 -= 1
    out = sorted((c1 * scale, c2 * scale, two[0] * scale, two[1] * scale), reverse=True)
    assert sum(c * c for c in out) == b * scale * scale
    return tuple(out)


# ---------------------------------------------------------------------------
# residue splitting and the unit-pattern matrix


def _ints(z: FieldElement) -> tuple[int, int]:
    if not z.is_integral:
        raise PremiseViolation(f"{z} is not in the ring of integers")
    return int(z.a), int(z.b)


def pset_split(s: FieldElement, sigma: int) -> tuple[FieldElement, FieldElement]:
    """s = p + 2^sigma q with p = a + b*omega, |a|, |b| <= 2^(sigma+1) - 1 and N(s) >= N(2^sigma q).

    Among admissible p the one minimizing N(s - p) is taken, then the smallest
    (N(p), |a|, |b|, a, b).
    """
    f = s.field
    if f.is_rational:
        raise ValueError("pset_split is defined for imaginary quadratic fields")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    sa, sb = _ints(s)
    m = 1 << sigma
    lim = 2 * m - 1

    def residues(x: int) -> list[int]:
        r = x % m
        return [v for v in range(r - 2 * m, lim + 1, m) if -lim <= v <= lim]

    best = None
    for pa in residues(sa):
        for pb in residues(sb):
            p = f(pa, pb)
            d = (s - p).norm()
            key = (d, p.norm(), abs(pa), abs(pb), pa, pb)
            if best is None or key < best[0]:
                best = (key, p)
    if best is None or best[0][0] > s.norm():
        raise ArithmeticError(f"no admissible residue for {s} with sigma = {sigma}")
    p = best[1]
    q = (s - p) / m
    return p, q


def two_by_two_T(p: FieldElement) -> tuple[int, int, Matrix]:
    """(n_ij, n_ji, T) with T T* = [[n_ij, p], [p*, n_ji]].

    T is 2 x (|a| + |b|): |a| columns (e_a, 1), floor(|b|/2) columns (e_b w, 1)
    and ceil(|b|/2) columns (e_b, w*), where e_a, e_b are the signs of a, b.
    """
    f = p.field
    a, b = _ints(p)
    Nw = 1 if f.is_rational else f.norm_omega
    ea = 1 if a >= 0 else -1
    eb = 1 if b >= 0 else -1
    lo, hi = abs(b) // 2, abs(b) - abs(b) // 2
    n_ij = abs(a) + lo * Nw + hi
    n_ji = abs(a) + lo + hi * Nw
    cols = [(f(ea), f.one)] * abs(a)
    if b:
        w = f.omega
        cols += [(w * eb, f.one)] * lo + [(f(eb), w.conj())] * hi
    T = Matrix(f, [[c[0] for c in cols], [c[1] for c in cols]]) if cols else Matrix.zeros(f, 2, 0)
    return n_ij, n_ji, T


def pattern_rows(p: FieldElement) -> list[tuple[FieldElement, FieldElement]]:
    """Rows of T*, a representation of [[n_ij, p], [p*, n_ji]]."""
    _, _, T = two_by_two_T(p)
    return [(T[0, k].conj(), T[1, k].conj()) for k in range(T.ncols)]


# ---------------------------------------------------------------------------
# rank-two blocks


def reduce_binary(B: Matrix) -> tuple[Matrix, Matrix]:
    """(B', V) with B' = V* B V, V in GL_2(O), b11 <= b22 and b12 / b11 rounding to 0."""
    f = B.field
    V = Matrix.identity(f, 2)
    swap = Matrix(f, [[0, 1], [1, 0]])
    cur = B
    for _ in range(10_000):
        if cur[0, 0].a > cur[1, 1].a:
            V = V @ swap
            cur = swap @ cur @ swap
        if cur[0, 0] == 0:
            break
        r, _ = round_to_ring(cur[0, 1] / cur[0, 0])
        if not r:
            break
        step = Matrix(f, [[1, -r], [0, 1]])
        V = V @ step
        cur = step.H @ cur @ step
        if cur[1, 1].a >= cur[0, 0].a:
            break
    return cur, V


def _constructive_rows(B: Matrix) -> list[tuple[FieldElement, FieldElement]]:
    f = B.field
    x, y = int(B[0, 0].a), int(B[1, 1].a)
    a, b = _ints(B[0, 1])
    Nw = 1 if f.is_rational else f.norm_omega
    ea = 1 if a >= 0 else -1
    eb = 1 if b >= 0 else -1
    options = [(abs(a) + abs(b), abs(a) + abs(b) * Nw, False), (abs(a) + abs(b) * Nw, abs(a) + abs(b), True)]
    for ux, uy, flip in options:
        if x < ux or y < uy:
            continue
        rows = []
        for c in four_squares(abs(a)):
            if c:
                rows.append((f(c), f(ea * c)))
        if b:
            w = f.omega
            for c in four_squares(abs(b)):
                if c:
                    rows.append((w.conj() * c, f(eb * c)) if flip else (f(c), w * (eb * c)))
        rows += [(f(c), f.zero) for c in four_squares(x - ux) if c]
        rows += [(f.zero, f(c)) for c in four_squares(y - uy) if c]
        return rows
    raise ConstructiveSlackInsufficient(
        f"diagonal ({x}, {y}) too small for off-diagonal {B[0, 1]}", B
    )


ORACLE_DIAGONAL_LIMIT = 64


@dataclass
class BlockResult:
    rows: list[tuple[FieldElement, FieldElement]]
    strategy: str
    reduced: Matrix


def represent_binary_block(
    B: Matrix,
    strategy: str = "auto",
    g_max: int | None = None,
    budget: SearchBudget | None = None,
) -> BlockResult:
    """Rows (r1, r2) over O with sum of r* r equal to the 2 x 2 psd integral block B.

    Ladder: exact search on the GL_2-reduced block (auto, when the diagonal is
    small), then the constructive split, then a typed failure.
    """
    f = B.field
    if B.shape != (2, 2) or not B.is_hermitian() or not B.is_integral():
        raise BlockError("block must be a 2 x 2 integral hermitian matrix", B)
    if not is_positive_semidefinite(B):
        raise BlockError("block is not positive semidefinite", B)
    if strategy not in ("auto", "oracle", "constructive"):
        raise ValueError(f"unknown strategy {strategy!r}")
    Bred, V = reduce_binary(B)
    Vinv = V.inverse()
    rows = None
    used = None
    budget_hit = False
    small = max(Bred[0, 0].a, Bred[1, 1].a) <= ORACLE_DIAGONAL_LIMIT
    if strategy == "oracle" or (strategy == "auto" and small):
        gm = g_max or (5 if f.is_rational else 3)
        bud = budget or SearchBudget(g_max=gm, node_cap=200_000, time_cap=10.0)
        found = search_representation(HermitianForm(Bred), bud)
        if isinstance(found, Representation):
            rows = [tuple(r) for r in found.rows]
            used = "oracle"
        elif isinstance(found, NotFoundWithin) and not found.exhausted:
            budget_hit = True
    if rows is None and strategy != "oracle":
        try:
            rows = _constructive_rows(Bred)
            used = "constructive"
        except ConstructiveSlackInsufficient as exc:
            if budget_hit:
                raise SearchBudgetExceeded(f"search budget exhausted and {exc}", Bred) from exc
            raise
    if rows is None:
        if budget_hit:
            raise SearchBudgetExceeded("search budget exhausted", Bred)
        raise ConstructiveSlackInsufficient("no representation within the requested row count", Bred)
    back = [
        (r[0] * Vinv[0, 0] + r[1] * Vinv[1, 0], r[0] * Vinv[0, 1] + r[1] * Vinv[1, 1])
        for r in rows
    ]
    back = [r for r in back if r[0] or r[1]]
    rep = Representation(back, HermitianForm(B))
    if not rep.verify():
        raise AssertionError("block representation failed exact verification")
    return BlockResult(back, used, Bred)


# ---------------------------------------------------------------------------
# assembly of A + S


@dataclass
class PairBlock:
    i: int
    j: int
    block: Matrix
    family: str  # "balanced" (t' and s), "divisible" (2^sigma t' and q) or "pattern" (n and p)


@dataclass
class BlockDecomposition:
    field: FieldSpec
    n: int
    diag: list[int]
    blocks: list[PairBlock]
    data: dict = dc_field(default_factory=dict)

    def total(self) -> Matrix:
        f = self.field
        acc = [[f.zero] * self.n for _ in range(self.n)]
        for i, b in enumerate(self.diag):
            acc[i][i] = acc[i][i] + b
        for pb in self.blocks:
            idx = (pb.i, pb.j)
            for r in range(2):
                for c in range(2):
                    acc[idx[r]][idx[c]] = acc[idx[r]][idx[c]] + pb.block[r, c]
        return Matrix(f, acc)


def _as_int(x, what: str) -> int:
    x = Fraction(x.a if isinstance(x, FieldElement) else x)
    if isinstance(x, Fraction) and x.denominator != 1:
        raise PremiseViolation(f"{what} = {x} must be a rational integer")
    return int(x)


def check_premises(A: Sequence[int], S: Matrix, t: Sequence[Sequence[int]], sigma: int, slack_factor: int = 1) -> None:
    """Raise PremiseViolation naming the first failed hypothesis of the block assembly."""
    f = S.field
    n = len(A)
    if S.shape != (n, n) or len(t) != n or any(len(r) != n for r in t):
        raise PremiseViolation("A, S and t must all have size n")
    if not S.is_hermitian() or not S.is_integral():
        raise PremiseViolation("S must be integral hermitian")
    for i in range(n):
        if sum(t[i]) != A[i]:
            raise PremiseViolation(f"sum_j t[{i}][j] = {sum(t[i])} differs from a_{i} = {A[i]}")
        for j in range(n):
            if t[i][j] <= 0:
                raise PremiseViolation(f"t[{i}][{j}] = {t[i][j]} is not positive")
            if slack_factor * S[i, j].norm() > t[i][j] * t[j][i]:
                raise PremiseViolation(
                    f"t[{i}][{j}] t[{j}][{i}] >= {slack_factor} N(s[{i}][{j}]) fails: "
                    f"{t[i][j] * t[j][i]} < {slack_factor * S[i, j].norm()}"
                )
    if not f.is_rational:
        need = (1 << sigma) * (n - 1) * (f.norm_omega + 4)
        for i in range(n):
            if t[i][i] + S[i, i].a < need:
                raise PremiseViolation(f"t[{i}][{i}] + s[{i}][{i}] = {t[i][i] + S[i, i].a} < 2^sigma (n-1)(N(w)+4) = {need}")


def assemble_lemma51(A: Sequence[int], S: Matrix, t: Sequence[Sequence[int]], sigma: int | None = None) -> BlockDecomposition:
    """Write A + S as diag(b) plus rank-two blocks on coordinate pairs.

    Over Q the slack t_ii + s_ii is spread over the t_ij (j != i) and each pair
    carries [[t'_ij, s_ij], [s_ji, t'_ji]].  Over an imaginary quadratic field
    s_ij = p_ij + 2^sigma q_ij, each pair carries a unit-pattern block
    [[n_ij, p_ij], [p_ji, n_ji]] and a 2^sigma-divisible block, and the rest
    goes to the diagonal.
    """
    f = S.field
    n = len(A)
    A = [_as_int(a, "a_i") for a in A]
    t = [[_as_int(x, "t_ij") for x in r] for r in t]
    sigma = 0 if f.is_rational else (f.sigma if sigma is None else sigma)
    check_premises(A, S, t, sigma)
    sii = [_as_int(S[i, i], f"s[{i}][{i}]") for i in range(n)]
    blocks: list[PairBlock] = []
    data: dict = {"sigma": sigma}
    if n == 1:
        dec = BlockDecomposition(f, 1, [A[0] + sii[0]], [], data)
    elif f.is_rational:
        tp = [row[:] for row in t]
        for i in range(n):
            extra = t[i][i] + sii[i]
            others = [j for j in range(n) if j != i]
            share, rem = divmod(extra, n - 1)
            for k, j in enumerate(others):
                tp[i][j] += share + (1 if k < rem else 0)
        for i in range(n):
            for j in range(i + 1, n):
                blk = Matrix(f, [[tp[i][j], S[i, j]], [S[j, i], tp[j][i]]])
                blocks.append(PairBlock(i, j, blk, "balanced"))
        data["t_prime"] = tp
        dec = BlockDecomposition(f, n, [0] * n, blocks, data)
    else:
        m = 1 << sigma
        P = {}
        Qd = {}
        nn = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                p, q = pset_split(S[i, j], sigma)
                P[i, j], P[j, i] = p, p.conj()
                Qd[i, j], Qd[j, i] = q, q.conj()
                nn[i][j], nn[j][i], _ = two_by_two_T(p)
        ntil = max((nn[i][j] for i in range(n) for j in range(n) if i != j), default=0)
        tp = [[0] * n for _ in range(n)]
        delta = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                r = t[i][j] + ntil - nn[i][j]
                tp[i][j] = -(-r // m)
                delta[i][j] = m * tp[i][j] - r
        diag = [t[i][i] + sii[i] - ntil * (n - 1) - sum(delta[i]) for i in range(n)]
        if any(b < 0 for b in diag):
            raise PremiseViolation(f"diagonal remainder became negative: {diag}")
        for i in range(n):
            for j in range(i + 1, n):
                blocks.append(PairBlock(i, j, Matrix(f, [[nn[i][j], P[i, j]], [P[j, i], nn[j][i]]]), "pattern"))
                blk = Matrix(f, [[m * tp[i][j], Qd[i, j] * m], [Qd[j, i] * m, m * tp[j][i]]])
                blocks.append(PairBlock(i, j, blk, "divisible"))
        data.update({"n_tilde": ntil, "t_prime": tp, "delta": delta})
        dec = BlockDecomposition(f, n, diag, blocks, data)
    target = Matrix.diag(f, A) + S
    if dec.total() != target:
        raise AssertionError("block decomposition does not sum to A + S")
    return dec


def _block_rows(pb: PairBlock, strategy: str):
    if pb.family == "pattern":
        return pattern_rows(pb.block[0, 1]), "pattern"
    res = represent_binary_block(pb.block, strategy)
    return res.rows, res.strategy


def expand_blocks(
    dec: BlockDecomposition, strategy: str = "auto", threads: int = 1
) -> tuple[list[list[FieldElement]], list[dict]]:
    """Rows of length n representing dec.total(), with a per-block report.

    Blocks are independent; with threads > 1 they are solved in a pool, and the
    output keeps the (i, j) block order either way.
    """
    f = dec.field
    n = dec.n
    rows: list[list[FieldElement]] = []
    report: list[dict] = []
    for i, b in enumerate(dec.diag):
        for c in four_squares(b):
            if c:
                r = [f.zero] * n
                r[i] = f(c)
                rows.append(r)
    if threads > 1 and len(dec.blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            solved = list(pool.map(lambda pb: _block_rows(pb, strategy), dec.blocks))
    else:
        solved = [_block_rows(pb, strategy) for pb in dec.blocks]
    for pb, (brows, how) in zip(dec.blocks, solved):
        for x, y in brows:
            r = [f.zero] * n
            r[pb.i], r[pb.j] = x, y
            rows.append(r)
        report.append({"i": pb.i, "j": pb.j, "family": pb.family, "strategy": how, "rows": len(brows)})
    return rows, report
