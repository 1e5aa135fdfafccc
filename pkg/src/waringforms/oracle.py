"""Exhaustive search for sums of norms, and finite refutations when every diagonal entry is at most 3.

The search fills R column by column.  Rows with identical history are
interchangeable, so inside such a class the new entries are taken in
non-increasing order; a row that is still all zero may be rescaled by a unit,
so its first nonzero entry is a canonical associate.  Partial inner products
are pruned with Cauchy-Schwarz against the unfilled part of each column.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field
from typing import Optional

from .linalg import HermitianForm, is_positive_semidefinite
from .number_field import FieldElement, FieldSpec, canonical_associate
from .representation import Representation

Pair = tuple[int, int]


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class SearchBudget:
    g_max: int = 8
    node_cap: int = 2_000_000
    time_cap: float = 60.0

    def __post_init__(self):
        if self.g_max < 1 or self.node_cap < 1 or self.time_cap <= 0:
            raise OracleError("budget caps must be positive")


@dataclass(frozen=True)
class NotFoundWithin:
    """No representation with g <= g_completed; exhausted means the whole budget range was refuted."""

    budget: SearchBudget
    exhausted: bool
    g_completed: int
    nodes: int
    reason: str = ""


@dataclass(frozen=True)
class Unknown:
    reason: str
    representation: Optional[Representation] = None


class _Ring:
    """O as integer pairs (a, b) meaning a + b*omega, with omega^2 = t*omega - N."""

    def __init__(self, field: FieldSpec):
        self.field = field
        self.rational = field.is_rational
        self.t = 0 if self.rational else field.trace_omega
        self.N = 0 if self.rational else field.norm_omega

    def mul(self, x: Pair, y: Pair) -> Pair:
        a, b = x
        c, d = y
        bd = b * d
        return (a * c - self.N * bd, a * d + b * c + self.t * bd)

    def conj(self, x: Pair) -> Pair:
        a, b = x
        return (a + b * self.t, -b)

    def norm(self, x: Pair) -> int:
        a, b = x
        return a * a + self.t * a * b + self.N * b * b

    def key(self, x: Pair) -> tuple:
        return (self.norm(x), x[0], x[1])

    def pair(self, z: FieldElement) -> Pair:
        if not z.is_integral:
            raise OracleError(f"entry {z} is not integral")
        return (int(z.a), int(z.b))

    def elem(self, x: Pair) -> FieldElement:
        return self.field(x[0], x[1])

    def elements_upto(self, D: int) -> list[Pair]:
        out = []
        if self.rational:
            r = 0
            while (r + 1) ** 2 <= D:
                r += 1
            out = [(a, 0) for a in range(-r, r + 1)]
        else:
            B = 1
            while (4 * self.N - self.t**2) * B * B <= 4 * D:
                B += 1
            for b in range(-B, B + 1):
                A = abs(self.t * b) + B * (self.N + 1) + 1
                for a in range(-A, A + 1):
                    if self.norm((a, b)) <= D:
                        out.append((a, b))
        out.sort(key=self.key, reverse=True)
        return out


class _Abort(Exception):
    pass


def column_order(M: list[list[Pair]], ring: _Ring) -> list[int]:
    """Largest diagonal first, then always the column most linked to those already placed."""
    n = len(M)
    if n == 0:
        return []
    diag = [M[i][i][0] for i in range(n)]
    order = [max(range(n), key=lambda i: (diag[i], -i))]
    while len(order) < n:
        rest = [c for c in range(n) if c not in order]
        links = {c: sum(1 for p in order if M[p][c] != (0, 0)) for c in rest}
        order.append(max(rest, key=lambda c: (links[c], diag[c], -c)))
    return order


class _Engine:
    def __init__(self, ring: _Ring, M: list[list[Pair]], g: int, state: dict, record: bool):
        self.ring = ring
        self.M = M
        self.n = len(M)
        self.g = g
        self.state = state
        self.record = record
        D = max([M[i][i][0] for i in range(self.n)] + [0])
        self.all = ring.elements_upto(D)
        canon = {ring.pair(canonical_associate(ring.elem(x))) for x in self.all if x != (0, 0)}
        self.fresh = [x for x in self.all if x == (0, 0) or x in canon]
        self.R: list[list[Optional[Pair]]] = [[None] * self.n for _ in range(g)]

    def _tick(self):
        st = self.state
        st["nodes"] += 1
        if st["nodes"] > st["node_cap"]:
            raise _Abort("node cap")
        if st["nodes"] & 1023 == 0 and time.monotonic() > st["deadline"]:
            raise _Abort("time cap")

    def context(self, c: int) -> dict:
        """Row classes, freshness and suffix norm sums for column c."""
        R, g, ring = self.R, self.g, self.ring
        hist = [tuple(R[j][:c]) for j in range(g)]
        same = [j > 0 and hist[j] == hist[j - 1] for j in range(g)]
        fresh = [all(x == (0, 0) for x in h) for h in hist]
        suf = []
        for k in range(c):
            s = [0] * (g + 1)
            for j in range(g - 1, -1, -1):
                s[j] = s[j + 1] + ring.norm(R[j][k])
            suf.append(s)
        return {"same": same, "fresh": fresh, "suf": suf}

    def candidates(self, c: int, j: int, r: int, ctx: dict) -> list[Pair]:
        lst = self.fresh if ctx["fresh"][j] else self.all
        prev = self.R[j - 1][c] if ctx["same"][j] else None
        pk = self.ring.key(prev) if prev is not None else None
        out = []
        for x in lst:
            kx = self.ring.key(x)
            if kx[0] > r or (pk is not None and kx > pk):
                continue
            out.append(x)
        return out

    def cs_violation(self, c: int, j: int, r: int, deltas, ctx) -> Optional[int]:
        for k in range(c):
            if self.ring.norm(deltas[k]) > ctx["suf"][k][j] * r:
                return k
        return None

    def column(self, c: int):
        if c == self.n:
            return True, {"x": "found"}
        ctx = self.context(c)
        deltas = tuple(self.M[k][c] for k in range(c))
        return self.row(c, 0, self.M[c][c][0], deltas, ctx)

    def row(self, c: int, j: int, r: int, deltas, ctx):
        self._tick()
        k = self.cs_violation(c, j, r, deltas, ctx)
        if k is not None:
            return False, ({"x": "cs", "k": k} if self.record else None)
        if r == 0:
            for jj in range(j, self.g):
                self.R[jj][c] = (0, 0)
            ok, sub = self.column(c + 1)
            if not ok:
                for jj in range(j, self.g):
                    self.R[jj][c] = None
            return ok, ({"fill": j, "next": sub} if self.record else None)
        if j == self.g:
            return False, ({"x": "rows"} if self.record else None)
        ring = self.ring
        kids = []
        for x in self.candidates(c, j, r, ctx):
            self.R[j][c] = x
            nd = tuple(
                (d[0] - p[0], d[1] - p[1])
                for d, p in ((deltas[k], ring.mul(ring.conj(self.R[j][k]), x)) for k in range(c))
            )
            ok, sub = self.row(c, j + 1, r - ring.norm(x), nd, ctx)
            if ok:
                return True, None
            if self.record:
                kids.append([list(x), sub])
        self.R[j][c] = None
        return False, ({"col": c, "row": j, "kids": kids} if self.record else None)


def _prepare(M) -> tuple[HermitianForm, _Ring, list[int], list[list[Pair]]]:
    form = M if isinstance(M, HermitianForm) else HermitianForm(M)
    G = form.gram
    if not G.is_integral():
        raise OracleError("the oracle needs an integral Gram matrix")
    ring = _Ring(form.field)
    full = [[ring.pair(G[i, k]) for k in range(form.n)] for i in range(form.n)]
    order = column_order(full, ring)
    perm = [[full[order[i]][order[k]] for k in range(form.n)] for i in range(form.n)]
    return form, ring, order, perm


def _to_representation(form: HermitianForm, ring: _Ring, order, R) -> Representation:
    rows = []
    for r in R:
        out = [form.field.zero] * form.n
        for pos, orig in enumerate(order):
            out[orig] = ring.elem(r[pos])
        rows.append(out)
    rep = Representation(rows, form)
    if not rep.verify():
        raise AssertionError("oracle produced a representation that does not verify")
    return rep


def search_representation(M, budget: SearchBudget | None = None, g_min: int = 1):
    """Smallest-g representation up to budget.g_max, or NotFoundWithin.

    Iterative deepening: each g is searched to completion before g + 1, so the
    returned representation has the least g the budget could reach.
    """
    budget = budget or SearchBudget()
    form, ring, order, perm = _prepare(M)
    if not is_positive_semidefinite(form.gram):
        raise OracleError("form is not positive semidefinite, so no representation exists")
    state = {"nodes": 0, "node_cap": budget.node_cap, "deadline": time.monotonic() + budget.time_cap}
    if form.n == 0:
        return Representation([], form)
    for g in range(max(1, g_min), budget.g_max + 1):
        eng = _Engine(ring, perm, g, state, record=False)
        try:
            ok, _ = eng.column(0)
        except _Abort as exc:
            return NotFoundWithin(budget, False, g - 1, state["nodes"], str(exc))
        if ok:
            return _to_representation(form, ring, order, eng.R)
    return NotFoundWithin(budget, True, budget.g_max, state["nodes"], "search space exhausted")


@dataclass
class Certificate:
    """Complete search tree showing that no representation with g rows exists.

    When every diagonal entry is at most 3, each column has at most 3 nonzero
    entries, so any representation has at most trace(M) nonzero rows; refuting
    g = trace(M) therefore refutes every g.
    """

    form: HermitianForm
    g: int
    order: list[int]
    tree: dict
    nodes: int = 0
    meta: dict = dc_field(default_factory=dict)

    def replay(self) -> bool:
        """Walk the recorded tree and re-check every branch list and every contradiction."""
        form, ring, order, perm = _prepare(self.form)
        if order != self.order:
            return False
        eng = _Engine(ring, perm, self.g, {"nodes": 0, "node_cap": float("inf"), "deadline": float("inf")}, False)
        try:
            return self._walk_column(eng, 0, self.tree)
        except (KeyError, TypeError, IndexError, ValueError):
            return False

    def _walk_column(self, eng: _Engine, c: int, node) -> bool:
        if c == eng.n:
            return False
        ctx = eng.context(c)
        deltas = tuple(eng.M[k][c] for k in range(c))
        return self._walk_row(eng, c, 0, eng.M[c][c][0], deltas, ctx, node)

    def _walk_row(self, eng: _Engine, c, j, r, deltas, ctx, node) -> bool:
        ring = eng.ring
        if "x" in node:
            if node["x"] == "cs":
                k = node["k"]
                return 0 <= k < c and ring.norm(deltas[k]) > ctx["suf"][k][j] * r
            if node["x"] == "rows":
                return j == eng.g and r > 0 and eng.cs_violation(c, j, r, deltas, ctx) is None
            return False
        if eng.cs_violation(c, j, r, deltas, ctx) is not None:
            return False
        if "fill" in node:
            if node["fill"] != j or r != 0:
                return False
            for jj in range(j, eng.g):
                eng.R[jj][c] = (0, 0)
            ok = self._walk_column(eng, c + 1, node["next"])
            for jj in range(j, eng.g):
                eng.R[jj][c] = None
            return ok
        if node["col"] != c or node["row"] != j or r == 0 or j == eng.g:
            return False
        cands = eng.candidates(c, j, r, ctx)
        kids = node["kids"]
        if [tuple(x) for x, _ in kids] != cands:
            return False
        for x, sub in kids:
            x = tuple(x)
            eng.R[j][c] = x
            nd = tuple(
                (d[0] - p[0], d[1] - p[1])
                for d, p in ((deltas[k], ring.mul(ring.conj(eng.R[j][k]), x)) for k in range(c))
            )
            if not self._walk_row(eng, c, j + 1, r - ring.norm(x), nd, ctx, sub):
                eng.R[j][c] = None
                return False
        eng.R[j][c] = None
        return True

    def to_json(self) -> dict:
        from .io_json import form_to_json

        return {
            "schema": "waring-forms/1",
            "kind": "non-representability-certificate",
            "form": form_to_json(self.form),
            "g": self.g,
            "column_order": self.order,
            "nodes": self.nodes,
            "tree": self.tree,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Certificate":
        from .io_json import form_from_json

        return cls(form_from_json(doc["form"]), int(doc["g"]), list(doc["column_order"]), doc["tree"], int(doc.get("nodes", 0)))


def in_refutation_regime(form: HermitianForm) -> bool:
    G = form.gram
    return G.is_integral() and all(G[i, i].a <= 3 for i in range(form.n))


def prove_not_representable(M, node_cap: int = 5_000_000, time_cap: float = 120.0):
    """Certificate that M is not a sum of norms of integral linear forms, or Unknown.

    Only attempted when every diagonal entry is at most 3.  If the search
    finds a representation it is returned inside Unknown.
    """
    form = M if isinstance(M, HermitianForm) else HermitianForm(M)
    if not in_refutation_regime(form):
        return Unknown("outside the finite regime: some diagonal entry exceeds 3")
    if not is_positive_semidefinite(form.gram):
        return Unknown("form is not positive semidefinite")
    _, ring, order, perm = _prepare(form)
    g = max(1, sum(int(form.gram[i, i].a) for i in range(form.n)))
    state = {"nodes": 0, "node_cap": node_cap, "deadline": time.monotonic() + time_cap}
    eng = _Engine(ring, perm, g, state, record=True)
    try:
        ok, tree = eng.column(0)
    except _Abort as exc:
        return Unknown(f"budget exhausted ({exc})")
    if ok:
        return Unknown("representable", _to_representation(form, ring, order, eng.R))
    return Certificate(form, g, order, tree, state["nodes"])
