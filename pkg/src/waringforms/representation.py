"""Sums of norms: a g x n matrix R over O with R* R equal to a target Gram matrix."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .linalg import HermitianForm, Matrix, MatrixError
from .number_field import FieldElement, FieldSpec, element_from_json


class RepresentationError(ValueError):
    pass


def rows_gram(field: FieldSpec, rows: Sequence[Sequence[FieldElement]], n: int) -> Matrix:
    """sum_j r_j* r_j, i.e. (R*R)_{ik} = sum_j conj(R_ji) R_jk."""
    acc = [[field.zero] * n for _ in range(n)]
    for r in rows:
        nz = [(i, x) for i, x in enumerate(r) if x]
        for i, x in nz:
            xc = x.conj()
            for k, y in nz:
                acc[i][k] = acc[i][k] + xc * y
    return Matrix(field, acc)


@dataclass(frozen=True)
class Representation:
    """Rows of R; the all-zero rows are dropped on construction."""

    rows: tuple[tuple[FieldElement, ...], ...]
    target: HermitianForm

    def __init__(self, rows, target: HermitianForm):
        n = target.n
        f = target.field
        clean = []
        for r in rows:
            r = tuple(x if isinstance(x, FieldElement) else f(x) for x in r)
            if len(r) != n:
                raise RepresentationError(f"row has {len(r)} entries, form has rank {n}")
            if any(x for x in r):
                clean.append(r)
        object.__setattr__(self, "rows", tuple(clean))
        object.__setattr__(self, "target", target)

    @property
    def g(self) -> int:
        return len(self.rows)

    @property
    def field(self) -> FieldSpec:
        return self.target.field

    @property
    def matrix(self) -> Matrix:
        if not self.rows:
            return Matrix.zeros(self.field, 0, self.target.n)
        return Matrix(self.field, self.rows)

    def gram(self) -> Matrix:
        return rows_gram(self.field, self.rows, self.target.n)

    def is_integral(self) -> bool:
        return all(x.is_integral for r in self.rows for x in r)

    def verify(self) -> bool:
        return self.is_integral() and self.gram() == self.target.gram

    def transformed(self, V: Matrix, target: HermitianForm) -> "Representation":
        """Rows r -> r V, a representation of V* (R*R) V."""
        out = []
        n = V.ncols
        for r in self.rows:
            out.append(tuple(sum((r[i] * V[i, k] for i in range(len(r)) if r[i]), self.field.zero) for k in range(n)))
        return Representation(out, target)

    def to_json(self) -> dict:
        return {
            "schema": "waring-forms/1",
            "field": self.field.to_json(),
            "g": self.g,
            "rows": [[x.to_json() for x in r] for r in self.rows],
        }

    @classmethod
    def from_json(cls, doc: dict, target: HermitianForm) -> "Representation":
        f = target.field
        if "field" in doc and FieldSpec.from_json(doc["field"]).ell != f.ell:
            raise RepresentationError("representation and form are over different fields")
        try:
            rows = [[element_from_json(f, x) for x in r] for r in doc["rows"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise RepresentationError(f"malformed representation document: {exc}") from exc
        return cls(rows, target)


def verify(M: HermitianForm, R) -> bool:
    """Exact test of R* R = M; R may be a Representation, a Matrix or a list of rows."""
    if isinstance(R, Representation):
        rows = R.rows
    elif isinstance(R, Matrix):
        rows = [R.row(i) for i in range(R.nrows)]
    else:
        rows = [tuple(M.field(x) if not isinstance(x, FieldElement) else x for x in r) for r in R]
    for r in rows:
        if len(r) != M.n:
            raise MatrixError(f"dimension mismatch: row of length {len(r)} against a rank {M.n} form")
    if not all(x.is_integral for r in rows for x in r):
        return False
    return rows_gram(M.field, rows, M.n) == M.gram
