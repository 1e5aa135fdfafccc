"""JSON documents for forms, matrices and representations (schema tag "waring-forms/1").

Rationals are written as "p/q" strings and ring elements as {"a": ..., "b": ...}
so that nothing passes through floating point.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .linalg import HermitianForm, Matrix, MatrixError
from .number_field import FieldError, FieldSpec, element_from_json

SCHEMA = "waring-forms/1"


class DocumentError(ValueError):
    """A malformed input document; the message names the offending location."""


def frac_str(x: Fraction) -> str:
    return str(Fraction(x))


def matrix_to_json(M: Matrix) -> list:
    return [[x.to_json() for x in M.row(i)] for i in range(M.nrows)]


def matrix_from_json(field: FieldSpec, grid, where: str = "matrix") -> Matrix:
    if not isinstance(grid, list) or not all(isinstance(r, list) for r in grid):
        raise DocumentError(f"{where}: expected a list of rows")
    rows = []
    for i, r in enumerate(grid):
        row = []
        for j, x in enumerate(r):
            try:
                row.append(element_from_json(field, x))
            except (FieldError, ValueError, ZeroDivisionError) as exc:
                raise DocumentError(f"{where}[{i}][{j}]: {exc}") from exc
        rows.append(row)
    try:
        return Matrix(field, rows)
    except MatrixError as exc:
        raise DocumentError(f"{where}: {exc}") from exc


def field_from_json(doc) -> FieldSpec:
    if isinstance(doc, str):
        doc = {"field": doc}
    try:
        return FieldSpec.from_json(doc)
    except (FieldError, KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"field: {exc}") from exc


def form_to_json(form: HermitianForm, **meta) -> dict:
    doc = {"schema": SCHEMA, "field": form.field.to_json(), "gram": matrix_to_json(form.gram)}
    if form.name:
        doc["name"] = form.name
    doc.update({k: v for k, v in meta.items() if v is not None})
    return doc


def form_from_json(doc: dict) -> HermitianForm:
    if not isinstance(doc, dict):
        raise DocumentError("form document must be a JSON object")
    if "gram" not in doc:
        raise DocumentError("form document has no 'gram' entry")
    field = field_from_json(doc.get("field", {"field": "Q"}))
    gram = matrix_from_json(field, doc["gram"], "gram")
    try:
        return HermitianForm(gram, doc.get("name"))
    except MatrixError as exc:
        raise DocumentError(f"gram: {exc}") from exc


def load_json(path: str | Path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)
