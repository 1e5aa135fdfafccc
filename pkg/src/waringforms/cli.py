"""Command-line interface: waring-forms <command> ...

Exit status: 0 on success, 2 on a typed negative outcome (not found, unknown,
below threshold, block failure, failed verification), 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bounds import BoundsProfile, ProfileError, certify_constants, maclaurin_c
from .decomposer import (
    BelowThreshold,
    BlockFailure,
    Caps,
    Success,
    compress_representation,
    decompose,
)
from .io_json import (
    SCHEMA,
    DocumentError,
    form_from_json,
    form_to_json,
    load_json,
    matrix_to_json,
)
from .linalg import Matrix, MatrixError
from .number_field import CLASS_NUMBER_ONE, SIGMA_DEFAULTS, FieldElement, FieldSpec
from .oracle import Certificate, NotFoundWithin, SearchBudget, Unknown, prove_not_representable, search_representation
from .reduction import balanced_hkz
from .representation import Representation, RepresentationError

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, FieldElement):
        return o.to_json()
    if isinstance(o, Matrix):
        return matrix_to_json(o)
    if isinstance(o, FieldSpec):
        return o.to_json()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _emit(doc: dict, out: str | None = None) -> None:
    text = json.dumps(doc, indent=2, default=_default)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _field_from_args(args) -> FieldSpec:
    if args.field == "Q":
        return FieldSpec.rational()
    if args.ell is None:
        raise UsageError("--field imag_quad needs --ell")
    if args.ell not in CLASS_NUMBER_ONE:
        raise UsageError(f"--ell must be one of {list(CLASS_NUMBER_ONE)}")
    return FieldSpec.imag_quad(args.ell, args.sigma)


def _profile(args, field: FieldSpec) -> BoundsProfile:
    if getattr(args, "profile", None):
        prof = BoundsProfile.from_json(load_json(args.profile))
        if prof.field.ell != field.ell:
            raise UsageError("profile field differs from the form's field")
        return prof
    return certify_constants(field, getattr(args, "range", None) or 200)


def _load_form(path: str):
    return form_from_json(load_json(path))


def _load_rep(path: str, form) -> Representation:
    return Representation.from_json(load_json(path), form)


def _fallback_json(fb):
    if isinstance(fb, Representation):
        return {"found": True, **fb.to_json()}
    if isinstance(fb, NotFoundWithin):
        return {"found": False, "exhausted": fb.exhausted, "g_completed": fb.g_completed, "nodes": fb.nodes, "reason": fb.reason}
    return None


# ---------------------------------------------------------------------------
# commands


def cmd_reduce(args) -> int:
    form = _load_form(args.input)
    red = balanced_hkz(form, certify=not args.no_certify)
    doc = {
        "schema": SCHEMA,
        "field": form.field.to_json(),
        "H": [str(h) for h in red.H],
        "T": matrix_to_json(red.T),
        "U": matrix_to_json(red.U),
        "slices": [{"k": z.k, "entries": [x.to_json() for x in z.entries]} for z in red.slices],
        "verification": red.report(),
    }
    _emit(doc, args.out)
    rep = doc["verification"]
    ok = rep["reconstruction"] and rep["factorization"] and rep["h1_is_minimum"]
    return EXIT_OK if ok else EXIT_NEGATIVE


def _caps(args) -> Caps:
    return Caps(
        start_bits=args.bits,
        max_bits=args.max_bits,
        oracle=SearchBudget(g_max=args.g_max, node_cap=args.node_cap, time_cap=args.time_cap),
        block_strategy=args.strategy,
        force_pipeline=args.force_pipeline,
        threads=args.threads,
    )


def cmd_decompose(args) -> int:
    form = _load_form(args.input)
    prof = _profile(args, form.field)
    out = decompose(form, prof, _caps(args))
    doc = {"schema": SCHEMA, "outcome": type(out).__name__, "trace": out.trace}
    if isinstance(out, Success):
        doc.update(
            {
                "g": out.g,
                "R": out.representation.to_json(),
                "achieved_vs_target_g": {
                    "achieved": out.g,
                    "paper_target": prof.target_rows(form.n),
                    "constructive_bound": 6 * form.n * form.n,
                },
                "verified": out.representation.verify(),
            }
        )
        code = EXIT_OK
    elif isinstance(out, BelowThreshold):
        doc.update({"mu": out.mu, "G": out.G, "fallback": _fallback_json(out.fallback)})
        code = EXIT_NEGATIVE
    else:
        doc.update({"details": out.details, "fallback": _fallback_json(out.fallback)})
        code = EXIT_NEGATIVE
    _emit(doc, args.out)
    return code


def cmd_verify(args) -> int:
    form = _load_form(args.form)
    rep = _load_rep(args.rep, form)
    ok = rep.verify()
    _emit({"schema": SCHEMA, "verified": ok, "g": rep.g})
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_compress(args) -> int:
    form = _load_form(args.form)
    rep = _load_rep(args.rep, form)
    if not rep.verify():
        print("error: the representation does not verify against the form", file=sys.stderr)
        return EXIT_NEGATIVE
    out = compress_representation(form, rep, _profile(args, form.field))
    _emit({**out.to_json(), "g_before": rep.g, "verified": out.verify()}, args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    field = _field_from_args(args)
    prof = _profile(args, field)
    if args.emit_profile:
        Path(args.emit_profile).write_text(prof.dumps() + "\n")
    n = args.n
    k_lo, k_hi = prof.k_E()
    doc = {
        "schema": SCHEMA,
        "field": field.to_json(),
        "n": n,
        "certification_range": prof.certification_range,
        "D1": prof.D1,
        "D2": prof.D2,
        "D3": prof.D3,
        "alpha_bar": prof.alpha_bar(n),
        "c_bar": prof.c_bar(n),
        "c_exact": repr(maclaurin_c(field, n)),
        "k_E": [k_lo, k_hi],
        "k_E_float": float((k_lo + k_hi) / 2),
    }
    if n >= 2:
        rec, closed = prof.g_upper_bound(n)
        doc.update({"G": prof.G(n), "G_float": float(prof.G(n)), "g_upper_bound": {"recursion": rec, "closed_form": closed}})
    else:
        doc["g_upper_bound"] = {"recursion": 4, "closed_form": 4}
    _emit(doc)
    return EXIT_OK


def cmd_phi(args) -> int:
    field = _field_from_args(args)
    prof = _profile(args, field)
    k_lo, k_hi = prof.k_E()
    n = prof.phi_lower_bound(args.s)
    _emit(
        {
            "schema": SCHEMA,
            "field": field.to_json(),
            "s": args.s,
            "phi_lower_bound": n,
            "k_E": float((k_lo + k_hi) / 2),
            "k_E_enclosure": [k_lo, k_hi],
            "certification_range": prof.certification_range,
        }
    )
    return EXIT_OK


def cmd_oracle(args) -> int:
    form = _load_form(args.input)
    if args.mode == "search":
        res = search_representation(form, SearchBudget(g_max=args.g_max, node_cap=args.node_cap, time_cap=args.time_cap))
        if isinstance(res, Representation):
            _emit({**res.to_json(), "found": True}, args.out)
            return EXIT_OK
        _emit({"schema": SCHEMA, **_fallback_json(res)}, args.out)
        return EXIT_NEGATIVE
    res = prove_not_representable(form, node_cap=args.node_cap, time_cap=args.time_cap)
    if isinstance(res, Certificate):
        doc = {**res.to_json(), "replayed": res.replay()}
        _emit(doc, args.out)
        return EXIT_OK if doc["replayed"] else EXIT_NEGATIVE
    assert isinstance(res, Unknown)
    doc = {"schema": SCHEMA, "outcome": "Unknown", "reason": res.reason}
    if res.representation is not None:
        doc["representation"] = res.representation.to_json()
    _emit(doc, args.out)
    return EXIT_NEGATIVE


def cmd_info(args) -> int:
    fields = [{"field": "Q", "beta2": str(FieldSpec.rational().beta2), "sigma": 0}]
    for ell in CLASS_NUMBER_ONE:
        f = FieldSpec.imag_quad(ell)
        fields.append(
            {"field": "imag_quad", "ell": ell, "disc": f.disc, "norm_omega": f.norm_omega, "beta2": str(f.beta2), "sigma": f.sigma}
        )
    _emit({"schema": SCHEMA, "version": __version__, "sigma_defaults": SIGMA_DEFAULTS, "fields": fields})
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_field_args(p):
    p.add_argument("--field", choices=["Q", "imag_quad"], default="Q")
    p.add_argument("--ell", type=int, help="l in Q(sqrt(-l)); one of 1, 2, 3, 7, 11, 19, 43, 67, 163")
    p.add_argument("--sigma", type=int, help="override the configured sigma")


def _add_budget_args(p, g_max=8):
    p.add_argument("--g-max", type=int, default=g_max)
    p.add_argument("--node-cap", type=int, default=2_000_000)
    p.add_argument("--time-cap", type=float, default=60.0)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="waring-forms", description="Exact sums-of-norms decompositions of integral hermitian forms.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--threads", type=int, default=1, help="worker threads for independent blocks")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("reduce", help="balanced reduction with an exact verification report")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--out")
    r.add_argument("--no-certify", action="store_true", help="skip re-checking each h_i by enumeration")
    r.set_defaults(func=cmd_reduce)

    d = sub.add_parser("decompose", help="represent a form as a sum of norms")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--profile", help="BoundsProfile JSON (see bounds --emit-profile)")
    d.add_argument("--out")
    d.add_argument("--bits", type=int, default=128)
    d.add_argument("--max-bits", type=int, default=1024)
    d.add_argument("--strategy", choices=["auto", "oracle", "constructive"], default="auto")
    d.add_argument("--force-pipeline", action="store_true", help="run the block pipeline below the threshold too")
    _add_budget_args(d)
    d.set_defaults(func=cmd_decompose)

    v = sub.add_parser("verify", help="exact check of R* R = M")
    v.add_argument("--form", required=True)
    v.add_argument("--rep", required=True)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compress", help="shrink a representation without increasing its length")
    c.add_argument("--form", required=True)
    c.add_argument("--rep", required=True)
    c.add_argument("--profile")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compress)

    b = sub.add_parser("bounds", help="certified bound constants and evaluators")
    _add_field_args(b)
    b.add_argument("--n", type=int, default=2)
    b.add_argument("--range", type=int, default=200, help="certification range (>= 64)")
    b.add_argument("--profile")
    b.add_argument("--emit-profile", metavar="PATH", help="also write the BoundsProfile JSON")
    b.set_defaults(func=cmd_bounds)

    ph = sub.add_parser("phi", help="lower bound on the least rank where s-integrability fails")
    _add_field_args(ph)
    ph.add_argument("--s", type=int, required=True)
    ph.add_argument("--range", type=int, default=200)
    ph.add_argument("--profile")
    ph.set_defaults(func=cmd_phi)

    o = sub.add_parser("oracle", help="exhaustive search or finite refutation")
    o.add_argument("mode", choices=["search", "refute"])
    o.add_argument("--in", dest="input", required=True)
    o.add_argument("--out")
    _add_budget_args(o)
    o.set_defaults(func=cmd_oracle)

    i = sub.add_parser("info", help="package, schema and field configuration")
    i.set_defaults(func=cmd_info)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DocumentError, UsageError, ProfileError, RepresentationError, MatrixError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
