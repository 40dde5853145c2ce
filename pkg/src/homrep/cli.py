"""Command line front end.

Exit status carries the verdict: 0 affirmative, 1 negative, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import formats
from .errors import (DepthTooSmall, FactorizationIncomplete, HomrepError, IncompleteSample,
                     NotRealizable, StarViolated)
from .filtration import reconstruct_ends, standard_sample
from .homology import (classify_functional, is_simple_isotropic, is_simple_nonisotropic,
                       lends_of_class, nonisotropic_witness)
from .realization import Verdict, build_certificate, check_membership, verify_certificate
from .surface import classification_triple, satisfies_star


def _fmt_ends(ends) -> str:
    return "{" + ", ".join(f"e{e}" for e in sorted(ends)) + "}"


def cmd_classify(args):
    S = formats.surface_from_json(formats.load_json(args.surface))
    t = classification_triple(S)
    star = satisfies_star(S)
    details = {"classification": t.as_dict(), "satisfies_star": star,
               "loch_ness_variant": S.is_loch_ness_variant()}
    g = "infinite" if t.genus == float("inf") else t.genus
    summary = f"genus {g}, {t.n_ends} ends ({t.n_nonplanar} nonplanar), (star) {'holds' if star else 'fails'}"
    return 0, "classified", details, summary


def cmd_check_class(args):
    S = formats.surface_from_json(formats.load_json(args.surface))
    obj = formats.load_json(args.cls)
    if args.arc:
        f = formats.functional_from_json(obj, S)
        v = classify_functional(f)
        details = {"is_arc": v.is_arc, "endpoints": list(v.endpoints) if v.endpoints else None,
                   "support": sorted(v.support)}
        if v.is_arc:
            return 0, "arc", details, f"arc functional from e{v.endpoints[0]} to e{v.endpoints[1]}"
        return 1, "not_arc", details, f"not an arc functional (end support {_fmt_ends(v.support)})"
    x = formats.class_from_json(obj, S)
    details = {"class": x.to_keys()}
    want_iso = args.isotropic or not args.nonisotropic
    want_non = args.nonisotropic or not args.isotropic
    if want_non and is_simple_nonisotropic(x):
        details["witness"] = nonisotropic_witness(x).to_keys()
        return 0, "simple_nonisotropic", details, "simple nonisotropic"
    if want_iso and x and is_simple_isotropic(x):
        L = lends_of_class(x)
        details["lends"] = sorted(L)
        return 0, "simple_isotropic", details, f"simple isotropic, lends = {_fmt_ends(L)}"
    if want_iso and not x and args.isotropic:
        # the zero class has no convention; report it as an input problem
        is_simple_isotropic(x)
    kind = "isotropic" if args.isotropic else "nonisotropic" if args.nonisotropic else ""
    return 1, "not_simple", details, f"not simple {kind}".rstrip()


def cmd_check_auto(args):
    S = formats.surface_from_json(formats.load_json(args.surface))
    phi = formats.auto_from_json(formats.load_json(args.auto), S)
    v = check_membership(phi)
    details = v.as_dict()
    f = "" if v.end_map is None else " f = " + str(list(v.end_map))
    code = 0 if v.verdict is Verdict.AS_IS else 1
    return code, v.verdict.value, details, f"{v.verdict.value} ({v.stage}: {v.reason}){f}"


def cmd_realize(args):
    S = formats.surface_from_json(formats.load_json(args.surface))
    phi = formats.auto_from_json(formats.load_json(args.auto), S)
    try:
        cert = build_certificate(phi, args.depth)
    except (NotRealizable, DepthTooSmall, FactorizationIncomplete) as exc:
        return 1, type(exc).__name__, {"error": str(exc)}, f"{type(exc).__name__}: {exc}"
    data = formats.certificate_to_json(cert)
    details = {"stages": len(cert.stages), "word_length": len(cert.word)}
    if args.out:
        formats.dump_json(data, args.out)
        details["written_to"] = args.out
    else:
        details["certificate"] = data
    return 0, "certified", details, f"certificate with {len(cert.stages)} stages, word length {len(cert.word)}"


def cmd_verify_cert(args):
    S = formats.surface_from_json(formats.load_json(args.surface))
    phi = formats.auto_from_json(formats.load_json(args.auto), S)
    cert = formats.certificate_from_json(formats.load_json(args.cert), S)
    r = verify_certificate(cert, phi)
    details = {"ok": r.ok, "condition": r.condition, "stage": r.stage, "message": r.message}
    if r.ok:
        return 0, "valid", details, "certificate verified"
    return 1, "invalid", details, f"condition {r.condition} fails at stage {r.stage}: {r.message}"


def cmd_reconstruct_ends(args):
    S = formats.surface_from_json(formats.load_json(args.surface))
    sample = standard_sample(S, args.depth)
    try:
        rec = reconstruct_ends(sample)
    except (StarViolated, IncompleteSample) as exc:
        return 1, type(exc).__name__, {"error": str(exc)}, f"{type(exc).__name__}: {exc}"
    details = {
        "sample_size": len(sample.modules),
        "filters": [{"end": e, "size": len(F)} for F, e in zip(rec.filters, rec.filter_end)],
        "end_to_filter": {str(e): i for e, i in sorted(rec.theta_inv.items())},
    }
    return 0, "reconstructed", details, f"{rec.n_filters} maximal filters in bijection with {S.n_ends} ends"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="homrep", description=__doc__)
    p.add_argument("--format", choices=("json", "summary"), default="json")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", help="classification triple of a surface model")
    s.add_argument("surface")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("check-class", help="is a class simple / is a functional an arc")
    s.add_argument("surface")
    s.add_argument("cls", metavar="class")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--isotropic", action="store_true")
    g.add_argument("--nonisotropic", action="store_true")
    g.add_argument("--arc", action="store_true")
    s.set_defaults(func=cmd_check_class)

    s = sub.add_parser("check-auto", help="decide realizability of an automorphism")
    s.add_argument("surface")
    s.add_argument("auto")
    s.set_defaults(func=cmd_check_auto)

    s = sub.add_parser("realize", help="build a realization certificate")
    s.add_argument("surface")
    s.add_argument("auto")
    s.add_argument("--depth", type=int, required=True, help="number of stages")
    s.add_argument("--out", help="write the certificate here instead of into the report")
    s.set_defaults(func=cmd_realize)

    s = sub.add_parser("verify-cert", help="check a realization certificate")
    s.add_argument("surface")
    s.add_argument("auto")
    s.add_argument("cert")
    s.set_defaults(func=cmd_verify_cert)

    s = sub.add_parser("reconstruct-ends", help="recover the ends from a flare sample")
    s.add_argument("surface")
    s.add_argument("--depth", type=int, required=True)
    s.set_defaults(func=cmd_reconstruct_ends)
    return p


def run(argv: Sequence[str] | None = None) -> tuple[int, dict]:
    """Run one command; returns the exit code and the report."""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        code, verdict, details, summary = args.func(args)
    except HomrepError as exc:
        code, verdict = 2, "input_error"
        details = {"error": type(exc).__name__, "message": str(exc)}
        summary = f"input error ({type(exc).__name__}): {exc}"
    report = {"command": argv, "verdict": verdict, "details": details,
              "summary": summary, "exit_code": code}
    return code, report


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    fmt = build_parser().parse_args(argv).format
    code, report = run(argv)
    if fmt == "summary":
        print(report["summary"])
    else:
        print(json.dumps(report, indent=1, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
