"""JSON encodings of surfaces, classes, flares, automorphisms and certificates.

Parsing is strict: unknown keys and wrongly typed values raise
``FormatError`` rather than being ignored.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .automorphism import FinAutomorphism, make_automorphism
from .errors import FormatError, HomrepError
from .filtration import FlareModule
from .homology import Functional, HClass
from .realization import Certificate, Generator, Stage, StarDescriptor
from .surface import SurfaceModel, build_surface


def _expect_keys(obj: Any, what: str, required: set, optional: set = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise FormatError(f"{what}: expected a JSON object")
    unknown = set(obj) - required - set(optional)
    if unknown:
        raise FormatError(f"{what}: unknown keys {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise FormatError(f"{what}: missing keys {sorted(missing)}")
    return obj


def _int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise FormatError(f"{what}: expected an integer, got {v!r}")
    return v


def _int_list(v, what: str) -> list[int]:
    if not isinstance(v, list):
        raise FormatError(f"{what}: expected a list")
    return [_int(x, what) for x in v]


def _wrap(fn, what):
    try:
        return fn()
    except FormatError:
        raise
    except HomrepError as exc:
        raise FormatError(f"{what}: {exc}") from exc


# surfaces

def surface_to_json(S: SurfaceModel) -> dict:
    return {"core_genus": S.core_genus, "ends": [e.kind.value for e in S.ends]}


def surface_from_json(obj) -> SurfaceModel:
    _expect_keys(obj, "surface", {"core_genus", "ends"})
    g = _int(obj["core_genus"], "surface.core_genus")
    ends = obj["ends"]
    if not isinstance(ends, list) or not all(isinstance(e, str) for e in ends):
        raise FormatError("surface.ends: expected a list of strings")
    return _wrap(lambda: build_surface(g, ends), "surface")


# classes and functionals

def class_to_json(x: HClass) -> dict:
    return {"coeffs": x.to_keys()}


def _coeffs(obj, what) -> dict:
    _expect_keys(obj, what, {"coeffs"})
    c = obj["coeffs"]
    if not isinstance(c, dict):
        raise FormatError(f"{what}.coeffs: expected an object")
    return {k: _int(v, f"{what}.coeffs[{k}]") for k, v in c.items()}


def class_from_json(obj, S: SurfaceModel) -> HClass:
    c = _coeffs(obj, "class")
    return _wrap(lambda: HClass(S, c), "class")


def functional_to_json(f: Functional) -> dict:
    return {"coeffs": f.to_keys()}


def functional_from_json(obj, S: SurfaceModel) -> Functional:
    c = _coeffs(obj, "functional")
    return _wrap(lambda: Functional(S, c), "functional")


# flare modules

def flare_to_json(V: FlareModule) -> dict:
    return {
        "L": sorted(V.L),
        "tail_depth": {str(e): d for e, d in sorted(V.tail_depth.items())},
        "window_gens": [class_to_json(w) for w in V.window_gens],
    }


def flare_from_json(obj, S: SurfaceModel) -> FlareModule:
    _expect_keys(obj, "flare", {"L", "tail_depth", "window_gens"})
    L = _int_list(obj["L"], "flare.L")
    td = obj["tail_depth"]
    if not isinstance(td, dict):
        raise FormatError("flare.tail_depth: expected an object")
    depth = {}
    for k, v in td.items():
        try:
            e = int(k)
        except ValueError:
            raise FormatError(f"flare.tail_depth: bad end id {k!r}") from None
        depth[e] = _int(v, "flare.tail_depth")
    if not isinstance(obj["window_gens"], list):
        raise FormatError("flare.window_gens: expected a list")
    gens = [class_from_json(w, S) for w in obj["window_gens"]]
    return FlareModule(S, frozenset(L), depth, tuple(gens))


# automorphisms

def auto_to_json(phi: FinAutomorphism) -> dict:
    return {"window": [w.key for w in phi.window], "matrix": [list(r) for r in phi.matrix]}


def auto_from_json(obj, S: SurfaceModel) -> FinAutomorphism:
    _expect_keys(obj, "automorphism", {"window", "matrix"})
    W = obj["window"]
    if not isinstance(W, list) or not all(isinstance(w, str) for w in W):
        raise FormatError("automorphism.window: expected a list of basis keys")
    M = obj["matrix"]
    if not isinstance(M, list):
        raise FormatError("automorphism.matrix: expected a list of rows")
    rows = [_int_list(r, "automorphism.matrix") for r in M]
    return _wrap(lambda: make_automorphism(S, W, rows), "automorphism")


# certificates

def generator_to_json(g: Generator) -> dict:
    if g.kind == "twist":
        return {"type": "twist", "class": class_to_json(g.cls), "power": g.power}
    return {"type": "swap", "ends": list(g.ends)}


def generator_from_json(obj, S: SurfaceModel) -> Generator:
    if not isinstance(obj, dict) or obj.get("type") not in ("twist", "swap"):
        raise FormatError("generator: expected an object with type 'twist' or 'swap'")
    if obj["type"] == "twist":
        _expect_keys(obj, "generator", {"type", "class", "power"})
        return Generator.twist(class_from_json(obj["class"], S), _int(obj["power"], "generator.power"))
    _expect_keys(obj, "generator", {"type", "ends"})
    ends = _int_list(obj["ends"], "generator.ends")
    if len(ends) != 2:
        raise FormatError("generator.ends: expected two punctures")
    return Generator.swap(*ends)


def _descriptor_to_json(D: StarDescriptor) -> dict:
    return {
        "core": list(D.core),
        "tails": {str(e): t for e, t in sorted(D.tails.items())},
        "punctures": sorted(D.punctures),
    }


def certificate_to_json(cert: Certificate) -> dict:
    stages = []
    for st in cert.stages:
        A = {"side": st.side, **_descriptor_to_json(st.anchor),
             "basis": [class_to_json(x) for x in st.A_basis]}
        stages.append({
            "k": st.k,
            "A": A,
            "B_images": [class_to_json(y) for y in st.B_images],
            "flares": {label: {"X": flare_to_json(X), "Y": flare_to_json(Y)}
                       for label, (X, Y) in sorted(st.flares.items())},
        })
    return {"word": [generator_to_json(g) for g in cert.word], "stages": stages}


def certificate_from_json(obj, S: SurfaceModel) -> Certificate:
    _expect_keys(obj, "certificate", {"word", "stages"})
    if not isinstance(obj["word"], list) or not isinstance(obj["stages"], list):
        raise FormatError("certificate: word and stages must be lists")
    word = [generator_from_json(g, S) for g in obj["word"]]
    stages = []
    for i, st in enumerate(obj["stages"]):
        what = f"certificate.stages[{i}]"
        _expect_keys(st, what, {"k", "A", "B_images", "flares"})
        A = _expect_keys(st["A"], what + ".A", {"side", "core", "tails", "punctures", "basis"})
        if A["side"] not in ("A", "B"):
            raise FormatError(what + ".A.side: expected 'A' or 'B'")
        if not isinstance(A["tails"], dict):
            raise FormatError(what + ".A.tails: expected an object")
        tails = {}
        for e, t in A["tails"].items():
            try:
                tails[int(e)] = _int(t, what + ".A.tails")
            except ValueError:
                raise FormatError(f"{what}.A.tails: bad end id {e!r}") from None
        D = StarDescriptor(tuple(_int_list(A["core"], what + ".A.core")), tails,
                           frozenset(_int_list(A["punctures"], what + ".A.punctures")))
        if not isinstance(A["basis"], list) or not isinstance(st["B_images"], list):
            raise FormatError(what + ": basis and images must be lists")
        basis = [class_from_json(x, S) for x in A["basis"]]
        images = [class_from_json(y, S) for y in st["B_images"]]
        if not isinstance(st["flares"], dict):
            raise FormatError(what + ".flares: expected an object")
        flares = {}
        for label, pair in st["flares"].items():
            _expect_keys(pair, f"{what}.flares[{label}]", {"X", "Y"})
            flares[label] = (flare_from_json(pair["X"], S), flare_from_json(pair["Y"], S))
        stages.append(Stage(_int(st["k"], what + ".k"), A["side"], D, basis, images, flares))
    return Certificate(word, stages)


def load_json(path: str | Path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def dump_json(obj, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")
