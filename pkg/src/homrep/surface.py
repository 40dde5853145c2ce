"""Finitely-ended surface models.

A model is a compact core of some genus together with a finite list of
ends.  Each end is either a puncture (planar, isolated) or a nonplanar
end, which we picture as a tail carrying infinitely many handles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import EmptyEnds, InvalidSurface


class EndKind(str, Enum):
    PUNCTURE = "puncture"
    NONPLANAR = "nonplanar"

    @classmethod
    def parse(cls, value) -> "EndKind":
        if isinstance(value, EndKind):
            return value
        if isinstance(value, str):
            v = value.strip().lower()
            if v in ("puncture", "p"):
                return cls.PUNCTURE
            if v in ("nonplanar", "np"):
                return cls.NONPLANAR
            if v in ("planar_cantor", "cantor", "planar-cantor"):
                raise InvalidSurface(
                    "planar Cantor ends give uncountably many ends; only "
                    "punctures and nonplanar ends are supported")
        raise InvalidSurface(f"unknown end kind {value!r}")


@dataclass(frozen=True)
class EndSpec:
    id: int
    kind: EndKind

    @property
    def is_puncture(self) -> bool:
        return self.kind is EndKind.PUNCTURE

    @property
    def is_nonplanar(self) -> bool:
        return self.kind is EndKind.NONPLANAR


@dataclass(frozen=True)
class SurfaceModel:
    core_genus: int
    ends: tuple[EndSpec, ...]

    def __post_init__(self):
        if not isinstance(self.core_genus, int) or isinstance(self.core_genus, bool) \
                or self.core_genus < 0:
            raise InvalidSurface(f"core genus must be a natural number, got {self.core_genus!r}")
        if len(self.ends) == 0:
            raise EmptyEnds("a surface model needs at least one end")
        for i, e in enumerate(self.ends):
            if e.id != i:
                raise InvalidSurface("end ids must be 0..n-1 in order")

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.core_genus, self.ends))
            object.__setattr__(self, "_hash", h)
        return h

    @property
    def n_ends(self) -> int:
        return len(self.ends)

    def kind(self, e: int) -> EndKind:
        return self.ends[e].kind

    @property
    def punctures(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.ends if e.is_puncture)

    @property
    def nonplanar_ends(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.ends if e.is_nonplanar)

    @property
    def end_ids(self) -> range:
        return range(len(self.ends))

    @property
    def has_infinite_genus(self) -> bool:
        return any(e.is_nonplanar for e in self.ends)

    def is_loch_ness_variant(self) -> bool:
        """One nonplanar end, optionally plus exactly one puncture."""
        kinds = sorted(e.kind.value for e in self.ends)
        return kinds in (["nonplanar"], ["nonplanar", "puncture"])

    def label(self) -> str:
        kinds = "".join("N" if e.is_nonplanar else "P" for e in self.ends)
        return f"g{self.core_genus}-{kinds}"

    def __repr__(self) -> str:
        return f"SurfaceModel({self.label()})"


@dataclass(frozen=True)
class ClassificationTriple:
    """Genus, end space and nonplanar end subspace, up to homeomorphism.

    For finitely many ends the end space is determined by its size, so we
    record counts.  ``genus`` is ``math.inf`` for infinite genus.
    """
    genus: float | int
    n_ends: int
    n_nonplanar: int

    def as_dict(self) -> dict:
        return {
            "genus": "infinite" if self.genus == math.inf else self.genus,
            "n_ends": self.n_ends,
            "n_nonplanar": self.n_nonplanar,
        }


def build_surface(core_genus: int, end_kinds: Sequence[EndKind | str]) -> SurfaceModel:
    if len(end_kinds) == 0:
        raise EmptyEnds("a surface model needs at least one end")
    ends = tuple(EndSpec(i, EndKind.parse(k)) for i, k in enumerate(end_kinds))
    return SurfaceModel(core_genus, ends)


def classification_triple(S: SurfaceModel) -> ClassificationTriple:
    n_np = len(S.nonplanar_ends)
    genus = math.inf if n_np else S.core_genus
    return ClassificationTriple(genus, S.n_ends, n_np)


def satisfies_star(S: SurfaceModel) -> bool:
    """Whether the end-reconstruction hypothesis holds.

    Planar surfaces need at least four ends, finite positive genus needs
    at least three, and infinite genus is fine except for the Loch Ness
    monster and its once-punctured version.
    """
    if S.has_infinite_genus:
        return not S.is_loch_ness_variant()
    if S.core_genus == 0:
        return S.n_ends >= 4
    return S.n_ends >= 3


def is_homeomorphic(S1: SurfaceModel, S2: SurfaceModel) -> bool:
    return classification_triple(S1) == classification_triple(S2)


def enumerate_models(max_ends: int, max_core_genus: int) -> Iterable[SurfaceModel]:
    """All models with 1..max_ends ends, nonplanar ends listed first."""
    for g in range(max_core_genus + 1):
        for n in range(1, max_ends + 1):
            for n_np in range(n + 1):
                yield build_surface(g, ["nonplanar"] * n_np + ["puncture"] * (n - n_np))


def loch_ness(core_genus: int = 0) -> SurfaceModel:
    return build_surface(core_genus, ["nonplanar"])


def jacobs_ladder(core_genus: int = 0) -> SurfaceModel:
    return build_surface(core_genus, ["nonplanar", "nonplanar"])


def punctured_sphere(n: int) -> SurfaceModel:
    return build_surface(0, ["puncture"] * n)
