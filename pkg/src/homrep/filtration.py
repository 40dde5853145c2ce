"""Flare submodules of H_1 and the end filtration they generate.

A flare module stands for the homology of a subsurface with one boundary
curve and infinitely many handles or punctures.  It is described by

* ``L``: the ends on the left of the boundary curve (the ends the
  subsurface contains),
* ``tail_depth``: for each nonplanar end in ``L``, the handle number from
  which on every tail handle is included,
* ``window_gens``: finitely many further generators.

The module is the span of ``g_e`` for ``e`` in ``L``, the deep tail
handles, and the window generators.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import lattice
from .errors import (IncompleteSample, InadmissibleL, NotNested, StarViolated,
                     SurfaceMismatch)
from .homology import BasisIndex, HClass, end_class, end_loops, sort_indices
from .lattice import Lattice
from .surface import SurfaceModel, satisfies_star


def admissibility_failure(S: SurfaceModel, L: Iterable[int]) -> str | None:
    """Which admissibility clause an end set violates, if any."""
    L = frozenset(L)
    if not L:
        return "L is empty"
    if any(not 0 <= e < S.n_ends for e in L):
        return "L contains an unknown end"
    if len(L) == S.n_ends:
        return "L contains every end"
    rest = [e for e in S.end_ids if e not in L]
    if len(rest) == 1 and S.ends[rest[0]].is_puncture:
        return "the complement of L is a single puncture"
    return None


def admissible_sets(S: SurfaceModel) -> list[frozenset[int]]:
    out = []
    for r in range(1, S.n_ends):
        for L in itertools.combinations(S.end_ids, r):
            if admissibility_failure(S, L) is None:
                out.append(frozenset(L))
    return out


def _is_deep(idx: BasisIndex, depth: Mapping[int, int]) -> bool:
    if idx.kind != "aT" and idx.kind != "bT":
        return False
    d = depth.get(idx.end)
    return d is not None and idx.k >= d


def _pairing_gram(cols: Sequence[BasisIndex], vecs: Sequence[Sequence[int]]) -> list[list[int]]:
    pos = {c: j for j, c in enumerate(cols)}
    pairs = [(pos[c], pos[c.dual()]) for c in cols
             if c.kind in ("aC", "aT") and c.dual() in pos]
    n = len(vecs)
    G = [[0] * n for _ in range(n)]
    for i in range(n):
        u = vecs[i]
        for j in range(i + 1, n):
            v = vecs[j]
            s = 0
            for ia, ib in pairs:
                s += u[ia] * v[ib] - u[ib] * v[ia]
            G[i][j] = s
            G[j][i] = -s
    return G


class FlareCheck(NamedTuple):
    ok: bool
    failures: tuple[str, ...]

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class FlareModule:
    surface: SurfaceModel
    L: frozenset
    tail_depth: Mapping[int, int] = field(default_factory=dict)
    window_gens: tuple[HClass, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "L", frozenset(self.L))
        object.__setattr__(self, "tail_depth", dict(self.tail_depth))
        object.__setattr__(self, "window_gens", tuple(self.window_gens))

    def boundary(self) -> HClass:
        """Class of the boundary curve, the sum of ``g_e`` over ``L``."""
        total = HClass.zero(self.surface)
        for e in sorted(self.L):
            total = total + end_class(self.surface, e)
        return total

    def end_gens(self) -> list[HClass]:
        return [end_class(self.surface, e) for e in sorted(self.L)]

    def finite_gens(self) -> list[HClass]:
        return self.end_gens() + list(self.window_gens)

    def strip(self, x: HClass) -> HClass:
        """Drop the coordinates that lie on the implicit deep tails."""
        d = self.tail_depth
        if not d:
            return x
        return HClass._raw(x.surface, {i: v for i, v in x.items() if not _is_deep(i, d)})

    def is_deep(self, idx: BasisIndex) -> bool:
        return _is_deep(idx, self.tail_depth)

    @cached_property
    def cols(self) -> tuple[BasisIndex, ...]:
        idx = set(end_loops(self.surface))
        for w in self.window_gens:
            idx.update(i for i, _ in w.items())
        return tuple(sort_indices(idx))

    @cached_property
    def finite_lattice(self) -> Lattice:
        cols = self.cols
        return Lattice([x.vector(cols) for x in self.finite_gens()], len(cols))

    def max_explicit_tail(self) -> dict[int, int]:
        """Largest tail handle number used by window generators, per end."""
        out = {}
        for w in self.window_gens:
            for i, _ in w.items():
                if i.kind in ("aT", "bT"):
                    out[i.end] = max(out.get(i.end, -1), i.k)
        return out

    def describe(self) -> str:
        depth = ",".join(f"{e}:{d}" for e, d in sorted(self.tail_depth.items()))
        return f"Flare(L={sorted(self.L)}, depth={{{depth}}}, gens={len(self.window_gens)})"

    __repr__ = describe


def standard_flare(S: SurfaceModel, L: Iterable[int], depth: int = 0) -> FlareModule:
    L = frozenset(L)
    why = admissibility_failure(S, L)
    if why is not None:
        raise InadmissibleL(why)
    if depth < 0:
        raise InadmissibleL("depth must be a natural number")
    return FlareModule(S, L, {e: depth for e in sorted(L) if S.ends[e].is_nonplanar}, ())


def flare_check(V: FlareModule) -> FlareCheck:
    """Run the four structural invariants and report every failure."""
    S = V.surface
    bad = []
    why = admissibility_failure(S, V.L)
    if why is not None:
        bad.append(f"admissibility: {why}")

    nf = []
    expected = {e for e in V.L if 0 <= e < S.n_ends and S.ends[e].is_nonplanar}
    if set(V.tail_depth) != expected:
        nf.append("tail depths must be given exactly for the nonplanar ends of L")
    if any(not isinstance(d, int) or d < 0 for d in V.tail_depth.values()):
        nf.append("tail depths must be natural numbers")
    for w in V.window_gens:
        if not isinstance(w, HClass) or w.surface != S:
            nf.append("window generator from another surface")
            break
        if any(_is_deep(i, V.tail_depth) for i, _ in w.items()):
            nf.append(f"window generator {w!r} has deep tail coordinates")
    if nf:
        bad.extend("normal form: " + m for m in nf)
        return FlareCheck(False, tuple(bad))
    if not V.window_gens:
        # spanned by end loops of L and deep tails: saturated, no symplectic part
        return FlareCheck(not bad, tuple(bad))

    cols = V.cols
    lat = V.finite_lattice
    giso = [j for j, c in enumerate(cols) if c.kind == "g"]
    gsym = [j for j, c in enumerate(cols) if c.kind != "g"]
    iso_rows = [[r[j] for j in giso] for r, p in zip(lat.basis, lat.pivots) if cols[p].kind == "g"]
    gl = end_loops(S)
    expected_iso = Lattice([x.vector(gl) for x in V.end_gens()], len(gl))
    if Lattice(iso_rows, len(gl)) != expected_iso:
        bad.append("saturation: isotropic part differs from the span of the end loops of L")

    sym_cols = [cols[j] for j in gsym]
    proj = Lattice([[r[j] for j in gsym] for r in lat.basis], len(gsym))
    d = lattice.det(_pairing_gram(sym_cols, proj.basis))
    if d not in (1, -1):
        bad.append(f"unimodularity: pairing on the symplectic part has determinant {d}")
    return FlareCheck(not bad, tuple(bad))


def is_flare_module(V: FlareModule) -> FlareCheck:
    return flare_check(V)


def flare_contains(V: FlareModule, x: HClass) -> bool:
    if x.surface != V.surface:
        raise SurfaceMismatch("class and module live on different surfaces")
    y = V.strip(x)
    cols = V.cols
    colset = set(cols)
    if any(i not in colset for i, _ in y.items()):
        return False
    return V.finite_lattice.contains(y.vector(cols))


def flare_leq(V1: FlareModule, V2: FlareModule) -> bool:
    """Whether the module V1 is contained in V2."""
    if V1.surface != V2.surface:
        raise SurfaceMismatch("modules live on different surfaces")
    for e, d1 in V1.tail_depth.items():
        if e not in V2.tail_depth:
            return False  # arbitrarily deep handles of e are missing from V2
        d2 = V2.tail_depth[e]
        for k in range(d1, d2):
            for kind in ("aT", "bT"):
                if not flare_contains(V2, HClass._raw(V1.surface, {BasisIndex(kind, e, k): 1})):
                    return False
    return all(flare_contains(V2, x) for x in V1.finite_gens())


def flare_equal(V1: FlareModule, V2: FlareModule) -> bool:
    return flare_leq(V1, V2) and flare_leq(V2, V1)


def raise_depth(V: FlareModule, depth: Mapping[int, int]) -> FlareModule:
    """Same module with the implicit tails starting deeper; skipped handles become explicit."""
    S = V.surface
    new_depth = dict(V.tail_depth)
    extra = []
    for e, d in depth.items():
        if e not in new_depth or d <= new_depth[e]:
            continue
        for k in range(new_depth[e], d):
            extra.append(HClass._raw(S, {BasisIndex("aT", e, k): 1}))
            extra.append(HClass._raw(S, {BasisIndex("bT", e, k): 1}))
        new_depth[e] = d
    if not extra:
        return V
    return FlareModule(S, V.L, new_depth, V.window_gens + tuple(extra))


def normalize(V: FlareModule) -> FlareModule:
    """Reduced generators and minimal tail depths, with the same span.

    A tail handle pair just above the depth is absorbed into the implicit
    tail whenever both handles already lie in the module.
    """
    S = V.surface
    depth = dict(V.tail_depth)
    gens = [V.strip(w) for w in V.window_gens]
    end_gens = V.end_gens()
    while True:
        idx = set(end_loops(S))
        for w in gens:
            idx.update(i for i, _ in w.items())
        cols = sort_indices(idx)
        lat = Lattice([x.vector(cols) for x in end_gens + gens], len(cols))
        changed = False
        for e, d in list(depth.items()):
            while d > 0:
                ta = BasisIndex("aT", e, d - 1)
                tb = BasisIndex("bT", e, d - 1)
                if ta not in idx or tb not in idx:
                    break
                ja, jb = cols.index(ta), cols.index(tb)
                va = [0] * len(cols)
                vb = [0] * len(cols)
                va[ja] = 1
                vb[jb] = 1
                if lat.contains(va) and lat.contains(vb):
                    d -= 1
                    changed = True
                else:
                    break
            depth[e] = d
        if changed:
            gens = [HClass._raw(S, {i: v for i, v in w.items() if not _is_deep(i, depth)}) for w in gens]
            continue
        break
    gl = end_loops(S)
    iso_rows = [r for r, p in zip(lat.basis, lat.pivots) if cols[p].kind == "g"]
    gpos = [cols.index(g) for g in gl]
    iso_lat = Lattice([[r[j] for j in gpos] for r in iso_rows], len(gl))
    want = Lattice([x.vector(gl) for x in end_gens], len(gl))
    keep_iso = iso_lat != want
    out = []
    for r, p in zip(lat.basis, lat.pivots):
        if cols[p].kind != "g" or keep_iso:
            out.append(HClass.from_vector(S, cols, r))
    return FlareModule(S, V.L, depth, tuple(out))


def express_in(V: FlareModule, x: HClass) -> list[int] | None:
    """Coefficients of x in terms of ``V.finite_gens()``, or None.

    Coordinates of x on V's implicit deep tails are dropped first; they are
    covered by the tail handles themselves.
    """
    S = V.surface
    gens = V.finite_gens()
    y = V.strip(x)
    idx = set(end_loops(S))
    for w in gens + [y]:
        idx.update(i for i, _ in w.items())
    cols = sort_indices(idx)
    return lattice.solve([g.vector(cols) for g in gens], y.vector(cols))


def nested_realization(Vp: FlareModule, Vy: FlareModule) -> FlareModule:
    """Re-express Vp inside Vy.

    The result spans the same module as Vp, its tail depths are at least
    those of Vy, and each of its window generators is an integer
    combination of Vy's generators (checked here).
    """
    if not flare_leq(Vp, Vy):
        raise NotNested("the first module is not contained in the second")
    target = {e: max(d, Vy.tail_depth.get(e, 0)) for e, d in Vp.tail_depth.items()}
    W = raise_depth(Vp, target)
    for w in W.finite_gens():
        if express_in(Vy, w) is None:
            raise NotNested(f"generator {w!r} is not expressible in the second module")
    return W


# --- samples and end reconstruction -----------------------------------------

@dataclass
class FiltrationSample:
    modules: list[FlareModule]
    depth: int
    extra_handles: int = 0


def standard_sample(S: SurfaceModel, depth: int) -> FiltrationSample:
    """Standard flares for every admissible L at depths 0..depth.

    End sets without nonplanar ends do not depend on the depth and appear once.
    """
    mods = []
    for L in admissible_sets(S):
        has_tail = any(S.ends[e].is_nonplanar for e in L)
        for d in range(depth + 1) if has_tail else [0]:
            mods.append(standard_flare(S, L, d))
    return FiltrationSample(mods, depth)


@dataclass
class EndReconstruction:
    filters: list[list[int]]        # indices into the sample, one list per maximal filter
    filter_end: list[int]           # end attached to each filter
    theta_inv: dict[int, int]       # end -> filter index

    @property
    def n_filters(self) -> int:
        return len(self.filters)


def leq_matrix(modules: Sequence[FlareModule]) -> list[list[bool]]:
    n = len(modules)
    return [[i == j or flare_leq(modules[i], modules[j]) for j in range(n)] for i in range(n)]


def reconstruct_ends(sample: FiltrationSample) -> EndReconstruction:
    """Maximal proper filters of the sampled poset, matched with ends.

    In a finite preorder every filter is an up-set of one element, so the
    maximal proper filters are the up-sets of minimal elements.  Each one
    is checked to coincide with the set of modules whose end set contains
    a single, unique end.
    """
    mods = sample.modules
    if not mods:
        raise IncompleteSample("empty sample")
    S = mods[0].surface
    if not satisfies_star(S):
        raise StarViolated(f"{S.label()} does not satisfy the end-reconstruction hypothesis")
    le = leq_matrix(mods)
    n = len(mods)
    minimal = []
    seen_class = set()
    for i in range(n):
        if any(le[j][i] and not le[i][j] for j in range(n)):
            continue
        cls = frozenset(j for j in range(n) if le[i][j] and le[j][i])
        if cls in seen_class:
            continue
        seen_class.add(cls)
        minimal.append(i)
    filters = []
    filter_end = []
    for m in minimal:
        up = [j for j in range(n) if le[m][j]]
        upset = set(up)
        match = [e for e in S.end_ids if {j for j in range(n) if e in mods[j].L} == upset]
        if len(match) != 1:
            raise IncompleteSample(
                f"the filter above {mods[m]!r} does not single out one end")
        filters.append(up)
        filter_end.append(match[0])
    if sorted(filter_end) != list(S.end_ids):
        missing = sorted(set(S.end_ids) - set(filter_end))
        raise IncompleteSample(f"no maximal filter found for ends {missing}")
    return EndReconstruction(filters, filter_end, {e: i for i, e in enumerate(filter_end)})


def truncated_lattice(V: FlareModule, cols: Sequence[BasisIndex]) -> Lattice:
    """The part of V supported on ``cols``, with deep tails inside ``cols`` made explicit."""
    colset = set(cols)
    missing = [c for c in V.cols if c not in colset]
    if missing:
        raise ValueError(f"columns do not cover the module window: {missing}")
    S = V.surface
    gens = [x.vector(cols) for x in V.finite_gens()]
    for c in cols:
        if V.is_deep(c):
            gens.append(HClass._raw(S, {c: 1}).vector(cols))
    return Lattice(gens, len(cols))
