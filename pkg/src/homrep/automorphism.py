"""Finitely supported automorphisms of H_1.

An automorphism is an integer matrix on a finite window of basis
elements and the identity everywhere else.  The window must contain every
end loop and be closed under taking duals, so that the pairing can be
checked on it.  Column ``j`` of the matrix is the image of ``window[j]``.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from . import lattice
from .errors import (FiltrationNotPreserved, NotPunctures, NotSimpleClass,
                     NotUnimodular, PairingNotPreserved, SurfaceMismatch, UnsupportedSurface,
                     WindowNotClosed)
from .filtration import (FlareModule, admissible_sets, end_loops, flare_check, normalize,
                         raise_depth, standard_flare)
from .homology import (BasisIndex, HClass, ai_pair, as_index, check_index, end_class,
                       is_simple, sort_indices, window_closure)
from .lattice import Lattice
from .surface import SurfaceModel


@lru_cache(maxsize=256)
def _signed_end_lookup(S: SurfaceModel) -> dict:
    """Map from the coefficient set of ``+-g_e`` to ``(e, sign)``.

    On a two-ended surface ``g_1 = -g_0``, so each class has two entries;
    the first registered one (lowest end, plus sign) wins.
    """
    table = {}
    for e in S.end_ids:
        g = end_class(S, e)
        if not g:
            continue
        for sign in (1, -1):
            key = frozenset((sign * g)._c.items())
            table.setdefault(key, []).append((e, sign))
    return table


def signed_end_of(x: HClass) -> list[tuple[int, int]]:
    """All ``(e, s)`` with ``x == s * g_e``."""
    return _signed_end_lookup(x.surface).get(frozenset(x._c.items()), [])


class FinAutomorphism:
    """Automorphism of H_1 supported on a finite window."""

    def __init__(self, surface: SurfaceModel, window: Sequence, matrix: Sequence[Sequence[int]],
                 *, validate: bool = True):
        self.surface = surface
        self.window = tuple(as_index(w) for w in window)
        self.matrix = tuple(tuple(r) for r in matrix)
        self._pos = {w: j for j, w in enumerate(self.window)}
        self._img = None
        if validate:
            self._validate()

    @classmethod
    def _raw(cls, surface, window, matrix) -> "FinAutomorphism":
        return cls(surface, window, matrix, validate=False)

    def _validate(self):
        S, W, M = self.surface, self.window, self.matrix
        for w in W:
            check_index(S, w)
        if len(set(W)) != len(W):
            raise WindowNotClosed("window lists a basis element twice")
        Wset = set(W)
        for w in W:
            if w.kind != "g" and w.dual() not in Wset:
                raise WindowNotClosed(f"window contains {w.key} but not its dual {w.dual().key}")
        for g in end_loops(S):
            if g not in Wset:
                raise WindowNotClosed(f"window must contain every end loop; {g.key} is missing")
        n = len(W)
        if len(M) != n or any(len(r) != n for r in M):
            raise NotUnimodular(f"matrix must be {n}x{n} for a window of size {n}")
        for r in M:
            for v in r:
                if isinstance(v, bool) or not isinstance(v, int):
                    raise NotUnimodular("matrix entries must be integers")
        d = lattice.det(M)
        if d not in (1, -1):
            raise NotUnimodular(f"determinant {d}")
        imgs = self.images()
        for i in range(n):
            if W[i].kind == "g":
                # end loops pair to zero with everything in the window
                if not imgs[i].is_isotropic():
                    raise PairingNotPreserved(f"image of {W[i].key} is not isotropic")
                continue
            for j in range(i + 1, n):
                if ai_pair(imgs[i], imgs[j]) != ai_pair(HClass._raw(S, {W[i]: 1}), HClass._raw(S, {W[j]: 1})):
                    raise PairingNotPreserved(f"pairing of {W[i].key} and {W[j].key} changes")

    def images(self) -> list[HClass]:
        if self._img is None:
            S, W, M = self.surface, self.window, self.matrix
            n = len(W)
            self._img = [HClass._raw(S, {W[i]: M[i][j] for i in range(n) if M[i][j]}) for j in range(n)]
        return self._img

    def image_of(self, idx: BasisIndex) -> HClass:
        j = self._pos.get(idx)
        if j is None:
            return HClass._raw(self.surface, {idx: 1})
        return self.images()[j]

    def __call__(self, x: HClass) -> HClass:
        return apply_class(self, x)

    def max_tail(self) -> dict[int, int]:
        out = {}
        for w in self.window:
            if w.kind in ("aT", "bT"):
                out[w.end] = max(out.get(w.end, -1), w.k)
        return out

    def matrix_on(self, window: Sequence[BasisIndex]) -> list[list[int]]:
        """Matrix of the same map on a larger window."""
        cols = [self.image_of(w) for w in window]
        return [[c[w] for c in cols] for w in window]

    def trimmed(self) -> "FinAutomorphism":
        """Same map on the smallest closed window containing where it moves things."""
        moved = [w for w, img in zip(self.window, self.images()) if img._c != {w: 1}]
        W = window_closure(self.surface, moved)
        return FinAutomorphism._raw(self.surface, W, self.matrix_on(W))

    def __eq__(self, other):
        if not isinstance(other, FinAutomorphism):
            return NotImplemented
        if self.surface != other.surface:
            return False
        W = sort_indices(set(self.window) | set(other.window))
        return all(self.image_of(w) == other.image_of(w) for w in W)

    def __hash__(self):
        t = self.trimmed()
        return hash((t.surface, t.window, t.matrix))

    def is_identity(self) -> bool:
        return all(img._c == {w: 1} for w, img in zip(self.window, self.images()))

    def __repr__(self):
        return f"FinAutomorphism(window=[{', '.join(w.key for w in self.window)}], matrix={list(map(list, self.matrix))})"


def make_automorphism(S: SurfaceModel, window: Sequence, matrix: Sequence[Sequence[int]]) -> FinAutomorphism:
    return FinAutomorphism(S, window, matrix)


def from_images(S: SurfaceModel, window: Sequence[BasisIndex], images: Sequence[HClass],
                validate: bool = True) -> FinAutomorphism:
    W = tuple(window)
    for img in images:
        for i, _ in img.items():
            if i not in W:
                raise WindowNotClosed(f"image uses {i.key}, outside the window")
    M = [[img[w] for img in images] for w in W]
    return FinAutomorphism(S, W, M, validate=validate)


def identity_auto(S: SurfaceModel) -> FinAutomorphism:
    W = tuple(end_loops(S))
    return FinAutomorphism._raw(S, W, lattice.identity(len(W)))


def apply_class(phi: FinAutomorphism, x: HClass) -> HClass:
    if x.surface is not phi.surface and x.surface != phi.surface:
        raise SurfaceMismatch("class and automorphism live on different surfaces")
    pos = phi._pos
    out = {}
    imgs = None
    for i, v in x._c.items():
        j = pos.get(i)
        if j is None:
            out[i] = out.get(i, 0) + v
            continue
        if imgs is None:
            imgs = phi.images()
        for k, c in imgs[j]._c.items():
            out[k] = out.get(k, 0) + v * c
    return HClass._raw(x.surface, {k: v for k, v in out.items() if v})


def compose(phi: FinAutomorphism, psi: FinAutomorphism) -> FinAutomorphism:
    """``phi o psi``: apply psi first."""
    if phi.surface != psi.surface:
        raise SurfaceMismatch("automorphisms live on different surfaces")
    W = tuple(sort_indices(set(phi.window) | set(psi.window)))
    imgs = [apply_class(phi, psi.image_of(w)) for w in W]
    return FinAutomorphism._raw(phi.surface, W, [[img[w] for img in imgs] for w in W])


def compose_all(S: SurfaceModel, maps: Iterable[FinAutomorphism]) -> FinAutomorphism:
    """``m_1 o m_2 o ... o m_k``."""
    out = identity_auto(S)
    for m in maps:
        out = compose(out, m)
    return out


def invert(phi: FinAutomorphism) -> FinAutomorphism:
    inv = lattice.inverse(phi.matrix)
    if inv is None:
        raise NotUnimodular("matrix is not invertible over the integers")
    return FinAutomorphism._raw(phi.surface, phi.window, inv)


def negate(phi: FinAutomorphism) -> FinAutomorphism:
    """``-phi``: phi followed by minus the identity on phi's window."""
    return FinAutomorphism._raw(phi.surface, phi.window, [[-v for v in r] for r in phi.matrix])


def transvection_auto(c: HClass, power: int = 1) -> FinAutomorphism:
    """Homology action ``x -> x + power * <x, c> c`` of a power of a Dehn twist."""
    if not is_simple(c):
        raise NotSimpleClass(f"{c!r} is not a simple class")
    S = c.surface
    W = window_closure(S, c.support)
    imgs = []
    for w in W:
        x = HClass._raw(S, {w: 1})
        p = ai_pair(x, c)
        imgs.append(x + (power * p) * c if p else x)
    return from_images(S, W, imgs, validate=False)


def puncture_swap_auto(S: SurfaceModel, p1: int, p2: int) -> FinAutomorphism:
    """Homology action of a half twist exchanging two punctures."""
    for p in (p1, p2):
        if not 0 <= p < S.n_ends or not S.ends[p].is_puncture:
            raise NotPunctures(f"end {p} is not a puncture")
    if p1 == p2:
        raise NotPunctures("a swap needs two distinct punctures")
    W = tuple(end_loops(S))
    swap = {p1: p2, p2: p1}
    imgs = [end_class(S, swap.get(g.end, g.end)) for g in W]
    return from_images(S, W, imgs, validate=False)


# --- end map and filtration ------------------------------------------------

def end_map(phi: FinAutomorphism) -> tuple[int, ...]:
    """The permutation of ends induced by phi.

    Requires ``phi(g_e) = +-g_{f(e)}`` for every end (``g_0`` included),
    with nonplanar ends fixed since phi is the identity far out on every
    tail.  Raises FiltrationNotPreserved otherwise.
    """
    S = phi.surface
    n = S.n_ends
    if n == 1:
        return (0,)
    if n == 2 and not S.nonplanar_ends:
        raise UnsupportedSurface("a twice-punctured surface cannot tell its two ends apart in homology")
    f = []
    for e in S.end_ids:
        img = apply_class(phi, end_class(S, e))
        cands = [t for t, s in signed_end_of(img)]
        if S.ends[e].is_nonplanar:
            if e not in cands:
                raise FiltrationNotPreserved(
                    f"image of g{e} is {img!r}, not +-g{e}; nonplanar ends are fixed")
            f.append(e)
            continue
        cands = [t for t in cands if S.ends[t].is_puncture]
        if len(cands) != 1:
            raise FiltrationNotPreserved(f"image of g{e} is {img!r}, not +-g of a puncture")
        f.append(cands[0])
    if len(set(f)) != n:
        raise FiltrationNotPreserved(f"induced end map {f} is not a bijection")
    return tuple(f)


def apply_flare(phi: FinAutomorphism, V: FlareModule) -> FlareModule:
    """Image of a flare module, in normal form.

    The end set of the image is read off from its isotropic part.  The
    result is not checked; run ``is_flare_module`` on it.
    """
    if V.surface != phi.surface:
        raise SurfaceMismatch("module and automorphism live on different surfaces")
    S = V.surface
    reach = phi.max_tail()
    depth = {e: max(d, reach.get(e, -1) + 1) for e, d in V.tail_depth.items()}

    if not V.window_gens and all(d == V.tail_depth[e] for e, d in depth.items()):
        # standard module already deeper than phi's window: only the end loops move
        L2 = set()
        for e in V.L:
            hits = signed_end_of(apply_class(phi, end_class(S, e)))
            if S.ends[e].is_nonplanar:
                t = e if any(h[0] == e for h in hits) else None
            else:
                ts = [h[0] for h in hits if S.ends[h[0]].is_puncture]
                t = ts[0] if len(ts) == 1 else None
            if t is None or t in L2:
                break
            L2.add(t)
        else:
            return FlareModule(S, frozenset(L2), dict(V.tail_depth), ())

    V2 = raise_depth(V, depth)
    gens = [apply_class(phi, x) for x in V2.finite_gens()]
    idx = set(end_loops(S))
    for w in gens:
        idx.update(i for i, _ in w.items())
    cols = sort_indices(idx)
    lat = Lattice([w.vector(cols) for w in gens], len(cols))
    gl = end_loops(S)
    gpos = [cols.index(g) for g in gl]
    iso = Lattice([[r[j] for j in gpos] for r, p in zip(lat.basis, lat.pivots) if cols[p].kind == "g"],
                  len(gl))
    members = {e for e in S.end_ids if iso.contains(end_class(S, e).vector(gl))}
    tails = set(V2.tail_depth)
    if len(members) == S.n_ends:
        L2 = {e for e in S.end_ids if S.ends[e].is_puncture or e in tails}
        if len(L2) == S.n_ends:
            # ambiguous; keep the original end set so the checker reports it
            L2 = set(V.L)
    else:
        L2 = members | tails
    cand = FlareModule(S, frozenset(L2), {e: depth[e] for e in tails}, tuple(gens))
    return normalize(cand)


class FiltrationCheck(NamedTuple):
    ok: bool
    diagnostics: tuple[str, ...]

    def __bool__(self):
        return self.ok


def _probe_depth(phi: FinAutomorphism) -> int:
    reach = phi.max_tail()
    return 1 + max(reach.values(), default=-1)


def preserves_filtration(phi: FinAutomorphism) -> FiltrationCheck:
    """Whether phi and its inverse send standard flares to flares compatibly with the end map.

    Every admissible end set is probed with a standard flare whose tails
    start beyond phi's window.  The image must be a valid flare module
    with end set ``f(L)`` and boundary ``+-`` the boundary of that set.
    """
    S = phi.surface
    try:
        f = end_map(phi)
    except FiltrationNotPreserved as exc:
        return FiltrationCheck(False, (f"end map: {exc}",))
    inv = invert(phi)
    f_inv = [0] * len(f)
    for e, t in enumerate(f):
        f_inv[t] = e
    depth = _probe_depth(phi)
    bad = []
    for L in admissible_sets(S):
        V = standard_flare(S, L, depth)
        for name, psi, fm in (("phi", phi, f), ("inverse", inv, f_inv)):
            W = apply_flare(psi, V)
            chk = flare_check(W)
            if not chk.ok:
                bad.append(f"{name}(flare L={sorted(L)}) is not a flare: {'; '.join(chk.failures)}")
                continue
            want = frozenset(fm[e] for e in L)
            if W.L != want:
                bad.append(f"{name}(flare L={sorted(L)}) has end set {sorted(W.L)}, expected {sorted(want)}")
                continue
            b = apply_class(psi, V.boundary())
            wb = W.boundary()
            if b != wb and b != -wb:
                bad.append(f"{name}(flare L={sorted(L)}) boundary {b!r} is not +-{wb!r}")
    return FiltrationCheck(not bad, tuple(bad))
