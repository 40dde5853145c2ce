"""First homology of a surface model with its intersection pairing.

Basis of H_1:

* ``aC<i>``, ``bC<i>``: the core handle pairs, ``0 <= i < core_genus``;
* ``aT<e>.<k>``, ``bT<e>.<k>``: handle ``k`` on the tail of nonplanar end ``e``;
* ``g<e>`` for ``e != 0``: the loop around end ``e``, oriented with ``e``
  on its left.

The loop around end 0 is not a basis element.  The loops satisfy a single
relation (their sum is zero), so ``g0 = -(g1 + ... + g_{n-1})``.  Every
handle pair pairs to +1 (``<a, b> = 1``) and end loops are in the radical.
"""
from __future__ import annotations

import math
import re
from functools import lru_cache
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import lattice
from .errors import (InvalidIndex, MalformedBasis, NotSimpleClass, NotSimpleIsotropic,
                     SameEnd, SurfaceMismatch, ZeroClass)
from .surface import SurfaceModel

_A_KINDS = ("aC", "aT")
_B_KINDS = ("bC", "bT")
_DUAL = {"aC": "bC", "bC": "aC", "aT": "bT", "bT": "aT"}
_KEY_RE = re.compile(r"^(?:([ab])C(\d+)|([ab])T(\d+)\.(\d+)|g(\d+))$")


class BasisIndex(NamedTuple):
    kind: str   # "aC", "bC", "aT", "bT" or "g"
    end: int    # owning end; -1 for core handles
    k: int      # handle number (0 for end loops)

    @classmethod
    def core_a(cls, i: int) -> "BasisIndex":
        return cls("aC", -1, i)

    @classmethod
    def core_b(cls, i: int) -> "BasisIndex":
        return cls("bC", -1, i)

    @classmethod
    def tail_a(cls, e: int, k: int) -> "BasisIndex":
        return cls("aT", e, k)

    @classmethod
    def tail_b(cls, e: int, k: int) -> "BasisIndex":
        return cls("bT", e, k)

    @classmethod
    def end_loop(cls, e: int) -> "BasisIndex":
        return cls("g", e, 0)

    @classmethod
    def parse(cls, key: str) -> "BasisIndex":
        m = _KEY_RE.match(key.strip()) if isinstance(key, str) else None
        if m is None:
            raise InvalidIndex(f"cannot parse basis key {key!r}")
        if m.group(1):
            return cls(m.group(1) + "C", -1, int(m.group(2)))
        if m.group(3):
            return cls(m.group(3) + "T", int(m.group(4)), int(m.group(5)))
        return cls("g", int(m.group(6)), 0)

    @property
    def key(self) -> str:
        if self.kind == "g":
            return f"g{self.end}"
        if self.end < 0:
            return f"{self.kind}{self.k}"
        return f"{self.kind}{self.end}.{self.k}"

    @property
    def is_symplectic(self) -> bool:
        return self.kind != "g"

    @property
    def is_a(self) -> bool:
        return self.kind in _A_KINDS

    @property
    def is_tail(self) -> bool:
        return self.kind in ("aT", "bT")

    def dual(self) -> "BasisIndex":
        if self.kind == "g":
            raise InvalidIndex("end loops have no dual")
        return BasisIndex(_DUAL[self.kind], self.end, self.k)

    def sort_key(self):
        # core pairs, then tail pairs, then end loops; a before b
        if self.kind == "g":
            return (2, self.end, 0, 0)
        if self.end < 0:
            return (0, 0, self.k, 0 if self.kind == "aC" else 1)
        return (1, self.end, self.k, 0 if self.kind == "aT" else 1)

    def __str__(self):
        return self.key


def as_index(obj) -> BasisIndex:
    if isinstance(obj, BasisIndex):
        return obj
    if isinstance(obj, tuple) and len(obj) == 3:
        return BasisIndex(*obj)
    return BasisIndex.parse(obj)


def check_index(S: SurfaceModel, idx: BasisIndex) -> None:
    if idx.kind in ("aC", "bC"):
        if not 0 <= idx.k < S.core_genus:
            raise InvalidIndex(f"{idx.key}: core genus is {S.core_genus}")
    elif idx.kind in ("aT", "bT"):
        if not (0 <= idx.end < S.n_ends) or not S.ends[idx.end].is_nonplanar:
            raise InvalidIndex(f"{idx.key}: end {idx.end} is not a nonplanar end")
        if idx.k < 0:
            raise InvalidIndex(f"{idx.key}: negative handle number")
    elif idx.kind == "g":
        if idx.end == 0:
            raise InvalidIndex("g0 is not a basis element; it equals minus the sum of the other end loops")
        if not 1 <= idx.end < S.n_ends:
            raise InvalidIndex(f"{idx.key}: no such end")
    else:
        raise InvalidIndex(f"unknown basis kind {idx.kind!r}")


def sort_indices(indices: Iterable[BasisIndex]) -> list[BasisIndex]:
    return sorted(set(indices), key=BasisIndex.sort_key)


def end_loops(S: SurfaceModel) -> list[BasisIndex]:
    return [BasisIndex("g", e, 0) for e in range(1, S.n_ends)]


def window_closure(S: SurfaceModel, indices: Iterable[BasisIndex]) -> tuple[BasisIndex, ...]:
    """Smallest window containing ``indices``: closed under duals, plus every end loop."""
    out = set()
    for idx in indices:
        if idx.kind != "g":
            out.add(idx)
            out.add(idx.dual())
    out.update(end_loops(S))
    return tuple(sorted(out, key=BasisIndex.sort_key))


class HClass:
    """An integer homology class, stored sparsely in the standard basis."""

    __slots__ = ("surface", "_c", "_hash")

    def __init__(self, surface: SurfaceModel, coeffs: Mapping | None = None):
        c = {}
        if coeffs:
            for k, v in coeffs.items():
                idx = as_index(k)
                check_index(surface, idx)
                if isinstance(v, bool) or not isinstance(v, int):
                    raise InvalidIndex(f"coefficient of {idx.key} must be an integer")
                if v:
                    c[idx] = c.get(idx, 0) + v
                    if c[idx] == 0:
                        del c[idx]
        self.surface = surface
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, surface: SurfaceModel, c: dict) -> "HClass":
        # trusted constructor: c already validated and free of zeros
        obj = cls.__new__(cls)
        obj.surface = surface
        obj._c = c
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, S: SurfaceModel) -> "HClass":
        return cls._raw(S, {})

    @classmethod
    def basis(cls, S: SurfaceModel, idx) -> "HClass":
        idx = as_index(idx)
        check_index(S, idx)
        return cls._raw(S, {idx: 1})

    @classmethod
    def from_vector(cls, S: SurfaceModel, cols: Sequence[BasisIndex], v: Sequence[int]) -> "HClass":
        return cls._raw(S, {i: x for i, x in zip(cols, v) if x})

    def __getitem__(self, idx) -> int:
        return self._c.get(idx, 0)

    def coeff(self, idx) -> int:
        return self._c.get(as_index(idx), 0)

    def items(self):
        return self._c.items()

    @property
    def support(self) -> frozenset:
        return frozenset(self._c)

    def vector(self, cols: Sequence[BasisIndex]) -> list[int]:
        c = self._c
        return [c.get(i, 0) for i in cols]

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def is_isotropic(self) -> bool:
        return all(i.kind == "g" for i in self._c)

    def symplectic_part(self) -> "HClass":
        return HClass._raw(self.surface, {i: v for i, v in self._c.items() if i.kind != "g"})

    def isotropic_part(self) -> "HClass":
        return HClass._raw(self.surface, {i: v for i, v in self._c.items() if i.kind == "g"})

    def _check(self, other: "HClass"):
        if other.surface is not self.surface and other.surface != self.surface:
            raise SurfaceMismatch("classes live on different surfaces")

    def __add__(self, other: "HClass") -> "HClass":
        if not isinstance(other, HClass):
            return NotImplemented
        self._check(other)
        c = dict(self._c)
        for i, v in other._c.items():
            s = c.get(i, 0) + v
            if s:
                c[i] = s
            else:
                c.pop(i, None)
        return HClass._raw(self.surface, c)

    def __neg__(self) -> "HClass":
        return HClass._raw(self.surface, {i: -v for i, v in self._c.items()})

    def __sub__(self, other: "HClass") -> "HClass":
        return self + (-other)

    def __mul__(self, k: int) -> "HClass":
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return HClass._raw(self.surface, {})
        return HClass._raw(self.surface, {i: k * v for i, v in self._c.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, HClass):
            return NotImplemented
        return self._c == other._c and (self.surface is other.surface or self.surface == other.surface)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.surface, frozenset(self._c.items())))
        return self._hash

    def to_keys(self) -> dict[str, int]:
        return {i.key: v for i, v in sorted(self._c.items(), key=lambda t: t[0].sort_key())}

    def __repr__(self):
        if not self._c:
            return "HClass(0)"
        parts = []
        for i, v in sorted(self._c.items(), key=lambda t: t[0].sort_key()):
            parts.append(i.key if v == 1 else f"-{i.key}" if v == -1 else f"{v}*{i.key}")
        return "HClass(" + " + ".join(parts).replace("+ -", "- ") + ")"


@lru_cache(maxsize=4096)
def end_class(S: SurfaceModel, e: int) -> HClass:
    """Class of the loop around end ``e`` (``g0`` expressed through the others)."""
    if not 0 <= e < S.n_ends:
        raise InvalidIndex(f"no end {e}")
    if e == 0:
        return HClass._raw(S, {BasisIndex("g", f, 0): -1 for f in range(1, S.n_ends)})
    return HClass._raw(S, {BasisIndex("g", e, 0): 1})


def boundary_class(S: SurfaceModel, ends: Iterable[int]) -> HClass:
    """Sum of the end loops over a set of ends."""
    total = HClass.zero(S)
    for e in ends:
        total = total + end_class(S, e)
    return total


def ai_pair(x: HClass, y: HClass) -> int:
    """Algebraic intersection number."""
    x._check(y)
    yc = y._c
    total = 0
    for i, v in x._c.items():
        kind = i.kind
        if kind == "aC":
            total += v * yc.get(BasisIndex("bC", -1, i.k), 0)
        elif kind == "bC":
            total -= v * yc.get(BasisIndex("aC", -1, i.k), 0)
        elif kind == "aT":
            total += v * yc.get(BasisIndex("bT", i.end, i.k), 0)
        elif kind == "bT":
            total -= v * yc.get(BasisIndex("aT", i.end, i.k), 0)
    return total


def end_coordinates(x: HClass) -> tuple[int, ...] | None:
    """Coordinates ``(c_0, ..., c_{n-1})`` of an isotropic class, with ``c_0 = 0``.

    Returns None when ``x`` has a nonzero symplectic part.
    """
    if not x.is_isotropic():
        return None
    c = x._c
    return (0,) + tuple(c.get(BasisIndex("g", e, 0), 0) for e in range(1, x.surface.n_ends))


def _xgcd_list(values: Sequence[int]) -> tuple[int, list[int]]:
    """gcd of the values and Bezout coefficients."""
    g = 0
    coefs = [0] * len(values)
    for j, v in enumerate(values):
        if v == 0:
            continue
        if g == 0:
            g = abs(v)
            coefs[j] = 1 if v > 0 else -1
            continue
        # extended Euclid on (g, v)
        old_r, r = g, v
        old_s, s = 1, 0
        old_t, t = 0, 1
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
            old_t, t = t, old_t - q * t
        if old_r < 0:
            old_r, old_s, old_t = -old_r, -old_s, -old_t
        coefs = [old_s * cc for cc in coefs]
        coefs[j] = old_t
        g = old_r
    return g, coefs


def nonisotropic_witness(x: HClass) -> HClass | None:
    """A class y with ``ai_pair(x, y) == 1``, if one exists.

    Such a y exists exactly when the symplectic coordinates of x have gcd 1.
    """
    sym = [(i, v) for i, v in x._c.items() if i.kind != "g"]
    if not sym:
        return None
    g, s = _xgcd_list([v for _, v in sym])
    if g != 1:
        return None
    y = {}
    for (i, _), si in zip(sym, s):
        if si == 0:
            continue
        d = i.dual()
        # <a, b> = 1: an a-coordinate is detected by b and vice versa
        y[d] = y.get(d, 0) + (si if i.is_a else -si)
    return HClass._raw(x.surface, {k: v for k, v in y.items() if v})


def is_simple_nonisotropic(x: HClass) -> bool:
    sym = [v for i, v in x._c.items() if i.kind != "g"]
    return bool(sym) and math.gcd(*sym) == 1


def is_simple_isotropic(x: HClass) -> bool:
    """Whether x is represented by a separating simple closed curve.

    Raises ZeroClass on the zero class, which needs a separate convention.
    """
    if not x._c:
        raise ZeroClass("the zero class is not treated as simple isotropic")
    c = end_coordinates(x)
    if c is None:
        return False
    return max(c) - min(c) <= 1


def is_simple(x: HClass) -> bool:
    if not x._c:
        return False
    return is_simple_nonisotropic(x) or is_simple_isotropic(x)


def lends_of_class(x: HClass) -> frozenset[int]:
    """Ends lying on the left of a separating curve representing x."""
    if not x._c or not is_simple_isotropic(x):
        raise NotSimpleIsotropic(f"{x!r} is not a simple isotropic class")
    c = end_coordinates(x)
    lo = min(c)
    return frozenset(e for e, v in enumerate(c) if v - lo == 1)


def twist_action(c: HClass, x: HClass, power: int = 1) -> HClass:
    """Action of a Dehn twist along a curve in class c: ``x + <x, c> c``."""
    if not is_simple(c):
        raise NotSimpleClass(f"{c!r} is not a simple class")
    p = ai_pair(x, c)
    if p == 0:
        return x
    return x + (power * p) * c


# --- basis extension test --------------------------------------------------

def _window_for(classes: Iterable[HClass]) -> tuple[BasisIndex, ...]:
    S = None
    idx = set()
    for x in classes:
        S = x.surface
        idx.update(x._c)
    return window_closure(S, idx)


def basis_extension_failure(x: HClass, B: Sequence[HClass]) -> str | None:
    """Reason the basis-extension test rejects ``(x, B)``, or None if it passes.

    B is read as a candidate basis of the window lattice spanned by the
    supports of x and B (closed under duals) together with all end loops.
    Accepted when x is nonisotropic, x is a member of B, B is unimodular
    on the window, and the isotropic members of B span the isotropic part.
    """
    S = x.surface
    for b in B:
        x._check(b)
    W = _window_for([x, *B])
    if len(B) != len(W):
        raise MalformedBasis(f"{len(B)} vectors given for a window of rank {len(W)}")
    if x.is_isotropic():
        return "(0) x is isotropic"
    if x not in B:
        return "(i) x is not a member of B"
    M = [b.vector(W) for b in B]
    d = lattice.det(M)
    if d not in (1, -1):
        return f"(ii) B is not a basis of the window lattice (det {d})"
    gl = end_loops(S)
    iso = [b.vector(gl) for b in B if b.is_isotropic()]
    if len(iso) != len(gl) or lattice.det(iso) not in (1, -1):
        return "(ii) isotropic members of B do not form a basis of the isotropic part"
    return None


def basis_extension_simple_test(x: HClass, B: Sequence[HClass]) -> bool:
    return basis_extension_failure(x, B) is None


def canonical_completion(x: HClass) -> list[HClass]:
    """A candidate basis containing x built from a unimodular column reduction.

    The symplectic part of x is reduced to ``d * e_1`` by integer row
    operations, tracking the inverse change of basis.  The remaining
    columns of that inverse, plus the end loops, complete x; the result is
    a basis exactly when ``d == 1``.
    """
    S = x.surface
    W = _window_for([x])
    sym = [i for i in W if i.kind != "g"]
    gl = end_loops(S)
    v = x.vector(sym)
    m = len(sym)
    if m == 0 or not any(v):
        rest = gl[:len(W) - 1]
        return [x] + [HClass._raw(S, {i: 1}) for i in rest]
    C = lattice.identity(m)  # invariant: X == C v (column view)

    def col_add(i, j, q):
        # v_i -= q v_j  is compensated by  C[:, j] += q C[:, i]
        for r in range(m):
            C[r][j] += q * C[r][i]

    while True:
        nz = [i for i in range(m) if v[i] != 0]
        p = min(nz, key=lambda i: abs(v[i]))
        if len(nz) == 1:
            break
        for i in nz:
            if i != p:
                q = v[i] // v[p]
                v[i] -= q * v[p]
                col_add(i, p, q)
    if p != 0:
        v[0], v[p] = v[p], v[0]
        for r in range(m):
            C[r][0], C[r][p] = C[r][p], C[r][0]
    if v[0] < 0:
        v[0] = -v[0]
        for r in range(m):
            C[r][0] = -C[r][0]
    out = [x]
    for j in range(1, m):
        out.append(HClass._raw(S, {sym[r]: C[r][j] for r in range(m) if C[r][j]}))
    out.extend(HClass._raw(S, {i: 1}) for i in gl)
    return out


# --- arc functionals -------------------------------------------------------

class Functional:
    """An integer linear functional on H_1, i.e. a relative class of arcs.

    Values are stored on the basis; the value on ``g0`` is derived from
    the relation among end loops.
    """

    __slots__ = ("surface", "_v")

    def __init__(self, surface: SurfaceModel, values: Mapping | None = None):
        v = {}
        for k, val in (values or {}).items():
            idx = as_index(k)
            check_index(surface, idx)
            if isinstance(val, bool) or not isinstance(val, int):
                raise InvalidIndex(f"value on {idx.key} must be an integer")
            if val:
                v[idx] = val
        self.surface = surface
        self._v = v

    def __call__(self, x: HClass) -> int:
        if x.surface != self.surface:
            raise SurfaceMismatch("functional and class live on different surfaces")
        v = self._v
        return sum(c * v.get(i, 0) for i, c in x._c.items())

    def value(self, idx) -> int:
        return self._v.get(as_index(idx), 0)

    def end_values(self) -> tuple[int, ...]:
        """Values on ``g_0, ..., g_{n-1}``; ``f(g_0)`` is minus the sum of the others."""
        rest = tuple(self._v.get(BasisIndex("g", e, 0), 0) for e in range(1, self.surface.n_ends))
        return (-sum(rest),) + rest

    def to_keys(self) -> dict[str, int]:
        return {i.key: v for i, v in sorted(self._v.items(), key=lambda t: t[0].sort_key())}

    def __eq__(self, other):
        if not isinstance(other, Functional):
            return NotImplemented
        return self.surface == other.surface and self._v == other._v

    def __repr__(self):
        return f"Functional({self.to_keys()})"


@dataclass(frozen=True)
class ArcVerdict:
    is_arc: bool
    endpoints: tuple[int, int] | None  # (start end, finish end)
    support: frozenset[int]


def make_arc_functional(S: SurfaceModel, from_end: int, to_end: int,
                        handle_values: Mapping | None = None) -> Functional:
    """Functional of an arc running from ``from_end`` to ``to_end``.

    It is -1 on the loop around the start, +1 on the loop around the
    finish, zero on other end loops, and takes the given values on
    symplectic basis elements.
    """
    for e in (from_end, to_end):
        if not 0 <= e < S.n_ends:
            raise InvalidIndex(f"no end {e}")
    if from_end == to_end:
        raise SameEnd("an arc needs two distinct ends")
    values = {}
    for k, val in (handle_values or {}).items():
        idx = as_index(k)
        if idx.kind == "g":
            raise InvalidIndex("handle values may only be given on symplectic basis elements")
        values[idx] = val
    if to_end != 0:
        values[BasisIndex("g", to_end, 0)] = 1
    if from_end != 0:
        values[BasisIndex("g", from_end, 0)] = -1
    return Functional(S, values)


def classify_functional(f: Functional) -> ArcVerdict:
    ev = f.end_values()
    support = frozenset(e for e, v in enumerate(ev) if v)
    if len(support) == 2 and all(abs(ev[e]) == 1 for e in support):
        start = next(e for e in support if ev[e] == -1)
        finish = next(e for e in support if ev[e] == 1)
        return ArcVerdict(True, (start, finish), support)
    return ArcVerdict(False, None, support)


def arc_pairing(S: SurfaceModel, from_end: int, to_end: int, x: HClass) -> int:
    """Pairing of x with an arc between two ends carrying no handle weight."""
    return make_arc_functional(S, from_end, to_end)(x)
