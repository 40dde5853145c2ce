"""Deciding which automorphisms of H_1 come from homeomorphisms, with certificates.

* ``check_membership`` runs the decision pipeline: end map, filtration
  check, then a single coherence test on one separating class.
* ``factor_window`` writes a realizable automorphism as a word in Dehn
  twist actions and puncture swaps.
* ``build_certificate`` records a finite back-and-forth exhaustion of the
  surface on both sides of the map; ``verify_certificate`` re-checks such
  a record using only homology and flare primitives.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from . import lattice
from .automorphism import (FinAutomorphism, apply_class, apply_flare, compose, compose_all,
                           end_map, invert, preserves_filtration,
                           puncture_swap_auto, transvection_auto)
from .errors import (DepthTooSmall, FactorizationIncomplete, FiltrationNotPreserved,
                     HomrepError, NotRealizable, NotSimpleIsotropic, UnsupportedSurface)
from .filtration import (FlareModule, flare_check, flare_contains, flare_leq, standard_flare)
from .homology import BasisIndex, HClass, end_class, end_loops, lends_of_class, sort_indices
from .lattice import Lattice
from .surface import SurfaceModel, satisfies_star


class Verdict(str, enum.Enum):
    AS_IS = "RealizableAsIs"
    UP_TO_SIGN = "RealizableUpToSign"
    NOT_REALIZABLE = "NotRealizable"


@dataclass(frozen=True)
class MembershipVerdict:
    verdict: Verdict
    stage: str                     # "trivial", "end_map", "filtration" or "coherence"
    reason: str
    end_map: tuple[int, ...] | None = None
    details: dict = field(default_factory=dict)

    @property
    def realizable(self) -> bool:
        return self.verdict is Verdict.AS_IS

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "stage": self.stage,
            "reason": self.reason,
            "end_map": list(self.end_map) if self.end_map is not None else None,
            "details": self.details,
        }


def coherence(phi: FinAutomorphism, c: HClass, f: Sequence[int]) -> str:
    """Compare ``f(lends(c))`` with ``lends(phi(c))`` for a simple isotropic c.

    Returns ``"same"``, ``"complement"`` or ``"neither"``.
    """
    img = apply_class(phi, c)
    try:
        got = lends_of_class(img)
    except NotSimpleIsotropic:
        return "neither"
    want = frozenset(f[e] for e in lends_of_class(c))
    if got == want:
        return "same"
    if got == frozenset(phi.surface.end_ids) - want:
        return "complement"
    return "neither"


def check_membership(phi: FinAutomorphism) -> MembershipVerdict:
    S = phi.surface
    n = S.n_ends
    if n == 1:
        return MembershipVerdict(Verdict.AS_IS, "trivial",
                                 "one end: preserving the pairing is enough", (0,))
    if S.is_loch_ness_variant():
        # one nonplanar end plus one puncture: the map must fix the end loop
        p = S.punctures[0]
        g = end_class(S, p)
        img = apply_class(phi, g)
        if img == g:
            return MembershipVerdict(Verdict.AS_IS, "trivial", "end loop is fixed", (0, 1))
        if img == -g:
            return MembershipVerdict(Verdict.UP_TO_SIGN, "trivial",
                                     "end loop is negated; the negated map fixes it", (0, 1))
        return MembershipVerdict(Verdict.NOT_REALIZABLE, "end_map",
                                 f"end loop maps to {img!r}", None)
    if not satisfies_star(S):
        raise UnsupportedSurface(f"{S.label()} is neither covered by the end-reconstruction "
                                 "hypothesis nor a Loch Ness variant")
    try:
        f = end_map(phi)
    except FiltrationNotPreserved as exc:
        return MembershipVerdict(Verdict.NOT_REALIZABLE, "end_map", str(exc))
    chk = preserves_filtration(phi)
    if not chk.ok:
        return MembershipVerdict(Verdict.NOT_REALIZABLE, "filtration", chk.diagnostics[0], f,
                                 {"diagnostics": list(chk.diagnostics)})
    c = end_class(S, 0)
    img = apply_class(phi, c)
    want = sorted(f[e] for e in lends_of_class(c))
    details = {"test_class": c.to_keys(), "f_lends": want}
    try:
        details["lends_image"] = sorted(lends_of_class(img))
    except NotSimpleIsotropic:
        details["lends_image"] = None
    rel = coherence(phi, c, f)
    if rel == "same":
        return MembershipVerdict(Verdict.AS_IS, "coherence", "lends(phi(c)) == f(lends(c))", f, details)
    if rel == "complement":
        return MembershipVerdict(Verdict.UP_TO_SIGN, "coherence",
                                 "lends(phi(c)) is the complement of f(lends(c))", f, details)
    return MembershipVerdict(Verdict.NOT_REALIZABLE, "coherence",
                             "phi(c) is not separating with a compatible end set", f, details)


# --- generator words --------------------------------------------------------

@dataclass(frozen=True)
class Generator:
    """A twist about a simple class (to some power) or a swap of two punctures."""
    kind: str                         # "twist" or "swap"
    cls: HClass | None = None
    power: int = 1
    ends: tuple[int, int] | None = None

    @classmethod
    def twist(cls, c: HClass, power: int = 1) -> "Generator":
        return cls("twist", c, power)

    @classmethod
    def swap(cls, p1: int, p2: int) -> "Generator":
        return cls("swap", None, 1, (p1, p2))

    def to_auto(self, S: SurfaceModel) -> FinAutomorphism:
        if self.kind == "twist":
            return transvection_auto(self.cls, self.power)
        return puncture_swap_auto(S, *self.ends)

    def inverse(self) -> "Generator":
        if self.kind == "twist":
            return Generator("twist", self.cls, -self.power)
        return self


def eval_word(S: SurfaceModel, word: Sequence[Generator]) -> FinAutomorphism:
    """``w_1 o w_2 o ... o w_k``."""
    return compose_all(S, (g.to_auto(S) for g in word))


class _Reducer:
    """Left-multiplies a window matrix by twist actions, recording each one.

    Columns are images of window elements, as integer vectors over the
    window; every recorded twist is applied to all columns.
    """

    def __init__(self, phi: FinAutomorphism):
        self.S = phi.surface
        self.W = phi.window
        self.pos = {w: j for j, w in enumerate(self.W)}
        n = len(self.W)
        self.cols = [[phi.matrix[i][j] for i in range(n)] for j in range(n)]
        self.pairs = [(self.pos[w], self.pos[w.dual()]) for w in self.W if w.kind in ("aC", "aT")]
        self.ops: list[Generator] = []

    def pair(self, u, v) -> int:
        return sum(u[ia] * v[ib] - u[ib] * v[ia] for ia, ib in self.pairs)

    def vec(self, coeffs: dict) -> list[int]:
        v = [0] * len(self.W)
        for idx, c in coeffs.items():
            v[self.pos[idx]] += c
        return v

    def twist(self, c: list[int], power: int):
        if power == 0 or not any(c):
            return
        for j, col in enumerate(self.cols):
            p = self.pair(col, c)
            if p:
                k = power * p
                self.cols[j] = [x + k * y for x, y in zip(col, c)]
        self.ops.append(Generator.twist(HClass.from_vector(self.S, self.W, c), power))


def _symplectic_pairs(W: Sequence[BasisIndex]) -> list[tuple[BasisIndex, BasisIndex]]:
    return [(w, w.dual()) for w in W if w.kind in ("aC", "aT")]


def _reduce_symplectic(R: _Reducer):
    """Bring the symplectic block to the identity by twists about primitive classes."""
    pairs = _symplectic_pairs(R.W)
    P = [(R.pos[a], R.pos[b]) for a, b in pairs]
    e = lambda j: [1 if t == j else 0 for t in range(len(R.W))]
    E = [(e(ia), e(ib)) for ia, ib in P]

    def add(u, v, k=1):
        return [x + k * y for x, y in zip(u, v)]

    def in_pair_clear_q(col_j, i):
        """Euclid inside pair i until the b-coordinate of column col_j vanishes."""
        ia, ib = P[i]
        a, b = E[i]
        for _ in range(10000):
            v = R.cols[col_j]
            p, q = v[ia], v[ib]
            if q == 0:
                return
            if p == 0:
                # move q into the a slot (p -= -q), then clear q (q -= p)
                R.twist(a, -1)
                R.twist(b, -1)
                continue
            if abs(p) >= abs(q):
                R.twist(a, p // q)          # p -= (p // q) q
            else:
                R.twist(b, -(q // p))       # q -= (q // p) p
        raise FactorizationIncomplete("Euclid inside a handle pair did not terminate")

    def move_p(i, j, k):
        """p_i -= k p_j on the tracked column, keeping all b-coordinates."""
        bi, bj = E[i][1], E[j][1]
        bij = add(bi, bj)
        # q_i += p_j, q_j += p_i
        R.twist(bij, 1)
        R.twist(bi, -1)
        R.twist(bj, -1)
        R.twist(E[i][0], k)                 # p_i -= k q_i = p_i - k p_j
        R.twist(bij, -1)
        R.twist(bi, 1)
        R.twist(bj, 1)
        R.twist(bj, -k)                     # clean up q_j

    for i in range(len(P)):
        ia, ib = P[i]
        col_a = ia
        for j in range(i, len(P)):
            in_pair_clear_q(col_a, j)
        # Euclid across pairs on the a-coordinates
        for _ in range(10000):
            v = R.cols[col_a]
            nz = [j for j in range(i, len(P)) if v[P[j][0]] != 0]
            if not nz:
                raise FactorizationIncomplete("column lost its symplectic part")
            if len(nz) == 1:
                break
            m = min(nz, key=lambda j: abs(v[P[j][0]]))
            pm = v[P[m][0]]
            for j in nz:
                if j != m:
                    move_p(j, m, v[P[j][0]] // pm)
                    v = R.cols[col_a]
        else:
            raise FactorizationIncomplete("Euclid across handle pairs did not terminate")
        m = nz[0]
        v = R.cols[col_a]
        if abs(v[P[m][0]]) != 1:
            raise FactorizationIncomplete("image of a handle curve is not primitive")
        if m != i:
            move_p(i, m, -v[P[m][0]])        # p_i = p_m
            v = R.cols[col_a]
            move_p(m, i, v[P[m][0]] * v[P[i][0]])
        v = R.cols[col_a]
        if v[ia] == -1:
            a, b = E[i]
            R.twist(b, 1)                   # (-1, 0) -> (-1, -1)
            R.twist(a, 2)                   # -> (1, -1)
            R.twist(b, 1)                   # -> (1, 0)
        v = R.cols[col_a]
        if v[ia] != 1 or any(v[P[j][0]] or v[P[j][1]] for j in range(len(P)) if j != i) or v[ib]:
            raise FactorizationIncomplete("failed to normalize the image of a handle curve")
        # second column: image of the dual curve
        col_b = ib
        a_i = E[i][0]
        for j in range(i + 1, len(P)):
            for slot in (0, 1):
                w = R.cols[col_b]
                u = E[j][slot]
                # G_{k u}: x -> x + k<x,u> a_i + k<x,a_i> u, and <w, a_i> = -1
                k = w[P[j][slot]]
                if k == 0:
                    continue
                R.twist(add(a_i, u, k), 1)
                R.twist(u, -k * k)
                R.twist(a_i, -1)
        w = R.cols[col_b]
        if w[ia]:
            R.twist(a_i, w[ia])             # p_i -= p_i * q_i with q_i = 1
        w = R.cols[col_b]
        others = [w[x] for j in range(len(P)) if j != i for x in P[j]]
        if w[ib] != 1 or w[ia] or any(others):
            raise FactorizationIncomplete("failed to normalize the image of a dual curve")


def _clear_mixed(R: _Reducer):
    """Remove end-loop parts from images of handle curves by twists about ``w + h``."""
    giso = [j for j, w in enumerate(R.W) if w.kind == "g"]
    for a, b in _symplectic_pairs(R.W):
        ia, ib = R.pos[a], R.pos[b]
        for col, w_idx, sign in ((ia, ib, -1), (ib, ia, 1)):
            v = R.cols[col]
            beta = [0] * len(R.W)
            for j in giso:
                beta[j] = v[j]
            if not any(beta):
                continue
            # x -> x + <x, w> h with <a, b> = 1 and <b, a> = -1
            h = [sign * x for x in beta]
            wv = [1 if j == w_idx else 0 for j in range(len(R.W))]
            R.twist([x + y for x, y in zip(wv, h)], 1)
            R.twist(wv, -1)


def factor_window(phi: FinAutomorphism) -> list[Generator]:
    """A word of twists and puncture swaps evaluating to phi.

    Swaps first fix the end permutation; the symplectic block is then
    reduced to the identity by twists about primitive classes, and the
    remaining end-loop corrections are removed by twists about mixed
    classes ``w + h``.  The result is verified before it is returned.
    """
    S = phi.surface
    try:
        f = list(end_map(phi))
    except (FiltrationNotPreserved, UnsupportedSurface) as exc:
        raise FactorizationIncomplete(f"no end map: {exc}") from exc
    word: list[Generator] = []
    rest = phi
    r = f[:]
    while True:
        moved = [e for e in range(len(r)) if r[e] != e]
        if not moved:
            break
        e = moved[0]
        t = r[e]
        gen = Generator.swap(min(e, t), max(e, t))
        word.append(gen)
        rest = compose(gen.to_auto(S), rest)
        r = [e if x == t else t if x == e else x for x in r]
    for e in S.end_ids:
        if apply_class(rest, end_class(S, e)) != end_class(S, e):
            raise FactorizationIncomplete("end loops are negated; only the negated map is realizable")
    R = _Reducer(rest)
    _reduce_symplectic(R)
    _clear_mixed(R)
    n = len(R.W)
    if any(R.cols[j][i] != (1 if i == j else 0) for i in range(n) for j in range(n)):
        raise FactorizationIncomplete("reduction did not reach the identity")
    word.extend(g.inverse() for g in R.ops)
    if eval_word(S, word) != phi:
        raise FactorizationIncomplete("word does not evaluate to the input")
    return word


# --- certificates -----------------------------------------------------------

@dataclass(frozen=True)
class StarDescriptor:
    """A compact piece of the surface: core, a prefix of each tail, some punctures.

    Its homology is spanned by the core handles, the first ``tails[e]``
    handles on each nonplanar end, and every end loop (boundary curves
    and puncture loops together give all of them).
    """
    core: tuple[int, ...]
    tails: dict
    punctures: frozenset

    def basis(self, S: SurfaceModel) -> list[HClass]:
        out = []
        for i in self.core:
            out.append(HClass._raw(S, {BasisIndex("aC", -1, i): 1}))
            out.append(HClass._raw(S, {BasisIndex("bC", -1, i): 1}))
        for e in sorted(self.tails):
            for k in range(self.tails[e]):
                out.append(HClass._raw(S, {BasisIndex("aT", e, k): 1}))
                out.append(HClass._raw(S, {BasisIndex("bT", e, k): 1}))
        out.extend(HClass._raw(S, {g: 1}) for g in end_loops(S))
        return out

    def components(self, S: SurfaceModel) -> dict[str, FlareModule]:
        """Standard flare for each complementary piece that is a flare."""
        out = {}
        for e in S.nonplanar_ends:
            if S.is_loch_ness_variant():
                break
            out[f"tail:{e}"] = standard_flare(S, {e}, self.tails.get(e, 0))
        for p in S.punctures:
            if p not in self.punctures:
                out[f"puncture:{p}"] = standard_flare(S, {p}, 0)
        return out

    def contains(self, other: "StarDescriptor") -> bool:
        return (set(other.core) <= set(self.core)
                and all(self.tails.get(e, 0) >= t for e, t in other.tails.items())
                and other.punctures <= self.punctures)


def exhaustion_step(S: SurfaceModel, k: int) -> StarDescriptor:
    """The k-th piece of the fixed exhaustion: tails of length k, first k punctures."""
    if S.is_loch_ness_variant():
        punct = frozenset(S.punctures)
    else:
        punct = frozenset(S.punctures[:k])
    return StarDescriptor(tuple(range(S.core_genus)), {e: k for e in S.nonplanar_ends}, punct)


def _cover(S: SurfaceModel, classes: Sequence[HClass], base: StarDescriptor,
           punctures: frozenset) -> StarDescriptor:
    tails = dict(base.tails)
    for x in classes:
        for i, _ in x.items():
            if i.kind in ("aT", "bT"):
                tails[i.end] = max(tails.get(i.end, 0), i.k + 1)
    return StarDescriptor(tuple(range(S.core_genus)), tails, base.punctures | punctures)


@dataclass
class Stage:
    k: int
    side: str                    # "A" on odd stages, "B" on even ones
    anchor: StarDescriptor       # standard piece on the anchored side
    A_basis: list[HClass]
    B_images: list[HClass]
    flares: dict                 # label -> (X, Y)


@dataclass
class Certificate:
    word: list[Generator]
    stages: list[Stage]


def _end_perm(phi: FinAutomorphism) -> list[int]:
    return list(end_map(phi))


def build_certificate(phi: FinAutomorphism, K: int) -> Certificate:
    if K < 1:
        raise DepthTooSmall("at least one stage is needed")
    v = check_membership(phi)
    if v.verdict is not Verdict.AS_IS:
        raise NotRealizable(f"{v.verdict.value}: {v.reason}")
    S = phi.surface
    word = factor_window(phi)
    inv = invert(phi)
    f = list(v.end_map) if v.end_map is not None else list(S.end_ids)
    f_inv = [0] * len(f)
    for e, t in enumerate(f):
        f_inv[t] = e
    stages: list[Stage] = []
    prev_A: list[HClass] = []
    prev_B: list[HClass] = []
    prev_PA: frozenset = frozenset()
    prev_PB: frozenset = frozenset()
    lochness = S.is_loch_ness_variant()
    for k in range(1, K + 1):
        sig = exhaustion_step(S, k)
        if k % 2 == 1:
            anchor = _cover(S, prev_A, sig, prev_PA)
            A = anchor.basis(S)
            B = [apply_class(phi, x) for x in A]
            PA = anchor.punctures
            PB = frozenset(f[p] for p in PA)
            flares = {}
            if not lochness:
                for label, X in anchor.components(S).items():
                    flares[label] = (X, apply_flare(phi, X))
        else:
            PB = frozenset(f[p] for p in prev_PA) | prev_PB
            anchor = _cover(S, prev_B, sig, PB)
            PB = anchor.punctures
            B = anchor.basis(S)
            A = [apply_class(inv, y) for y in B]
            PA = frozenset(f_inv[p] for p in PB)
            flares = {}
            if not lochness:
                for label, Y in anchor.components(S).items():
                    flares[label] = (apply_flare(inv, Y), Y)
        stages.append(Stage(k, "A" if k % 2 == 1 else "B", anchor, A, B, flares))
        prev_A, prev_B, prev_PA, prev_PB = A, B, PA, PB
    cols = sort_indices({i for x in prev_A for i, _ in x.items()} | set(phi.window))
    span = Lattice([x.vector(cols) for x in prev_A], len(cols))
    for w in phi.window:
        if not span.contains(HClass._raw(S, {w: 1}).vector(cols)):
            raise DepthTooSmall(f"{K} stages do not reach {w.key}; use more stages")
    return Certificate(word, stages)


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    condition: str | None = None     # "(1)".."(4)" or "word"
    stage: int | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


def _span(classes: Sequence[HClass], extra: Sequence[HClass] = ()):
    cols = sort_indices({i for x in list(classes) + list(extra) for i, _ in x.items()})
    return cols, Lattice([x.vector(cols) for x in classes], len(cols))


def _same_span(xs: Sequence[HClass], ys: Sequence[HClass]) -> bool:
    cols = sort_indices({i for x in list(xs) + list(ys) for i, _ in x.items()})
    return Lattice([x.vector(cols) for x in xs], len(cols)) == Lattice([y.vector(cols) for y in ys], len(cols))


def _maps_into(phi: FinAutomorphism, X: FlareModule, Y: FlareModule) -> bool:
    """Whether phi(X) is contained in Y, tails included."""
    reach = phi.max_tail()
    S = X.surface
    for x in X.finite_gens():
        if not flare_contains(Y, apply_class(phi, x)):
            return False
    for e, d in X.tail_depth.items():
        if e not in Y.tail_depth:
            return False
        top = max(d, reach.get(e, -1) + 1, Y.tail_depth[e])
        for k in range(d, top):
            for kind in ("aT", "bT"):
                t = HClass._raw(S, {BasisIndex(kind, e, k): 1})
                if not flare_contains(Y, apply_class(phi, t)):
                    return False
    return True


def verify_certificate(cert: Certificate, phi: FinAutomorphism) -> CertificateCheck:
    """Re-check a certificate stage by stage; report the first violated condition.

    (3) recorded images are the images under phi of the recorded basis;
    (1) the anchored piece is standard, contains the k-th exhaustion
        piece, and the last stage reaches the whole window;
    (2) each stage extends the previous one compatibly;
    (4) every complementary flare on the anchored side is paired with a
        flare on the other side with ``phi(H_1(X)) = H_1(Y)`` and
        ``phi([dX]) = [dY]``.
    """
    S = phi.surface
    inv = invert(phi)
    prev = prev2 = None
    for st in cert.stages:
        k = st.k
        # (3)
        if len(st.A_basis) != len(st.B_images):
            return CertificateCheck(False, "(3)", k, "basis and image lists differ in length")
        for i, (x, y) in enumerate(zip(st.A_basis, st.B_images)):
            if x.surface != S or y.surface != S:
                return CertificateCheck(False, "(3)", k, "class from another surface")
            if apply_class(phi, x) != y:
                return CertificateCheck(False, "(3)", k, f"image {i} is {y!r}, phi gives {apply_class(phi, x)!r}")
        cols, span_A = _span(st.A_basis)
        if span_A.rank != len(st.A_basis):
            return CertificateCheck(False, "(3)", k, "recorded basis is not linearly independent")
        # (1)
        want_side = "A" if k % 2 == 1 else "B"
        if st.side != want_side:
            return CertificateCheck(False, "(1)", k, f"stage {k} must be anchored on side {want_side}")
        if k != (prev.k + 1 if prev else 1):
            return CertificateCheck(False, "(1)", k, "stages are not numbered consecutively")
        D = st.anchor
        if any(not 0 <= i < S.core_genus for i in D.core) or \
                any(e not in S.nonplanar_ends or t < 0 for e, t in D.tails.items()) or \
                any(p not in S.punctures for p in D.punctures):
            return CertificateCheck(False, "(1)", k, "anchor descriptor does not fit the surface")
        if not D.contains(exhaustion_step(S, k)):
            return CertificateCheck(False, "(1)", k, "anchor does not contain the exhaustion piece")
        side_basis = st.A_basis if st.side == "A" else st.B_images
        if not _same_span(side_basis, D.basis(S)):
            return CertificateCheck(False, "(1)", k, "anchored basis does not span the anchor's homology")
        # (2)
        if prev is not None:
            both = list(prev.A_basis) + list(st.A_basis)
            cols2 = sort_indices({i for x in both for i, _ in x.items()})
            gens = [x.vector(cols2) for x in st.A_basis]
            for j, x in enumerate(prev.A_basis):
                c = lattice.solve(gens, x.vector(cols2))
                if c is None:
                    return CertificateCheck(False, "(2)", k, f"previous basis element {j} is not in this stage")
                img = HClass.zero(S)
                for ci, y in zip(c, st.B_images):
                    if ci:
                        img = img + ci * y
                if img != prev.B_images[j]:
                    return CertificateCheck(False, "(2)", k, f"stage map disagrees with the previous one on element {j}")
            if prev2 is not None and not D.contains(prev2.anchor):
                return CertificateCheck(False, "(2)", k, "anchor shrinks compared with two stages back")
        # (4)
        lochness = S.is_loch_ness_variant()
        expected = {} if lochness else D.components(S)
        if set(st.flares) != set(expected):
            return CertificateCheck(False, "(4)", k,
                                    f"flare labels {sorted(st.flares)} differ from components {sorted(expected)}")
        for label, (X, Y) in st.flares.items():
            for name, M in (("X", X), ("Y", Y)):
                chk = flare_check(M)
                if not chk.ok:
                    return CertificateCheck(False, "(4)", k, f"{label} {name} is not a flare: {chk.failures[0]}")
            anchored = X if st.side == "A" else Y
            std = expected[label]
            if not (flare_leq(anchored, std) and flare_leq(std, anchored)):
                return CertificateCheck(False, "(4)", k, f"{label} is not the complementary piece of the anchor")
            if not (_maps_into(phi, X, Y) and _maps_into(inv, Y, X)):
                return CertificateCheck(False, "(4)", k, f"{label}: phi(H1(X)) differs from H1(Y)")
            if apply_class(phi, X.boundary()) != Y.boundary():
                return CertificateCheck(False, "(4)", k, f"{label}: boundary is not sent to boundary")
        prev2, prev = prev, st
    if prev is None:
        return CertificateCheck(False, "(1)", None, "certificate has no stages")
    cols, span = _span(prev.A_basis, [HClass._raw(S, {w: 1}) for w in phi.window])
    for w in phi.window:
        if not span.contains(HClass._raw(S, {w: 1}).vector(cols)):
            return CertificateCheck(False, "(1)", prev.k, f"final stage does not reach {w.key}")
    try:
        ok = eval_word(S, cert.word) == phi
    except HomrepError as exc:
        return CertificateCheck(False, "word", None, f"word does not evaluate: {exc}")
    if not ok:
        return CertificateCheck(False, "word", None, "word does not evaluate to phi")
    return CertificateCheck(True)
