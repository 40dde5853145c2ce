"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` to see the lines as they
happen; they are also repeated in the terminal summary.  Running this
file as a script prints just the lines.
"""
import copy
import functools
import itertools
import random
import time

import pytest

from conftest import ACCEPTANCE_LINES, model
from homrep import lattice
from homrep.automorphism import end_map, make_automorphism, negate, preserves_filtration
from homrep.errors import HomrepError
from homrep.filtration import (admissible_sets, flare_leq, reconstruct_ends,
                               standard_flare, standard_sample, truncated_lattice)
from homrep.homology import (BasisIndex, HClass, ai_pair, arc_pairing, basis_extension_simple_test,
                             canonical_completion, end_class, end_loops, is_simple_isotropic,
                             is_simple_nonisotropic, nonisotropic_witness)
from homrep.lattice import Lattice
from homrep.realization import (Generator, Verdict, build_certificate, check_membership, coherence,
                                eval_word, factor_window, verify_certificate)
from homrep.surface import enumerate_models, jacobs_ladder, satisfies_star
from wordgen import handle_indices, random_simple_class, random_word, word_permutation


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line, flush=True)
    ACCEPTANCE_LINES.append(line)
    return ok


# --- 1. the Jacob's ladder counterexample ------------------------------------

def test_criterion_1_phi2_regression():
    t0 = time.perf_counter()
    S = jacobs_ladder()
    phi2 = make_automorphism(S, ["g1"], [[-1]])
    v = check_membership(phi2)
    w = check_membership(negate(phi2))
    dt = time.perf_counter() - t0
    d = v.details
    ok = (v.verdict is Verdict.UP_TO_SIGN and w.verdict is Verdict.AS_IS
          and v.end_map == (0, 1) and end_map(phi2) == (0, 1)
          and v.stage == "coherence" and d["lends_image"] != d["f_lends"] and dt < 1.0)
    report(1, ok, f"phi2 -> {v.verdict.value}, -phi2 -> {w.verdict.value}, f = {v.end_map}, "
                  f"lends(phi2(c)) = {d['lends_image']} vs f(lends(c)) = {d['f_lends']}, {dt * 1e3:.0f} ms")
    assert ok


# --- 2. simple classes: three routes for nonseparating, arcs for separating --

def _window_a(S):
    """Up to four symplectic basis elements, padded with end loops to rank 4."""
    sym = handle_indices(S, tail_len=2)[:4]
    return sym + end_loops(S)[:4 - len(sym)]


def _window_b(S):
    """All end loops, plus one handle curve when the rank stays at most 4."""
    W = list(end_loops(S))
    sym = handle_indices(S, tail_len=1)
    if sym and len(W) <= 3:
        W.append(sym[0])
    return W


def _simple_class_disagreements():
    models = list(enumerate_models(5, 2))
    bad_a = bad_b = n_a = n_b = 0
    for S in models:
        Wa = _window_a(S)
        for v in itertools.product(range(-3, 4), repeat=len(Wa)):
            if not any(v):
                continue
            x = HClass.from_vector(S, Wa, v)
            r1 = is_simple_nonisotropic(x)
            w = nonisotropic_witness(x)
            r2 = w is not None and ai_pair(x, w) == 1
            r3 = basis_extension_simple_test(x, canonical_completion(x))
            n_a += 1
            if not r1 == r2 == r3:
                bad_a += 1
        Wb = _window_b(S)
        pairs = [(e, f) for e in S.end_ids for f in S.end_ids if e != f]
        for v in itertools.product(range(-3, 4), repeat=len(Wb)):
            if not any(v):
                continue
            x = HClass.from_vector(S, Wb, v)
            lhs = is_simple_isotropic(x)
            rhs = x.is_isotropic() and all(abs(arc_pairing(S, e, f, x)) <= 1 for e, f in pairs)
            n_b += 1
            if lhs != rhs:
                bad_b += 1
    return len(models), n_a, bad_a, n_b, bad_b


def test_criterion_2_simple_class_equivalences():
    t0 = time.perf_counter()
    n_models, n_a, bad_a, n_b, bad_b = _simple_class_disagreements()
    dt = time.perf_counter() - t0
    ok = bad_a == 0 and bad_b == 0 and dt < 60
    report(2, ok, f"{n_models} models; (a) {n_a} classes, {bad_a} disagreements; "
                  f"(b) {n_b} classes, {bad_b} disagreements; {dt:.1f} s")
    assert ok


# --- 3 and 7. exhaustive window matrices ------------------------------------

DICHOTOMY_MODELS = [
    ((0, "NN"), ["aT0.0", "bT0.0", "g1"]),
    ((0, "PPPP"), ["g1", "g2", "g3"]),
    ((0, "NPP"), ["aT0.0", "bT0.0", "g1", "g2"]),
    ((1, "PPP"), ["aC0", "bC0", "g1", "g2"]),
]
BOX = range(-2, 3)


def _det_small(D):
    if len(D) == 1:
        return D[0][0]
    if len(D) == 2:
        return D[0][0] * D[1][1] - D[0][1] * D[1][0]
    return lattice.det(D)


def _block_matrix(n, sym, iso, A, B, D):
    M = [[0] * n for _ in range(n)]
    if sym:
        i0, i1 = sym
        M[i0][i0], M[i0][i1], M[i1][i0], M[i1][i1] = A
        for r, row in enumerate(iso):
            M[row][i0], M[row][i1] = B[2 * r], B[2 * r + 1]
    for r, row in enumerate(iso):
        for c, col in enumerate(iso):
            M[row][col] = D[r][c]
    return M


def _coherence_values(phi, f, classes):
    return {coherence(phi, c, f) for c in classes}


def _unit_classes(S):
    """Nonzero isotropic classes with end coordinates in {0, 1}."""
    gl = end_loops(S)
    out = []
    for v in itertools.product((0, 1), repeat=len(gl)):
        if any(v):
            out.append(HClass.from_vector(S, gl, v))
    return out


def block_form_rejections(S, W, rng, samples=300):
    """Random matrices outside the block form are rejected by validation."""
    n = len(W)
    sym = [i for i, w in enumerate(W) if not w.startswith("g")]
    iso = [i for i, w in enumerate(W) if w.startswith("g")]
    accepted = 0
    for _ in range(samples):
        M = [[rng.choice(BOX) for _ in range(n)] for _ in range(n)]
        if sym:
            A = (M[sym[0]][sym[0]], M[sym[0]][sym[1]], M[sym[1]][sym[0]], M[sym[1]][sym[1]])
            if all(M[r][c] == 0 for r in sym for c in iso) and A[0] * A[3] - A[1] * A[2] == 1:
                continue
        try:
            make_automorphism(S, W, M)
        except HomrepError:
            continue
        if not sym:
            continue
        accepted += 1
    return accepted


@functools.lru_cache(maxsize=None)
def dichotomy_corpus():
    """Run the exhaustive sweep once; criteria 3 and 7 both read it."""
    stats = []
    for (g, kinds), W in DICHOTOMY_MODELS:
        S = model(g, kinds)
        assert satisfies_star(S)
        idx = [BasisIndex.parse(w) for w in W]
        n = len(W)
        sym = [i for i, w in enumerate(idx) if w.kind != "g"]
        iso = [i for i, w in enumerate(idx) if w.kind == "g"]
        k = len(iso)
        As = [a for a in itertools.product(BOX, repeat=4) if a[0] * a[3] - a[1] * a[2] == 1] if sym else [()]
        # end_map reads only the end-loop block, so it can be decided per block
        Ds, n_unimodular = [], 0
        for flat in itertools.product(BOX, repeat=k * k):
            D = [list(flat[r * k:(r + 1) * k]) for r in range(k)]
            if _det_small(D) not in (1, -1):
                continue
            n_unimodular += 1
            probe = make_automorphism(S, W, _block_matrix(n, sym, iso, (1, 0, 0, 1), [0] * (2 * k), D))
            try:
                end_map(probe)
            except HomrepError:
                continue
            Ds.append(D)
        Bs = list(itertools.product(BOX, repeat=2 * k)) if sym else [()]
        classes = _unit_classes(S)
        st = dict(model=S.label(), window=W, valid=len(As) * n_unimodular * len(Bs), end_map_ok=0,
                  filtration_ok=0, violations=0, coherence_checked=0, coherence_violations=0)
        for A in As:
            for D in Ds:
                for B in Bs:
                    phi = make_automorphism(S, W, _block_matrix(n, sym, iso, A, B, D))
                    st["end_map_ok"] += 1
                    mphi = negate(phi)
                    v1 = check_membership(phi)
                    v2 = check_membership(mphi)
                    passing = [(p, v) for p, v in ((phi, v1), (mphi, v2)) if v.stage == "coherence"]
                    if v1.stage == "coherence":
                        st["filtration_ok"] += 1
                        if (v1.verdict is Verdict.AS_IS) == (v2.verdict is Verdict.AS_IS):
                            st["violations"] += 1
                    for p, v in passing:
                        vals = _coherence_values(p, v.end_map, classes)
                        st["coherence_checked"] += 1
                        if len(vals) != 1 or "neither" in vals:
                            st["coherence_violations"] += 1
        stats.append(st)
    return stats


def test_criterion_3_dichotomy_exhaustive():
    t0 = time.perf_counter()
    rng = random.Random(3)
    stats = dichotomy_corpus()
    # the block form is forced: random matrices outside it never validate
    leaks = sum(block_form_rejections(model(g, kinds), W, rng) for (g, kinds), W in DICHOTOMY_MODELS)
    dt = time.perf_counter() - t0
    checked = sum(s["filtration_ok"] for s in stats)
    viol = sum(s["violations"] for s in stats)
    ok = viol == 0 and leaks == 0 and checked > 0
    per = ", ".join(f"{s['model']}: {s['filtration_ok']}" for s in stats)
    report(3, ok, f"{checked} filtration-preserving matrices ({per}), {viol} violations, "
                  f"{leaks} off-form matrices accepted, {dt:.0f} s")
    assert ok


# --- 4. random generator words -----------------------------------------------

WORD_MODELS = [(0, "N"), (0, "NN"), (0, "PPPP"), (1, "PPP"), (1, "NPP")]
N_WORDS = 1000


@functools.lru_cache(maxsize=None)
def word_corpus():
    rng = random.Random(4)
    out = []
    for g, kinds in WORD_MODELS:
        S = model(g, kinds)
        for _ in range(N_WORDS):
            out.append((S, random_word(S, rng, 20)))
    return out


def _check_word(S, word):
    phi = eval_word(S, word)
    v = check_membership(phi)
    if v.verdict is not Verdict.AS_IS:
        return f"verdict {v.verdict.value} ({v.reason})"
    if S.n_ends > 1 and satisfies_star(S):
        if end_map(phi) != word_permutation(S, word):
            return "end map differs from the composed permutation"
        chk = preserves_filtration(phi)
        if not chk.ok:
            return "filtration: " + chk.diagnostics[0]
    cert = build_certificate(phi, 3)
    r = verify_certificate(cert, phi)
    if not r.ok:
        return f"certificate: {r.condition} at stage {r.stage}: {r.message}"
    return None


def test_criterion_4_generator_words():
    t0 = time.perf_counter()
    failures = []
    for S, word in word_corpus():
        try:
            why = _check_word(S, word)
        except HomrepError as exc:
            why = f"{type(exc).__name__}: {exc}"
        if why:
            failures.append((S.label(), len(word), why))
    dt = time.perf_counter() - t0
    ok = not failures
    report(4, ok, f"{len(word_corpus())} words on {len(WORD_MODELS)} models, {len(failures)} failures, {dt:.0f} s"
           + (f"; first: {failures[0]}" if failures else ""))
    assert ok


# --- 5. factorization round trip ---------------------------------------------

def test_criterion_5_factorization_round_trip():
    rng = random.Random(5)
    t0 = time.perf_counter()
    good = 0
    total = 200
    for t in range(total):
        S = model(1 + t % 3, "PPP")
        word = []
        for _ in range(rng.randint(1, 10)):
            c = random_simple_class(S, rng, span=2)
            word.append(Generator.twist(c, rng.choice([1, -1])))
        phi = eval_word(S, word)
        try:
            w = factor_window(phi)
        except HomrepError:
            continue
        back = eval_word(S, w)
        Wn = sorted(set(phi.window) | set(back.window), key=lambda i: i.sort_key())
        if back.matrix_on(Wn) == phi.matrix_on(Wn):
            good += 1
    dt = time.perf_counter() - t0
    ok = good == total and dt < 30
    report(5, ok, f"{good}/{total} exact round trips, {dt:.1f} s")
    assert ok


# --- 6. end reconstruction ---------------------------------------------------

def _star_fixture_models():
    return [S for S in enumerate_models(5, 1) if satisfies_star(S)]


def _sample_invariant_violations(S, sample):
    mods = sample.modules
    bad = []
    depth = sample.depth
    cols = list(end_loops(S))
    for e in S.nonplanar_ends:
        for k in range(depth):
            cols += [BasisIndex("aT", e, k), BasisIndex("bT", e, k)]
    # ordering and end sets
    for V1, V2 in itertools.product(mods, repeat=2):
        le = flare_leq(V1, V2)
        if le and not V1.L <= V2.L:
            bad.append(("order", V1, V2))
        if le and flare_leq(V2, V1) and V1.L != V2.L:
            bad.append(("equal span", V1, V2))
    # disjoint end sets
    gl = end_loops(S)
    for L1, L2 in itertools.combinations(admissible_sets(S), 2):
        if L1 & L2:
            continue
        X, Y = standard_flare(S, L1, 0), standard_flare(S, L2, 0)
        I1 = Lattice([x.vector(gl) for x in X.end_gens()], len(gl))
        I2 = Lattice([x.vector(gl) for x in Y.end_gens()], len(gl))
        common = lattice.intersect(I1, I2)
        if L1 | L2 == frozenset(S.end_ids):
            if X.boundary() != -Y.boundary():
                bad.append(("complementary boundaries", L1, L2))
        elif common.rank != 0:
            bad.append(("disjoint flares meet", L1, L2))
    # each end is cut out by the modules containing it
    for e in S.end_ids:
        inter = None
        for V in mods:
            if e in V.L:
                T = truncated_lattice(V, cols)
                inter = T if inter is None else lattice.intersect(inter, T)
        want = Lattice([end_class(S, e).vector(cols)], len(cols))
        if inter is None or inter != want:
            bad.append(("isolated end", e))
    return bad


def test_criterion_6_end_reconstruction():
    t0 = time.perf_counter()
    models = _star_fixture_models()
    bad = []
    for S in models:
        sample = standard_sample(S, 2)
        try:
            rec = reconstruct_ends(sample)
        except HomrepError as exc:
            bad.append((S.label(), type(exc).__name__))
            continue
        if rec.n_filters != S.n_ends or sorted(rec.theta_inv) != list(S.end_ids):
            bad.append((S.label(), "filter count"))
        for i, e in enumerate(rec.filter_end):
            if {j for j, V in enumerate(sample.modules) if e in V.L} != set(rec.filters[i]):
                bad.append((S.label(), f"filter {i} is not the filter of end {e}"))
        bad += [(S.label(),) + v[:1] for v in _sample_invariant_violations(S, sample)]
    dt = time.perf_counter() - t0
    ok = not bad
    report(6, ok, f"{len(models)} models, {len(bad)} violations, {dt:.1f} s"
           + (f"; first: {bad[0]}" if bad else ""))
    assert ok


# --- 7. coherence does not depend on the test class -------------------------

def test_criterion_7_coherence_independence():
    t0 = time.perf_counter()
    stats = dichotomy_corpus()
    checked = sum(s["coherence_checked"] for s in stats)
    viol = sum(s["coherence_violations"] for s in stats)
    for S, word in word_corpus():
        if S.n_ends < 2 or not satisfies_star(S):
            continue
        phi = eval_word(S, word)
        if not preserves_filtration(phi).ok:
            continue
        f = end_map(phi)
        for p in (phi, negate(phi)):
            vals = _coherence_values(p, f, _unit_classes(S))
            checked += 1
            if len(vals) != 1 or "neither" in vals:
                viol += 1
    dt = time.perf_counter() - t0
    ok = viol == 0 and checked > 0
    report(7, ok, f"{checked} filtration-preserving maps, {viol} violations, {dt:.0f} s (sweep shared with 3)")
    assert ok


# --- 8. certificate mutations ------------------------------------------------

def _bump(x: HClass, rng) -> HClass:
    S = x.surface
    pool = sorted(set(x.support) | set(end_loops(S)), key=lambda i: i.sort_key())
    i = rng.choice(pool)
    return x + HClass._raw(S, {i: rng.choice([1, -1])})


def _mutate(cert, S, rng):
    """Change one entry of one stage; returns the mutated copy and a description."""
    c = copy.deepcopy(cert)
    st = rng.choice(c.stages)
    kind = rng.choice(["image", "basis", "anchor_tail", "anchor_punct", "flare_L", "flare_depth", "side"])
    if kind == "image":
        j = rng.randrange(len(st.B_images))
        st.B_images[j] = _bump(st.B_images[j], rng)
    elif kind == "basis":
        j = rng.randrange(len(st.A_basis))
        st.A_basis[j] = _bump(st.A_basis[j], rng)
    elif kind == "anchor_tail" and st.anchor.tails:
        e = rng.choice(sorted(st.anchor.tails))
        tails = dict(st.anchor.tails)
        tails[e] += rng.choice([1, -1]) if tails[e] > 0 else 1
        st.anchor = type(st.anchor)(st.anchor.core, tails, st.anchor.punctures)
    elif kind == "anchor_punct" and S.punctures:
        p = rng.choice(S.punctures)
        st.anchor = type(st.anchor)(st.anchor.core, st.anchor.tails, st.anchor.punctures ^ {p})
    elif kind in ("flare_L", "flare_depth") and st.flares:
        label = rng.choice(sorted(st.flares))
        X, Y = st.flares[label]
        which = rng.choice([0, 1])
        M = (X, Y)[which]
        if kind == "flare_L":
            others = [L for L in admissible_sets(S) if L != M.L]
            L = rng.choice(others)
            M2 = standard_flare(S, L, 0)
        else:
            if not M.tail_depth:
                return None, None
            M2 = type(M)(S, M.L, {e: d + 1 for e, d in M.tail_depth.items()}, M.window_gens)
        st.flares[label] = (M2, Y) if which == 0 else (X, M2)
    elif kind == "side":
        st.side = "B" if st.side == "A" else "A"
    else:
        return None, None
    return c, f"{kind} at stage {st.k}"


def test_criterion_8_mutation_robustness():
    rng = random.Random(8)
    t0 = time.perf_counter()
    base = []
    for g, kinds in [(0, "NN"), (1, "PPP"), (1, "NPP"), (0, "NNP")]:
        S = model(g, kinds)
        for _ in range(3):
            while True:
                phi = eval_word(S, random_word(S, rng, 8))
                if not phi.trimmed().is_identity():
                    break
            base.append((S, phi, build_certificate(phi, 3)))
    rejected = 0
    named = 0
    undetected = []
    n = 0
    while n < 100:
        S, phi, cert = rng.choice(base)
        mutated, what = _mutate(cert, S, rng)
        if mutated is None:
            continue
        n += 1
        r = verify_certificate(mutated, phi)
        if not r.ok:
            rejected += 1
            if r.condition in ("(1)", "(2)", "(3)", "(4)"):
                named += 1
        else:
            undetected.append((S.label(), what))
    dt = time.perf_counter() - t0
    ok = rejected == 100 and named == 100
    report(8, ok, f"{rejected}/100 mutations rejected, {named} with a named condition, {dt:.1f} s"
           + (f"; undetected: {undetected[:3]}" if undetected else ""))
    assert ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
