import copy
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import model
from homrep.automorphism import (compose, end_map, identity_auto, invert, make_automorphism, negate,
                                 puncture_swap_auto, transvection_auto)
from homrep.errors import DepthTooSmall, FactorizationIncomplete, NotRealizable, UnsupportedSurface
from homrep.filtration import standard_flare
from homrep.homology import HClass, end_class
from homrep.realization import (Generator, Verdict, build_certificate, check_membership, eval_word,
                                exhaustion_step, factor_window, verify_certificate)
from wordgen import random_generator, random_word, word_permutation


def H(S, **kw):
    return HClass(S, {k.replace("_", "."): v for k, v in kw.items()})


def test_phi2_verdicts(JL):
    p = make_automorphism(JL, ["g1"], [[-1]])
    v = check_membership(p)
    assert v.verdict is Verdict.UP_TO_SIGN and v.stage == "coherence"
    assert v.details["f_lends"] == [0] and v.details["lends_image"] == [1]
    assert check_membership(negate(p)).verdict is Verdict.AS_IS


def test_loch_ness_variants(LN):
    T = transvection_auto(H(LN, aT0_0=1, bT0_1=2))
    assert check_membership(T).verdict is Verdict.AS_IS
    S = model(0, "NP")
    assert check_membership(make_automorphism(S, ["g1"], [[1]])).verdict is Verdict.AS_IS
    v = check_membership(make_automorphism(S, ["g1"], [[-1]]))
    assert v.verdict is Verdict.UP_TO_SIGN
    assert check_membership(negate(make_automorphism(S, ["g1"], [[-1]]))).verdict is Verdict.AS_IS
    assert not check_membership(make_automorphism(S, ["g1"], [[-1]])).realizable


def test_surfaces_outside_the_theory_are_refused():
    for S in [model(0, "PPP"), model(1, "PP")]:
        with pytest.raises(UnsupportedSurface):
            check_membership(identity_auto(S))


def test_not_realizable_stages(P4):
    skew = make_automorphism(P4, ["g1", "g2", "g3"], [[2, 1, 0], [-1, 0, 0], [0, 0, 1]])
    v = check_membership(skew)
    assert v.verdict is Verdict.NOT_REALIZABLE and v.stage == "end_map"
    # end loops negated but permuted compatibly: f(lends) is the complement
    s = puncture_swap_auto(P4, 1, 2)
    assert check_membership(s).verdict is Verdict.AS_IS
    assert check_membership(negate(s)).verdict is Verdict.UP_TO_SIGN


def test_up_to_sign_means_negation_is_realizable():
    rng = random.Random(21)
    for S in [model(1, "PPP"), model(0, "NNP"), model(0, "PPPP")]:
        for _ in range(10):
            phi = eval_word(S, random_word(S, rng, 10))
            m = negate(phi)
            assert check_membership(phi).verdict is Verdict.AS_IS
            assert check_membership(m).verdict is Verdict.UP_TO_SIGN
            assert check_membership(negate(m)).verdict is Verdict.AS_IS


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_conjugation_consistency(seed):
    rng = random.Random(seed)
    S = model(1, "NPPP")
    phi = eval_word(S, random_word(S, rng, 8))
    g = random_generator(S, rng).to_auto(S)
    conj = compose(g, compose(phi, invert(g)))
    assert check_membership(conj).verdict is Verdict.AS_IS
    f, h = end_map(phi), end_map(g)
    hinv = [0] * len(h)
    for e, t in enumerate(h):
        hinv[t] = e
    assert end_map(conj) == tuple(h[f[hinv[e]]] for e in S.end_ids)


# --- factorization ----------------------------------------------------------------

def test_factor_examples(JL):
    S = model(3, "PPP")
    assert factor_window(identity_auto(S)) == []
    T = transvection_auto(H(S, aC0=1))
    w = factor_window(T)
    assert eval_word(S, w) == T
    with pytest.raises(FactorizationIncomplete):
        factor_window(make_automorphism(JL, ["g1"], [[-1]]))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32), g=st.integers(1, 3))
def test_factor_round_trip(seed, g):
    rng = random.Random(seed)
    S = model(g, "NPP")
    word = random_word(S, rng, 10)
    phi = eval_word(S, word)
    w = factor_window(phi)
    assert eval_word(S, w) == phi
    assert word_permutation(S, w) == end_map(phi)


# --- certificates -------------------------------------------------------------------

def test_identity_certificate(JL):
    cert = build_certificate(identity_auto(JL), 2)
    assert len(cert.stages) == 2 and cert.word == []
    assert [stage.side for stage in cert.stages] == ["A", "B"]
    assert verify_certificate(cert, identity_auto(JL)).ok
    for stage in cert.stages:
        assert stage.A_basis == stage.B_images


def test_loch_ness_transvection_certificate(LN):
    T = transvection_auto(H(LN, aT0_0=1))
    cert = build_certificate(T, 3)
    first = cert.stages[0]
    assert first.anchor.tails == {0: 1} and not first.flares
    assert len(first.A_basis) == 2     # one handle, no end loops on a one-ended surface
    assert verify_certificate(cert, T).ok


def test_certificate_refusals(JL):
    with pytest.raises(NotRealizable):
        build_certificate(make_automorphism(JL, ["g1"], [[-1]]), 3)
    deep = transvection_auto(H(JL, aT1_4=1))
    with pytest.raises(DepthTooSmall):
        build_certificate(deep, 2)
    assert verify_certificate(build_certificate(deep, 5), deep).ok


def test_exhaustion_steps_grow():
    S = model(1, "NNPP")
    for k in range(1, 5):
        assert exhaustion_step(S, k + 1).contains(exhaustion_step(S, k))
    assert exhaustion_step(S, 1).punctures == {2}


def _sample_certificate():
    rng = random.Random(31)
    S = model(1, "NPP")
    phi = eval_word(S, random_word(S, rng, 10))
    return S, phi, build_certificate(phi, 3)


def test_certificate_image_mutation_cites_condition_3():
    S, phi, cert = _sample_certificate()
    bad = copy.deepcopy(cert)
    bad.stages[1].B_images[0] = bad.stages[1].B_images[0] + end_class(S, 1)
    r = verify_certificate(bad, phi)
    assert not r.ok and r.condition == "(3)" and r.stage == 2


def test_certificate_flare_mutation_cites_condition_4():
    S, phi, cert = _sample_certificate()
    bad = copy.deepcopy(cert)
    st1 = bad.stages[0]
    label = sorted(st1.flares)[0]
    X, Y = st1.flares[label]
    st1.flares[label] = (X, standard_flare(S, {1, 2}, 0))
    r = verify_certificate(bad, phi)
    assert not r.ok and r.condition == "(4)"


def test_certificate_word_and_anchor_mutations():
    S, phi, cert = _sample_certificate()
    bad = copy.deepcopy(cert)
    bad.word = bad.word + [Generator.swap(1, 2)]
    assert verify_certificate(bad, phi).condition == "word"
    bad = copy.deepcopy(cert)
    bad.stages[2].side = "B"
    assert verify_certificate(bad, phi).condition == "(1)"
    bad = copy.deepcopy(cert)
    bad.stages = bad.stages[:1] + bad.stages[2:]
    assert not verify_certificate(bad, phi).ok


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_build_verify_round_trip(seed):
    rng = random.Random(seed)
    S = rng.choice([model(0, "NN"), model(1, "PPP"), model(0, "NPPP")])
    phi = eval_word(S, random_word(S, rng, 12))
    cert = build_certificate(phi, 4)
    assert verify_certificate(cert, phi).ok
