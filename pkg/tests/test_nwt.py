import random

import pytest

from nwgames import nwa as N
from nwgames.errors import DeletingTransducerError, ValidationError
from nwgames.generate import random_dnwa, random_nwa, random_nwt
from nwgames.nwt import (EPS_LABEL, Nwt, classify, compose, enumerate_image,
                         format_nwt, identity, image_automaton, image_is_total,
                         image_language_automaton, is_nonempty, normalize, parse_nwt,
                         range_automaton, restrict_domain, run_outputs, transduct_member,
                         typecheck, typecheck_counterexample, validate_nwt)
from nwgames.words import cl, format_word, op, parse_word
from oracles import nested_words, nwa_accepts, two_step

P = parse_word


@pytest.fixture
def tab(data):
    return parse_nwt((data / "tab.nwt").read_text())


def relabel(w, x):
    return tuple(op(x) if t.opening else cl(x) for t in w)


def tab_analytic(w, max_len):
    out = set()
    for x in "ab":
        for n in range((max_len - len(w)) // 2 + 1):
            out.add(relabel(w, x) + (op(x),) * n + (cl(x),) * n)
    return out


def test_tab_class(tab):
    assert validate_nwt(tab) == []
    c = classify(tab)
    assert not c.eps_free and c.non_deleting and c.normal_form and not c.relabelling
    assert not c.deterministic


def test_tab_images(tab):
    for w in nested_words({"a", "b"}, 4):
        L = len(w) + 6
        assert {tuple(u) for u in enumerate_image(tab, w, L)} == tab_analytic(w, L)
        assert run_outputs(tab, w, L) == tab_analytic(w, L)


def test_tab_frozen_image():
    # frozen: T_ab(<a></a>) up to length 6
    expected = {"<a></a>", "<b></b>", "<a></a><a></a>", "<b></b><b></b>",
                "<a></a><a><a></a></a>", "<b></b><b><b></b></b>"}
    tab = parse_nwt(open(__file__.replace("test_nwt.py", "data/tab.nwt")).read())
    assert {format_word(u) for u in enumerate_image(tab, P("<a></a>"), 6)} == expected


def test_tab_decisions(tab):
    assert transduct_member(tab, P("<a></a>"), P("<b></b><b><b></b></b>"))
    assert not transduct_member(tab, P("<a></a>"), P("<a></a><b></b>"))
    assert is_nonempty(tab)
    only_a = N.Dnwa.build({"a", "b"}, [("q", "a", "q", "p")], [("q", "p", "a", "q")], (), "q", {"q"})
    assert not typecheck(tab, N.all_well_nested({"a", "b"}), only_a)
    assert not image_is_total(tab, P("<a></a>"), 20)


def test_tab_round_trip(tab):
    again = parse_nwt(format_nwt(tab))
    for w in nested_words({"a", "b"}, 4):
        assert run_outputs(again, w, len(w) + 4) == run_outputs(tab, w, len(w) + 4)
    assert format_nwt(again) == format_nwt(tab)


def test_eps_label_in_text(tab):
    assert EPS_LABEL in format_nwt(tab)


# validation -------------------------------------------------------------------------

def _one_pair(open_out, close_out, alphabet=("a", "b")):
    return Nwt.build(set(alphabet), [("q", "a", "q", "p", open_out)],
                     [("q", "p", "a", "q", close_out)], (), "q", {"q"})


def test_validation_defects():
    assert validate_nwt(_one_pair((op("b"),), (cl("b"),))) == []
    # unmatched output pair
    assert any("well-formedness" in d for d in validate_nwt(_one_pair((op("a"),), (cl("b"),))))
    # synchronisation
    assert any("synchronisation" in d for d in validate_nwt(_one_pair((op("a"), cl("a")), (cl("a"),))))
    # unknown output label
    assert any("not in alphabet" in d for d in validate_nwt(_one_pair((op("z"),), (cl("z"),))))
    # eps-consistency: eps read pushing a non-eps hierarchical state
    T = Nwt.build({"a"}, [("q", None, "q", "p", (op("a"),))], [("q", "p", "a", "q", (cl("a"),))],
                  (), "q", {"q"})
    assert any("eps-consistency" in d for d in validate_nwt(T))
    with pytest.raises(ValidationError):
        parse_nwt(format_nwt(_one_pair((op("a"),), (cl("b"),))))


def test_deleting_constructions_refuse():
    T = _one_pair((), ())
    assert not classify(T).non_deleting
    with pytest.raises(DeletingTransducerError):
        compose(T, T)
    with pytest.raises(DeletingTransducerError):
        range_automaton(T)


# random family ----------------------------------------------------------------------

def _family(seed):
    rng = random.Random(seed)
    sigma = ["a", "b"]
    return rng, sigma, random_nwt(rng, sigma, rng.randint(1, 3), extra=0.3, density=1.0,
                                  eps=0.3 if seed % 3 == 0 else 0.0)


@pytest.mark.parametrize("seed", range(40))
def test_normalize_preserves_images(seed):
    rng, sigma, T = _family(seed)
    assert validate_nwt(T) == []
    Tn = normalize(T)
    assert validate_nwt(Tn) == []
    assert all(len(r.out) <= 1 for r in (*Tn.opens, *Tn.closes))
    assert all(not r.out for r in Tn.internals)
    for w in nested_words(sigma, 4):
        assert run_outputs(Tn, w, 10) == run_outputs(T, w, 10)


@pytest.mark.parametrize("seed", range(40))
def test_image_automaton_matches_runs(seed):
    rng, sigma, T = _family(seed)
    for w in nested_words(sigma, 4):
        B = image_automaton(T, w)
        got = {tuple(u) for u in N.enumerate_language(B, 10)}
        assert got == run_outputs(T, w, 10)
        if got:
            u = min(got, key=len)
            assert transduct_member(T, w, u)


@pytest.mark.parametrize("seed", range(40))
def test_compose_matches_two_step(seed):
    rng = random.Random(500 + seed)
    sigma = ["a", "b"]
    T1 = random_nwt(rng, sigma, rng.randint(1, 3), extra=0.2, density=1.0)
    T2 = random_nwt(rng, sigma, rng.randint(1, 3), extra=0.2, density=1.0)
    C = compose(T1, T2)
    assert validate_nwt(C) == []
    for w in nested_words(sigma, 4):
        L = 3 * len(w) + 4
        assert run_outputs(C, w, L) == two_step(T1, T2, w, L)


def test_identity_and_restrict(tab):
    Id = identity({"a", "b"})
    for w in nested_words({"a", "b"}, 4):
        assert run_outputs(Id, w) == {tuple(w)}
    A2 = N.singleton(P("<a><a></a></a>"), {"a", "b"})
    Rst = restrict_domain(tab, A2)
    assert run_outputs(Rst, P("<b></b>"), 8) == set()
    assert run_outputs(Rst, P("<a><a></a></a>"), 8) == run_outputs(tab, P("<a><a></a></a>"), 8)


@pytest.mark.parametrize("seed", range(30))
def test_is_nonempty_and_language_image(seed):
    rng, sigma, T = _family(1000 + seed)
    found = any(run_outputs(T, w, 12) for w in nested_words(sigma, 6))
    assert is_nonempty(T) == found
    A = random_nwa(rng, sigma, 2, 2)
    B = image_language_automaton(T, A)
    expected = set()
    for w in nested_words(sigma, 4):
        if nwa_accepts(A, w):
            expected |= {u for u in run_outputs(T, w, 6)}
    got = {tuple(u) for u in N.enumerate_language(B, 6)}
    assert expected <= got


@pytest.mark.parametrize("seed", range(30))
def test_typecheck_agrees_with_enumeration(seed, monkeypatch):
    rng, sigma, T = _family(2000 + seed)
    A1 = random_nwa(rng, sigma, 2, 2)
    A2 = random_dnwa(rng, sigma, 2)
    calls = []
    real = N.determinize
    monkeypatch.setattr(N, "determinize", lambda *a, **k: calls.append(1) or real(*a, **k))
    cex = typecheck_counterexample(T, A1, A2)
    assert typecheck(T, A1, A2) == (cex is None)
    assert calls == []
    bad = [u for w in nested_words(sigma, 4) if nwa_accepts(A1, w)
           for u in run_outputs(T, w, 8) if not nwa_accepts(A2, u)]
    if bad:
        assert cex is not None
    if cex is not None:
        assert not nwa_accepts(A2, cex)
