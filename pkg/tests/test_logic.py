import itertools

import pytest
from hypothesis import given, settings, strategies as st

from doxa.beliefs.reality import Belief, Reality
from doxa.logic.buchi import ltl_to_buchi
from doxa.logic.checking import belief_satisfies, world_counterexample, world_satisfies
from doxa.logic.formulas import (And, Globally, Implies, Know, Not, Prop, FormulaSyntaxError,
                                 format_formula, parse_bltl, parse_ltl)
from doxa.logic.semantics import evaluate_lasso
from doxa.world import WorldBuilder

from conftest import bundle
from oracles import buchi_accepts, lasso_holds, random_lasso, random_ltl, rng_for


def test_parse_collision_goal():
    f = parse_ltl("G (!(xe=2 & ye=2) | !(xo=2))")
    assert isinstance(f, Globally)
    assert parse_ltl(format_formula(f)) == f


def test_parse_knowledge_formula():
    f = parse_bltl("K G ((!(xo=5) & !(xo=6)) | undef)")
    assert isinstance(f, Know) and not f.current
    assert parse_bltl("Kc xe=3").current


def test_parse_errors():
    with pytest.raises(FormulaSyntaxError) as exc:
        parse_ltl("F")
    assert exc.value.pos >= 0
    with pytest.raises(FormulaSyntaxError):
        parse_ltl("K p")
    with pytest.raises(FormulaSyntaxError):
        parse_bltl("K (K p)")


def test_round_trip_random():
    rng = rng_for(3)
    for _ in range(300):
        f = random_ltl(rng, ["p", "q", "x=1"], 4)
        assert parse_ltl(format_formula(f)) == f


def test_buchi_shapes():
    # true and G !undef both come out as a single accepting self-looping state
    for text in ("true", "G !undef"):
        a = ltl_to_buchi(parse_ltl(text))
        assert a.size == 1 and a.accepting == frozenset(a.init)
    f = parse_ltl("F ye=3")
    a = ltl_to_buchi(f)
    atoms = ["ye=3", "p"]
    for n in range(1, 7):
        for k in range(1, n + 1):
            for word in itertools.product([frozenset(), frozenset({"ye=3"}), frozenset({"p"})],
                                          repeat=n):
                stem, loop = word[:n - k], word[n - k:]
                assert buchi_accepts(a, stem, loop) == lasso_holds(f, stem, loop)
    assert atoms


def chain():
    b = WorldBuilder("chain").prop("p", "q").actions(ego=["a"], env=["e"])
    b.state("c0").state("c1", ["q"]).state("c2", ["p"])
    b.initial("c0").set_sink("su")
    b.edge("c0", "c1", [("a", "e")]).edge("c1", "c1", [("a", "e")])
    b.edge("c2", "c2", [("a", "e")]).edge("su", "su", [("a", "e")])
    return b.build()


def test_world_satisfies_examples(design_world):
    assert world_satisfies(design_world, design_world.init, parse_ltl("true"))
    z = parse_ltl("G((!xo=5 & !xo=6) | undef)")
    assert world_satisfies(design_world, design_world.init, z)
    w = chain()
    # p labels an unreachable branch
    assert not world_satisfies(w, w.init, parse_ltl("F p"))
    assert world_satisfies(w, w.init, parse_ltl("F q"))
    assert world_satisfies(w, [w.state_id("c2")], parse_ltl("F p"))


def test_counterexample_violates(design_world):
    f = parse_ltl("G !ye=3")
    ce = world_counterexample(design_world, design_world.init, f)
    assert ce is not None
    labs = [design_world.label_sets[s] for s in ce.stem + ce.loop]
    assert not lasso_holds(f, labs[:len(ce.stem)], labs[len(ce.stem):])


def test_belief_satisfies_examples(switched):
    b = WorldBuilder("one").prop("p").actions(ego=["a"], env=["e"])
    b.state("s0", ["p"]).initial("s0").set_sink("su")
    b.edge("s0", "s0", [("a", "e")]).edge("su", "su", [("a", "e")])
    w = b.build()
    single = Belief("b", (Reality.of(w, ["s0"]),))
    assert belief_satisfies(single, parse_bltl("K p & Kc p"))
    cat = switched.catalog
    assert belief_satisfies(cat["B01"], parse_bltl("K xe=1"))
    # B21: the slow car went straight on; ego currently is at x=3
    assert belief_satisfies(cat["B21"], parse_bltl("Kc xe=3"))
    assert not belief_satisfies(cat["B21"], parse_bltl("K xe=3"))


# --------------------------------------------------------------------------
# properties

def test_buchi_against_lasso_evaluation():
    rng = rng_for(11)
    atoms = ["p", "q"]
    for _ in range(300):
        f = random_ltl(rng, atoms, rng.randint(1, 4))
        a = ltl_to_buchi(f)
        for _ in range(3):
            stem, loop = random_lasso(rng, atoms)
            want = lasso_holds(f, stem, loop)
            assert buchi_accepts(a, stem, loop) == want, (f, stem, loop)
            assert evaluate_lasso(f, stem, loop) == want


letters = st.frozensets(st.sampled_from(["p", "q"]))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6), st.lists(letters, max_size=3), st.lists(letters, min_size=1, max_size=3))
def test_semantics_agree_hypothesis(seed, stem, loop):
    f = random_ltl(rng_for(seed), ["p", "q"], 3)
    assert evaluate_lasso(f, stem, loop) == lasso_holds(f, stem, loop)
    assert buchi_accepts(ltl_to_buchi(f), stem, loop) == lasso_holds(f, stem, loop)


def test_model_checking_soundness():
    from oracles import random_world
    rng = rng_for(5)
    for i in range(60):
        w = random_world(rng, rng.randint(2, 5), unique=False)
        f = random_ltl(rng, ["bad", "goal"], 3)
        ce = world_counterexample(w, w.init, f)
        if ce is None:
            continue
        labs = [w.label_sets[s] for s in ce.stem + ce.loop]
        assert not lasso_holds(f, labs[:len(ce.stem)], labs[len(ce.stem):])
        assert not world_satisfies(w, w.init, f)


def test_k_and_kc_distinguish_initial_and_current():
    w = chain()
    r = Reality.of(w, ["c1"])
    b = Belief("b", (r,))
    assert belief_satisfies(b, Know(Globally(Prop("q")), current=True))
    assert not belief_satisfies(b, Know(Globally(Prop("q"))))
    assert belief_satisfies(b, Know(Implies(Prop("q"), Prop("q"))))
    assert belief_satisfies(b, Not(And(Know(Prop("p")), Know(Prop("q")))))


def test_running_knowledge_holds_on_catalog():
    b = bundle("initially-switched")
    K = b.knowledge
    for bel in b.catalog:
        for n, f in K.formulas.items():
            assert belief_satisfies(bel, f), (bel.id, n)
