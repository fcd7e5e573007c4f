import pytest

from doxa.goals import normalize_goal_list
from doxa.synthesis import (EXHAUSTED, REALIZABLE, UNREALIZABLE, FormationObservation,
                            bounded_synthesis, build_arena, dominates, max_achievable, memoryless,
                            parse_machine, strategy_level, synthesize, verify_arena,
                            verify_strategy)
from doxa.world import WorldBuilder

from oracles import positional_exists, random_world, rng_for


def test_design_world_levels(switched):
    w, g = switched.world, switched.goals
    full = max_achievable(w, g, w.props)
    assert full.level == 3 and not full.conditional
    assert verify_strategy(w, g, 3, w.props, full.machine)
    top = synthesize(w, g, 4, w.props)
    assert top.status == UNREALIZABLE and top.definitive


def test_straight_on_reaches_level_three_only(switched):
    w, g = switched.world, switched.goals
    straight = memoryless({}, default="f")
    assert strategy_level(w, g, w.props, straight) == 3
    res = verify_strategy(w, g, 4, w.props, straight)
    assert not res.ok
    # straight on never reaches ye=3
    assert all(s[0] in "sh" for s in res.counterexample.stem + res.counterexample.loop)


def test_doxastic_strategy_level(switched):
    w, g = switched.world, switched.goals
    arena = build_arena(w, FormationObservation(switched.formation))
    m = switched.strategies["sigma_b"]
    assert verify_arena(arena, g, 3, m)
    assert not verify_arena(arena, g, 4, m)


def _choose():
    """Ego must match a bit it may or may not observe."""
    b = WorldBuilder("choose").prop("p", "bad").actions(ego=["x", "y"], env=["e"])
    b.state("a", ["p"]).state("b").state("ok").state("ko", ["bad"])
    b.initial("a", "b").set_sink("su")
    b.edge("a", "ok", [("x", "e")]).edge("a", "ko", [("y", "e")])
    b.edge("b", "ok", [("y", "e")]).edge("b", "ko", [("x", "e")])
    for s in ("ok", "ko", "su"):
        b.edge(s, s, [("x", "e"), ("y", "e")])
    return b.build()


def test_hiding_the_bit_loses_the_level():
    w = _choose()
    g = normalize_goal_list(["G !bad"])
    assert max_achievable(w, g, ["p"]).level == 3
    assert max_achievable(w, g, []).level == 2
    assert synthesize(w, g, 3, []).status == UNREALIZABLE


def test_empty_goals_and_forced_sink():
    w = _choose()
    assert max_achievable(w, normalize_goal_list([]), []).level == 2
    b = WorldBuilder("doom").prop("p").actions(ego=["x"], env=["e"])
    b.state("d0").initial("d0").set_sink("su")
    b.edge("d0", "su", [("x", "e")]).edge("su", "su", [("x", "e")])
    assert max_achievable(b.build(), normalize_goal_list(["F p"]), []).level == 1


def test_dominates():
    assert dominates(3, 3) and dominates(4, 2) and not dominates(2, 3)


def test_machine_round_trip(switched):
    for m in switched.strategies.values():
        assert parse_machine(m.format()) == m
    w, g = switched.world, switched.goals
    m = max_achievable(w, g, w.props).machine
    assert parse_machine(m.format()) == m


def test_determinism(switched):
    w, g = switched.world, switched.goals
    a = synthesize(w, g, 3, ["xe", "ye", "rp", "bp"]).machine.format()
    b = synthesize(w, g, 3, ["xe", "ye", "rp", "bp"]).machine.format()
    assert a == b


# --------------------------------------------------------------------------
# oracles

def test_exact_against_positional_enumeration():
    rng = rng_for(7)
    g = normalize_goal_list(["G !bad", "F goal"])
    hits = 0
    for _ in range(150):
        w = random_world(rng, rng.randint(2, 6))
        for n, reach in ((3, []), (4, ["goal"])):
            want = positional_exists(w, ["bad"], reach)
            res = synthesize(w, g, n, w.props)
            assert res.definitive
            assert bool(res) == want, (w, n)
            if res:
                hits += 1
                assert verify_strategy(w, g, n, w.props, res.machine)
    assert hits > 30


def test_bounded_agrees_with_exact():
    rng = rng_for(8)
    g = normalize_goal_list(["G !bad", "F goal"])
    for _ in range(40):
        w = random_world(rng, rng.randint(2, 5))
        arena = build_arena(w, w.props)
        exact = synthesize(w, g, 4, w.props)
        # memoryless machines suffice under full observation; failing them
        # is reported as exhausted, never as unrealizable
        status, machine, _ = bounded_synthesis(arena, g.up_to(4), bound=1)
        assert status == (REALIZABLE if exact else EXHAUSTED)
        if machine is not None:
            assert verify_arena(arena, g, 4, machine)


def test_bounded_handles_recurrence():
    # G F goal is outside the exact fragment
    b = WorldBuilder("flip").prop("goal").actions(ego=["x", "y"], env=["e"])
    b.state("u").state("v", ["goal"]).initial("u").set_sink("su")
    b.edge("u", "v", [("x", "e")]).edge("u", "u", [("y", "e")])
    b.edge("v", "u", [("x", "e"), ("y", "e")]).edge("su", "su", [("x", "e"), ("y", "e")])
    w = b.build()
    g = normalize_goal_list(["G F goal"])
    res = synthesize(w, g, 3, w.props)
    assert res.status == REALIZABLE and res.method == "bounded"
    assert verify_strategy(w, g, 3, w.props, res.machine)
    g2 = normalize_goal_list(["G F goal", "G !goal"])
    # level 4 is only refuted up to the memory bound
    top = max_achievable(w, g2, w.props, bound=2)
    assert top.level == 3 and top.conditional


def test_unknown_observation_rejected(switched):
    with pytest.raises((TypeError, ValueError, KeyError)):
        build_arena(switched.world, ["nope"])
