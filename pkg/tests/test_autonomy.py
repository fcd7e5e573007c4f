import pytest

from doxa.autonomy import (BOTTOM, EnvScript, SimulationError, best_choices, current_state_choices,
                           conserves_autonomous, conserves_doxastic, disjoint_union,
                           format_env_script, parse_env_script, run_doxastic_system,
                           synthesize_autonomous, synthesize_current_state_decisive)
from doxa.beliefs import (Belief, BeliefCatalog, KnowledgeLabeling, Reality,
                          check_knowledge_consistency)
from doxa.goals import normalize_goal_list
from doxa.world import WorldBuilder

from conftest import bundle
from oracles import random_doxastic, rng_for


def station(name, left, right):
    """Ego picks a side once; ``station`` marks the sides that have one."""
    b = WorldBuilder(name).prop("station").actions(ego=["left", "right"], env=["e"])
    b.state("c").state("l", ["station"] if left else []).state("r", ["station"] if right else [])
    b.initial("c").set_sink("su")
    b.edge("c", "l", [("left", "e")]).edge("c", "r", [("right", "e")])
    for s in ("l", "r", "su"):
        b.edge(s, s, [("left", "e"), ("right", "e")])
    return b.build()


FIND = normalize_goal_list(["F station"])


def test_disjoint_union_renames_and_merges_sinks():
    r1 = Reality.of(station("w1", True, False), ["c"])
    r2 = Reality.of(station("w2", False, True), ["l"])
    u, ren = disjoint_union(Belief("B", (r1, r2)))
    w = u.world
    assert len(w.states) == 2 * 3 + 1
    assert ren[(0, r1.world.sink)] == ren[(1, r2.world.sink)] == w.sink
    assert {w.states[s] for s in u.current} == {"r0:c", "r1:l"}
    assert {w.states[s] for s in w.init} == {"r0:c", "r1:c"}


def test_unknown_side_is_indecisive():
    r1 = Reality.of(station("w1", True, False), ["c"])
    r2 = Reality.of(station("w2", False, True), ["c"])
    belief = Belief("B", (r1, r2))
    assert synthesize_current_state_decisive(belief, FIND.goals[2]) is None
    # only staying on the road is certain, and both sides do that
    row = best_choices(belief, FIND)
    assert row.level == 2 and set(row.actions) == {"left", "right"}


def test_two_stations_two_best_choices():
    belief = Belief("C", (Reality.of(station("w3", True, True), ["c"]),))
    row = best_choices(belief, FIND)
    assert row.level == 3 and set(row.actions) == {"left", "right"}
    for a, m in row.witnesses.items():
        assert current_state_choices(m, belief) == {a}


def test_one_station_one_choice():
    belief = Belief("D", (Reality.of(station("w4", False, True), ["c"]),))
    row = best_choices(belief, FIND)
    assert row.actions == ("right",) and row.level == 3
    act, m = synthesize_current_state_decisive(belief, FIND.goals[2])
    assert act == "right" and current_state_choices(m, belief) == {"right"}


def test_running_best_choices(switched):
    from doxa.autonomy import best_choice_table
    table = best_choice_table(switched.catalog, switched.goals, switched.world.ego_actions)
    # the hasty car at the intersection is the only reason to turn
    assert table["B12"].actions == ("t",)
    assert table["B11"].actions == ("f",)
    assert all(r.decisive for r in table.values())
    for bid, row in table.items():
        for a, m in row.witnesses.items():
            assert current_state_choices(m, switched.catalog[bid]) == {a}


def test_synthesize_autonomous_running(switched):
    w = switched.world
    res = synthesize_autonomous(w, switched.goals, switched.knowledge, switched.obs,
                                switched.catalog)
    assert res.status == "exists" and res.level == 3
    assert check_knowledge_consistency(res.formation, w, switched.knowledge, switched.catalog)
    aut = conserves_autonomous(w, switched.goals, switched.knowledge, switched.obs,
                               switched.catalog, res.formation)
    assert aut.holds and aut.definitive
    for name, turns in (("slow", False), ("hasty", True)):
        sim = run_doxastic_system(w, res.formation, res.machine, switched.envs[name],
                                  switched.goals)
        assert sim.violations == ()
        assert ("t" in [a for a, _ in sim.actions]) == turns


def test_synthesize_autonomous_mirror_catalog(switched):
    w = switched.world
    # one belief per design state: ego knows exactly where it is
    mirror = BeliefCatalog([Belief(f"M{s}", (Reality(w, frozenset({s})),))
                            for s in range(len(w.states)) if s != w.sink])
    res = synthesize_autonomous(w, switched.goals, KnowledgeLabeling.empty(w), w.props, mirror)
    assert res.status == "exists" and res.filtered == ()
    assert BOTTOM not in res.formation.belief_ids


def test_position_uncertain_has_no_formation():
    b = bundle("position-uncertain")
    res = synthesize_autonomous(b.world, b.goals, b.knowledge, b.obs, b.catalog)
    assert res.status == "none" and res.definitive
    assert set(res.filtered) >= {"B03", "B04"}
    assert conserves_doxastic(b.world, b.goals, b.knowledge, b.obs, b.catalog, b.formation)


def test_permanently_switched_loses_autonomy():
    b = bundle("permanently-switched")
    args = (b.world, b.goals, b.knowledge, b.obs, b.catalog, b.formation)
    assert conserves_doxastic(*args)
    aut = conserves_autonomous(*args)
    assert not aut.holds and aut.definitive
    ce = aut.counterexample
    assert ce.stem[0] == "s1" and len(aut.beliefs.stem) == len(ce.stem)


def test_wrong_coarse_beliefs_conserve():
    b = bundle("wrong-coarse")
    args = (b.world, b.goals, b.knowledge, b.obs, b.catalog, b.formation)
    assert conserves_autonomous(*args).holds


def test_formation_outside_observation_rejected(switched):
    with pytest.raises(ValueError, match="outside the observation set"):
        conserves_doxastic(switched.world, switched.goals, switched.knowledge, ["xe"],
                           switched.catalog, switched.formation)


def test_autonomous_implies_doxastic_small():
    rng = rng_for(33)
    for _ in range(60):
        w, g, cat, f = random_doxastic(rng)
        K = KnowledgeLabeling.empty(w)
        if conserves_autonomous(w, g, K, ["p"], cat, f):
            assert conserves_doxastic(w, g, K, ["p"], cat, f)


# --------------------------------------------------------------------------
# simulation

def test_simulation_of_doxastic_strategy(switched):
    w, m = switched.world, switched.strategies["sigma_b"]
    slow = run_doxastic_system(w, switched.formation, m, switched.envs["slow"], switched.goals)
    assert slow.states[:4] == ("s1", "s2", "s3", "s5") and slow.level == 3
    assert all(a == "f" for a, _ in slow.actions)
    hasty = run_doxastic_system(w, switched.formation, m, switched.envs["hasty"], switched.goals)
    assert [a for a, _ in hasty.actions][1] == "t" and hasty.level == 4
    assert hasty.beliefs[:2] == ("B02", "B12")


def test_simulation_errors(switched):
    w, f, m = switched.world, switched.formation, switched.strategies["sigma_b"]
    with pytest.raises(SimulationError, match="unknown initial state"):
        run_doxastic_system(w, f, m, EnvScript("nowhere"))
    with pytest.raises(SimulationError, match="not an initial state"):
        run_doxastic_system(w, f, m, EnvScript("s2"))
    with pytest.raises(SimulationError, match="env action not enabled"):
        run_doxastic_system(w, f, m, EnvScript("s1", ("zz",)))


def test_env_script_round_trip(switched):
    for sc in switched.envs.values():
        assert parse_env_script(format_env_script(sc)) == sc
    with pytest.raises(SimulationError):
        parse_env_script("env a b\n")
