import pytest

from doxa.beliefs import (Belief, BeliefCatalog, KnowledgeLabeling, NoRuleMatches, Reality,
                          RegexError, RegularBeliefFormation, check_knowledge_consistency,
                          format_catalog, parse_catalog, parse_formation, parse_knowledge,
                          validate_reality)
from doxa.beliefs.knowledge import satisfies_all
from doxa.logic.checking import belief_satisfies
from doxa.logic.formulas import parse_bltl
from doxa.world import WorldBuilder, observable_history

from conftest import bundle, fixture_path
from oracles import initial_paths, random_world, rng_for


OBS = ["xe", "ye", "rp", "bp"]


def test_sensor_formation_examples(switched, design_world):
    f = switched.formation
    # the sensor swaps colours at the start, so the slow car looks red
    assert f.form_belief(observable_history(design_world, ["s1"], OBS)) == "B01"
    assert f.form_belief(observable_history(design_world, ["h1"], OBS)) == "B02"
    hist = observable_history(design_world, ["s1", "s2"], OBS)
    assert f.belief_history(hist) == ["B01", "B11"]
    assert f.form_belief([{"xe=1", "ye=1", "rp"}]) == "B01"
    assert f.form_belief([{"xe=1", "ye=1", "rp"}, {"xe=2", "ye=1", "bp"}]) == "B11"
    assert f.belief_history([]) == []
    with pytest.raises(NoRuleMatches):
        f.form_belief([])


def test_first_rule_wins():
    f = RegularBeliefFormation({"p"}, [(".* p", "A"), (".*", "B")])
    assert f.form_belief([set(), {"p"}]) == "A"
    assert f.form_belief([{"p"}, set()]) == "B"
    assert f.lint() == [(0, 1)]


def test_no_rule_matches_and_unknown_token():
    f = RegularBeliefFormation({"p"}, [("p p", "A")])
    with pytest.raises(NoRuleMatches):
        f.form_belief([{"p"}])
    with pytest.raises(RegexError):
        RegularBeliefFormation({"p"}, [("q", "A")])


def test_formation_ignores_unobserved_atoms():
    f = RegularBeliefFormation({"p"}, [("p", "A"), ("{}", "B")])
    assert f.form_belief([{"p", "hidden"}]) == "A"
    assert f.form_belief([{"hidden"}]) == "B"


def test_formation_round_trip(switched):
    f = switched.formation
    again = parse_formation(f.format())
    assert again == f
    assert again.lint() == f.lint()


def test_catalog_round_trip(switched):
    cat = switched.catalog
    paths = {n: fixture_path("running", n + ".world") for n in cat.worlds()}
    loaded = {}

    def load(name, path):
        from doxa.world import parse_world
        if name not in loaded:
            with open(path) as fh:
                loaded[name] = parse_world(fh.read(), name)
        return loaded[name]

    again = parse_catalog(format_catalog(cat, paths), load)
    assert again.ids == cat.ids
    for bel in cat:
        assert [r.current_names() for r in again[bel.id].realities] == \
            [r.current_names() for r in bel.realities]


def test_knowledge_round_trip(switched):
    K = switched.knowledge
    assert parse_knowledge(K.format(), K.world) == K


# --------------------------------------------------------------------------
# knowledge consistency

def test_kappa_prime_consistent(switched):
    rep = check_knowledge_consistency(switched.formation, switched.world, switched.knowledge,
                                      switched.catalog)
    assert rep.consistent and rep.witness == ()


def test_empty_labeling_consistent(switched):
    K = KnowledgeLabeling.empty(switched.world)
    assert check_knowledge_consistency(switched.formation, switched.world, K, switched.catalog)


def test_extra_formula_gives_witness(switched):
    w = switched.world
    formulas = dict(switched.knowledge.formulas)
    formulas["red"] = parse_bltl("K rp")
    per_state = [set(n) | {"red"} for n in switched.knowledge.per_state]
    K = KnowledgeLabeling(w, formulas, per_state)
    rep = check_knowledge_consistency(switched.formation, w, K, switched.catalog)
    assert not rep.consistent
    assert rep.failed == ("red",)
    # the witness path really forms a belief violating the formula
    hist = observable_history(w, rep.witness, OBS)
    bid = switched.formation.form_belief(hist)
    assert bid == rep.belief
    assert not belief_satisfies(switched.catalog[bid], formulas["red"])
    assert len(rep.witness) == 1


def test_unknown_belief_is_inconsistent(switched):
    f = RegularBeliefFormation(set(OBS), [(".*", "NOPE")])
    rep = check_knowledge_consistency(f, switched.world, switched.knowledge, switched.catalog)
    assert not rep.consistent and "unknown" in rep.reason


def _random_instance(rng):
    w = random_world(rng, rng.randint(2, 12), atoms=("p", "q"), unique=False)
    bworlds = [random_world(rng, rng.randint(2, 4), atoms=("p", "q"), unique=False, name=f"b{i}")
               for i in range(2)]
    beliefs = []
    for i in range(3):
        bw = bworlds[i % 2]
        cur = rng.choice(sorted(bw.reachable() - {bw.sink}) or sorted(bw.init))
        beliefs.append(Belief(f"B{i}", (Reality(bw, frozenset({cur})),)))
    cat = BeliefCatalog(beliefs)
    shapes = [".* p", ".* {}", "p .*", "{} .*", ".* p .*", ".* q", "p"]
    rules = [(rng.choice(shapes), f"B{rng.randrange(3)}") for _ in range(rng.randint(1, 3))]
    rules.append((".*", f"B{rng.randrange(3)}"))
    f = RegularBeliefFormation({"p"}, rules) if not any("q" in r[0] for r in rules) \
        else RegularBeliefFormation({"p", "q"}, rules)
    pool = {"g": parse_bltl("K G !q"), "f": parse_bltl("Kc p"), "e": parse_bltl("K F p")}
    per_state = [set(rng.sample(sorted(pool), rng.randint(0, 2))) for _ in w.states]
    return w, f, KnowledgeLabeling(w, pool, per_state), cat


def _path_oracle(w, f, K, cat, depth):
    for path in initial_paths(w, depth):
        bid = f.form_belief([w.label_sets[s] for s in path])
        if not satisfies_all(cat[bid], K.at(path[-1])):
            return path
    return None


def test_consistency_against_path_enumeration():
    rng = rng_for(21)
    agree = 0
    for _ in range(80):
        w, f, K, cat = _random_instance(rng)
        rep = check_knowledge_consistency(f, w, K, cat)
        bad = _path_oracle(w, f, K, cat, 8)
        if bad is not None:
            assert not rep.consistent
        if rep.consistent:
            assert bad is None
            agree += 1
            continue
        # the shortest witness is a genuine violation; when short enough the
        # oracle must have found one as well
        ids = [w.state_id(n) for n in rep.witness]
        bid = f.form_belief([w.label_sets[s] for s in ids])
        assert bid == rep.belief
        assert not satisfies_all(cat[bid], K.at(ids[-1]))
        if len(ids) <= 8:
            assert bad is not None and len(bad) == len(ids)
            agree += 1
    assert agree >= 70


# --------------------------------------------------------------------------
# realities

def _line():
    b = WorldBuilder("line").prop("p").actions(ego=["a"], env=["e"])
    b.state("l0").state("l1").state("l2", ["p"]).state("l3")
    b.initial("l0").set_sink("su")
    b.edge("l0", "l1", [("a", "e")]).edge("l1", "l2", [("a", "e")])
    # a self-loop on a current state would break the antichain
    b.edge("l2", "su", [("a", "e")]).edge("l3", "su", [("a", "e")])
    b.edge("su", "su", [("a", "e")])
    return b.build()


def test_validate_reality_codes(design_world):
    w = _line()
    assert validate_reality(Reality.of(w, ["l1"])) == []
    assert [i.code for i in validate_reality(Reality.of(w, ["l3"]))] == ["unreachable-current"]
    codes = [i.code for i in validate_reality(Reality.of(w, ["l0", "l2"]))]
    assert codes == ["antichain"]
    foreign = [i.code for i in validate_reality(Reality.of(w, ["l1"]), design_world)]
    assert foreign == ["foreign-action", "foreign-prop"]


def test_shipped_catalogs_valid():
    for name in ("initially-switched", "position-uncertain", "wrong-coarse"):
        b = bundle(name)
        for bel in b.catalog:
            for r in bel.realities:
                assert validate_reality(r, b.world) == [], (name, bel.id)


def test_belief_needs_a_reality():
    with pytest.raises(ValueError):
        Belief("x", ())
