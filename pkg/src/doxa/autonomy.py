"""Possible-worlds strategies, best choices and autonomous decisiveness.

A belief is analysed on the disjoint union of its realities.  Pinning an ego
action ``a`` forbids every other action wherever the label history may end in
a current state; a strategy winning the pinned game therefore chooses ``a`` at
every current state, whichever path led there.

The autonomous synthesis works on the design world with beliefs as ego moves
(playing belief ``B`` lets the world move by any action of ``bAct(B)``), and
decodes the winning machine into a regular belief formation.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .beliefs.formation import (OutputAutomaton, RegularBeliefFormation, automaton_rules,
                                minimize)
from .beliefs.knowledge import (ConsistencyReport, check_knowledge_consistency,
                                satisfies_all)
from .beliefs.reality import Belief, Reality
from .beliefs.regex import letter_token, token_letter
from .logic.checking import Lasso, graph_counterexample
from .logic.formulas import And, Globally, is_propositional
from .logic.semantics import evaluate_lasso, holds_propositional
from .parallel import pmap
from .synthesis.api import max_level_arena, solve_arena
from .synthesis.arena import Arena, FormationObservation, FullObservation, build_arena, world_step
from .synthesis.bounded import EXHAUSTED
from .synthesis.machine import MachineError, StrategyMachine, memoryless
from .goals import GoalList, normalize_goal_list
from .world import World, WorldBuilder

BOTTOM = "_bot"


# --------------------------------------------------------------------------
# disjoint union and pinning

def disjoint_union(belief: Belief, ego_actions=None):
    """Merge the realities of ``belief`` into one reality.

    State ``x`` of reality ``i`` becomes ``r<i>:x``; all sinks collapse into a
    single sink ``undef`` (they are indistinguishable absorbing states).  An
    ego action missing from a reality's world leads to the sink there; a
    missing env action behaves like any of the reality's own env actions.
    Returns ``(reality, renaming)`` with ``renaming[(i, x)] = union state id``.
    """
    worlds = [r.world for r in belief.realities]
    if ego_actions is None:
        ego_actions = list(dict.fromkeys(a for w in worlds for a in w.ego_actions))
    env_actions = list(dict.fromkeys(e for w in worlds for e in w.env_actions)) or ["_env"]
    b = WorldBuilder(f"union:{belief.id}")
    for w in worlds:
        for p in w.props:
            fam = w.family_of(p)
            if fam != p and "=" in p:
                b.family(fam, [p.split("=", 1)[1]])
            else:
                b.prop(p)
    b.actions(ego_actions, env_actions)
    sink = "undef"
    b.set_sink(sink)
    b.edge(sink, sink, {(a, e) for a in ego_actions for e in env_actions})
    names = {}
    current = []
    for i, r in enumerate(belief.realities):
        w = r.world
        for s, name in enumerate(w.states):
            if w.is_sink(s):
                names[(i, s)] = sink
                continue
            names[(i, s)] = f"r{i}:{name}"
            b.state(names[(i, s)], w.label_sets[s])
        for s in w.init:
            b.initial(names[(i, s)])
        current.extend(names[(i, s)] for s in r.current)
        for s in range(len(w.states)):
            if w.is_sink(s):
                continue
            for a in ego_actions:
                ai = w.ego_index.get(a)
                for e in env_actions:
                    if ai is None:
                        dsts = (w.sink,) if w.sink is not None else ()
                    elif e in w.env_index:
                        dsts = w.trans[s][ai][w.env_index[e]]
                    else:
                        dsts = w.ego_targets(s, ai)
                    if not dsts:
                        b.edge(names[(i, s)], sink, {(a, e)})
                    for d in dsts:
                        b.edge(names[(i, s)], names[(i, d)], {(a, e)})
    u = b.build()
    renaming = {k: u.state_id(v) for k, v in names.items()}
    return Reality(u, frozenset(u.state_id(n) for n in current)), renaming


def pinned_world(reality: Reality, action) -> World:
    """Copy of the union world whose current states only allow ``action``."""
    u = reality.world
    b = WorldBuilder(f"{u.name}|{action}")
    for fam, atoms in u.families.items():
        if len(atoms) == 1 and atoms[0] == fam:
            b.prop(fam)
        else:
            b.family(fam, [a.split("=", 1)[1] for a in atoms])
    b.actions(u.ego_actions, u.env_actions)
    for s, name in enumerate(u.states):
        b.state(name, u.label_sets[s])
    b.initial(*(u.states[s] for s in sorted(u.init)))
    b.set_sink(u.states[u.sink])
    for s, d, acts in u.edges:
        keep, moved = set(), set()
        for ai, ei in acts:
            pair = (u.ego_actions[ai], u.env_actions[ei])
            if s in reality.current and pair[0] != action:
                moved.add(pair)
            else:
                keep.add(pair)
        if keep:
            b.edge(u.states[s], u.states[d], keep)
        if moved:
            b.edge(u.states[s], u.states[u.sink], moved)
    return b.build()


def _label_estimate(u):
    lab = u.label_sets

    def step(E, t):
        nxt = set()
        for x in E:
            nxt.update(u.succ[x])
        return frozenset(y for y in nxt if lab[y] == lab[t])

    def start(s):
        return frozenset(x for x in u.init if lab[x] == lab[s])

    return start, step


def pinned_arena(reality: Reality, action, actions) -> Arena:
    """Full-label arena over the union with ``action`` pinned at current states.

    Nodes are ``(state, estimate)`` where the estimate holds every union state
    with the same label history; the pin applies whenever the estimate meets
    the current states.
    """
    u, cur = reality.world, reality.current
    start, est = _label_estimate(u)
    step = world_step(u)

    def pstep(node, a):
        s, E = node
        dsts = (u.sink,) if (a != action and E & cur) else step(s, a)
        return [(t, est(E, t)) for t in dsts]

    init = [(s, start(s)) for s in sorted(u.init)]
    return Arena(init, actions, pstep, lambda n: u.label_sets[n[0]],
                 lambda n: letter_token(u.label_sets[n[0]]), world_state=lambda n: n[0])


def pin_machine(machine: StrategyMachine, reality: Reality, action) -> StrategyMachine:
    """Force ``action`` on every label history that may end in a current state.

    The result tracks the label-history estimate next to the memory of
    ``machine`` and agrees with it elsewhere.
    """
    u, cur = reality.world, reality.current
    lab = u.label_sets
    tokens = sorted({letter_token(l) for l in lab})
    by_token = {}
    for s, l in enumerate(lab):
        by_token.setdefault(letter_token(l), []).append(s)

    def est(E, tok):
        cands = by_token.get(tok, ())
        if E is None:
            return frozenset(s for s in cands if s in u.init)
        nxt = set()
        for x in E:
            nxt.update(u.succ[x])
        return frozenset(s for s in cands if s in nxt)

    names = {("start", None): "m0"}
    order = [("start", None)]
    table = {}
    head = 0
    while head < len(order):
        key = order[head]
        head += 1
        m, E = key
        for tok in tokens:
            mm = machine.init if m == "start" else m
            try:
                m2, a = machine.step(mm, tok)
            except MachineError:
                # labels the pinned game never reaches
                m2, a = mm, action
            E2 = est(E, tok)
            if E2 & cur:
                a = action
            nxt = (m2, E2)
            if nxt not in names:
                names[nxt] = f"m{len(names)}"
                order.append(nxt)
            table[(names[key], tok)] = (names[nxt], a)
    memory = [names[k] for k in order]
    return StrategyMachine.from_table(memory, "m0", table, machine.default).compact(tokens)


def current_state_choices(machine: StrategyMachine, belief: Belief, ego_actions=None) -> set:
    """Actions ``machine`` outputs at the end of initial paths into current states."""
    r, _ = disjoint_union(belief, ego_actions)
    u = r.world
    tok = [letter_token(l) for l in u.label_sets]
    out = set()
    seen = set()
    queue = deque()
    for s in sorted(u.init):
        node = (s, machine.init)
        if node not in seen:
            seen.add(node)
            queue.append(node)
    while queue:
        s, m = queue.popleft()
        m2, a = machine.step(m, tok[s])
        if s in r.current:
            out.add(a)
        for t in u.succ[s]:
            if (t, m2) not in seen:
                seen.add((t, m2))
                queue.append((t, m2))
    return out


# --------------------------------------------------------------------------
# best choices

@dataclass(frozen=True)
class BestChoices:
    belief: str
    actions: tuple              # bAct in interned order
    level: int                  # best level on the unpinned union
    witnesses: dict = field(default_factory=dict, compare=False, hash=False)
    conditional: bool = False   # some sub-call was bound-limited

    @property
    def decisive(self):
        return bool(self.actions)


def _as_goals(phi):
    if isinstance(phi, GoalList):
        return phi, len(phi)
    if isinstance(phi, tuple) and len(phi) == 2 and isinstance(phi[0], GoalList):
        return phi
    g = normalize_goal_list([phi])
    return g, len(g)


def synthesize_current_state_decisive(belief: Belief, phi, ego_actions=None, bound=None):
    """First action whose pinned game is won for ``phi`` (a formula is taken
    together with ``G !undef``; a ``(GoalList, n)`` pair asks for level n).

    Returns ``(action, machine)`` or None; raises nothing on bound exhaustion
    but returns ``("bound-exhausted", None)`` if no action won and one search
    was inconclusive.
    """
    goals, n = _as_goals(phi)
    r, _ = disjoint_union(belief, ego_actions)
    acts = r.world.ego_actions
    inconclusive = False
    for a in acts:
        res = solve_arena(pinned_arena(r, a, acts), goals, n, bound, default_action=a)
        if res:
            return a, pin_machine(res.machine, r, a)
        if not res.definitive:
            inconclusive = True
    if inconclusive:
        return EXHAUSTED, None
    return None


def best_choices(belief: Belief, goals: GoalList, ego_actions=None, bound=None) -> BestChoices:
    r, _ = disjoint_union(belief, ego_actions)
    acts = r.world.ego_actions
    top = max_level_arena(build_arena(r.world, FullObservation(), acts), goals, bound)
    found, witnesses, cond = [], {}, top.conditional
    for a in acts:
        res = solve_arena(pinned_arena(r, a, acts), goals, top.level, bound, default_action=a)
        if res:
            found.append(a)
            witnesses[a] = pin_machine(res.machine, r, a)
        elif not res.definitive:
            cond = True
    return BestChoices(belief.id, tuple(found), top.level, witnesses, cond)


def best_choice_table(catalog, goals: GoalList, ego_actions, bound=None) -> dict:
    beliefs = list(catalog)
    rows = pmap(lambda b: best_choices(b, goals, ego_actions, bound), beliefs)
    return {b.id: row for b, row in zip(beliefs, rows)}


# --------------------------------------------------------------------------
# autonomous synthesis

@dataclass
class AutonomousResult:
    status: str                             # exists | none | bound-exhausted
    formation: RegularBeliefFormation | None
    machine: StrategyMachine | None         # autonomous strategy over belief ids
    doxastic: StrategyMachine | None        # winning machine on the belief-labelled world
    table: dict
    level: int
    filtered: tuple = ()                    # beliefs without a decisive strategy
    reason: str = ""
    witness: tuple = ()                     # observation history of a dead end

    def __bool__(self):
        return self.status == "exists"

    @property
    def definitive(self):
        return self.status != EXHAUSTED


def _obs_estimate(w, obs):
    tok = [letter_token(l & obs) for l in w.label_sets]

    def step(E, t):
        if E is None:
            return frozenset(s for s in w.init if tok[s] == t)
        nxt = set()
        for x in E:
            nxt.update(w.succ[x])
        return frozenset(s for s in nxt if tok[s] == t)

    return tok, step


def reachable_estimates(w, obs):
    """Every any-action estimate with one shortest observation history leading to it."""
    tok, step = _obs_estimate(w, obs)
    found = {}
    queue = deque()
    for t in sorted({tok[s] for s in w.init}):
        E = step(None, t)
        if E not in found:
            found[E] = (t,)
            queue.append(E)
    while queue:
        E = queue.popleft()
        nxt_toks = sorted({tok[y] for x in E for y in w.succ[x]})
        for t in nxt_toks:
            E2 = step(E, t)
            if E2 and E2 not in found:
                found[E2] = found[E] + (t,)
                queue.append(E2)
    return found


def _consistent(catalog, knowledge, E):
    return [b.id for b in catalog if all(satisfies_all(b, knowledge.at(x)) for x in E)]


def _design_level(world, goals, bound):
    return max_level_arena(build_arena(world, FullObservation()), goals, bound)


def synthesize_autonomous(world: World, goals: GoalList, knowledge, obs, catalog,
                          bound=None, table=None) -> AutonomousResult:
    """Knowledge-consistent formation plus autonomous strategy reaching the
    full-observation optimum on ``world``, or ``none``."""
    obs = world.resolve_obs(obs) if not isinstance(obs, frozenset) else obs
    acts = world.ego_actions
    if table is None:
        table = best_choice_table(catalog, goals, acts, bound)
    tainted = any(row.conditional for row in table.values())
    usable = [b.id for b in catalog if table[b.id].decisive]
    filtered = tuple(b.id for b in catalog if not table[b.id].decisive)
    top = _design_level(world, goals, bound)
    tainted = tainted or top.conditional
    m_hat = top.level

    for E, hist in reachable_estimates(world, obs).items():
        if not _consistent(catalog, knowledge, E):
            return AutonomousResult("none", None, None, None, table, m_hat, filtered,
                                    "no belief is consistent with the knowledge after "
                                    "this observation history", hist)

    tok, est = _obs_estimate(world, obs)
    cons_cache = {}

    def cons(E):
        c = cons_cache.get(E)
        if c is None:
            c = cons_cache[E] = frozenset(_consistent(catalog, knowledge, E))
        return c

    step = world_step(world)
    bact = {bid: table[bid].actions for bid in usable}

    def wstep(node, move):
        s, E = node
        if move == BOTTOM or move not in cons(E):
            dsts = (world.sink,)
        else:
            dsts = sorted({t for a in bact[move] for t in step(s, a)})
        return [(t, est(E, tok[t])) for t in dsts]

    cur_tokens = {}
    for b in catalog:
        cur_tokens[b.id] = frozenset(letter_token(r.world.label_sets[c] & obs)
                                     for r in b.realities for c in r.current)
    rank = {bid: i for i, bid in enumerate(catalog.ids)}

    def prefer(arena, nodes, names):
        t = arena.tokens[next(iter(nodes))]

        def score(bid):
            if bid == BOTTOM:
                return (3, 0)
            ct = cur_tokens[bid]
            return (0 if ct == {t} else 1 if t in ct else 2, rank[bid])

        return sorted(names, key=score)

    def fallback(E, t):
        # consistent beliefs, decisive ones first, then by observation match
        return sorted(cons(E), key=lambda bid: (bid not in bact, 0 if cur_tokens[bid] == {t}
                                                else 1 if t in cur_tokens[bid] else 2, rank[bid]))

    def lost_policy(E):
        if not E:
            return moves[0]
        ranked = fallback(E, tok[next(iter(E))])
        return ranked[0] if ranked and ranked[0] in bact else moves[0]

    moves = tuple(usable) + (BOTTOM,)
    init = [(s, est(None, tok[s])) for s in sorted(world.init)]
    arena = Arena(init, moves, wstep, lambda n: world.label_sets[n[0]], lambda n: tok[n[0]],
                  world_state=lambda n: n[0])
    res = solve_arena(arena, goals, m_hat, bound, prefer=prefer, default_action=moves[0],
                      lost_tracker=(est, lost_policy))
    if not res:
        status = "none" if res.definitive and not tainted else EXHAUSTED
        return AutonomousResult(status, None, None, None, table, m_hat, filtered,
                                "no belief-choosing strategy reaches the optimum")
    formation = _decode(world, obs, res.machine, cons, fallback)
    auto = autonomous_machine(table, catalog, acts)
    status = "exists" if not tainted else EXHAUSTED
    return AutonomousResult(status, formation, auto, res.machine, table, m_hat, filtered)


def autonomous_machine(table, catalog, ego_actions) -> StrategyMachine:
    """Memoryless strategy over beliefs: the first best choice of each belief."""
    mapping = {}
    for b in catalog:
        row = table[b.id]
        if row.actions:
            mapping[b.id] = row.actions[0]
    return memoryless(mapping, default=ego_actions[0])


def _decode(world, obs, machine, cons, prefer_order):
    """Regular formation read off the winning machine (observation letters in,
    belief ids out); histories where the machine gives no usable belief fall
    back to the best-ranked consistent one."""
    tok, est = _obs_estimate(world, obs)
    alphabet = tuple(sorted(set(tok)))
    start, dead = ("start", None, None), ("dead", None, None)
    keys = {start: 0}
    order = [start]
    trans = []
    head = 0
    while head < len(order):
        m, E, _ = order[head]
        head += 1
        row = []
        for t in alphabet:
            nxt = dead
            if m != "dead":
                E2 = est(None if m == "start" else E, t)
                if E2:
                    if m == "lost":
                        m2, b = m, BOTTOM
                    else:
                        try:
                            m2, b = machine.step(machine.init if m == "start" else m, t)
                        except MachineError:
                            # a history the winning play never produces
                            m2, b = "lost", BOTTOM
                    if b == BOTTOM or b not in cons(E2):
                        b = prefer_order(E2, t)[0]
                    nxt = (m2, E2, b)
            k = keys.get(nxt)
            if k is None:
                k = keys[nxt] = len(order)
                order.append(nxt)
            row.append(k)
        trans.append(row)
    letters = tuple(token_letter(t) for t in alphabet)
    auto = minimize(OutputAutomaton(letters, 0, trans, [k[2] for k in order]))
    return RegularBeliefFormation(obs, automaton_rules(auto))


# --------------------------------------------------------------------------
# conservation

@dataclass
class Conservation:
    holds: bool
    definitive: bool
    level: int
    reason: str = ""
    machine: StrategyMachine | None = None
    counterexample: Lasso | None = None     # design-world state names
    beliefs: Lasso | None = None            # beliefs formed along the counterexample
    undecisive: tuple = ()                  # formed beliefs lacking a decisive strategy
    consistency: ConsistencyReport | None = None

    def __bool__(self):
        return self.holds


def _check_formation(world, knowledge, obs, catalog, formation):
    if obs is not None:
        O = world.resolve_obs(obs) if not isinstance(obs, frozenset) else obs
        if not formation.obs_set <= O:
            raise ValueError("formation observes atoms outside the observation set: "
                             + ", ".join(sorted(formation.obs_set - O)))
    return check_knowledge_consistency(formation, world, knowledge, catalog)


def conserves_doxastic(world, goals, knowledge, obs, catalog, formation, bound=None) -> Conservation:
    """Some strategy over the formed belief histories reaches the full-observation optimum."""
    report = _check_formation(world, knowledge, obs, catalog, formation)
    top = _design_level(world, goals, bound)
    if not report:
        return Conservation(False, True, top.level, "formation is not knowledge-consistent",
                            consistency=report)
    res = solve_arena(build_arena(world, FormationObservation(formation)), goals, top.level, bound)
    definitive = res.definitive and not top.conditional
    return Conservation(bool(res), definitive, top.level,
                        "" if res else "no doxastic strategy reaches the optimum",
                        machine=res.machine, consistency=report)


def autonomous_closure(world, formation, table):
    """Initial nodes, successors and labels of the design world driven by the
    formation, where ego may take any best choice of the formed belief."""
    dfa = formation.dfa
    letter = [formation.letter_of(l) for l in world.label_sets]
    step = world_step(world)

    def succ(node):
        s, q = node
        b = dfa.output(q)
        row = table.get(b)
        acts = row.actions if row is not None else ()
        if not acts:
            dsts = (world.sink,)
        else:
            dsts = sorted({t for a in acts for t in step(s, a)})
        return [(t, dfa.step(q, letter[t])) for t in dsts]

    init = [(s, dfa.step(dfa.initial, letter[s])) for s in sorted(world.init)]
    return init, succ


def conserves_autonomous(world, goals, knowledge, obs, catalog, formation, bound=None,
                         table=None) -> Conservation:
    """Every autonomous system over the formation reaches the full-observation optimum."""
    report = _check_formation(world, knowledge, obs, catalog, formation)
    top = _design_level(world, goals, bound)
    if not report:
        return Conservation(False, True, top.level, "formation is not knowledge-consistent",
                            consistency=report)
    if table is None:
        formed = [b for b in catalog if b.id in set(formation.belief_ids)]
        table = best_choice_table(formed, goals, world.ego_actions, bound)
    tainted = top.conditional or any(r.conditional for r in table.values())
    init, succ = autonomous_closure(world, formation, table)
    dfa = formation.dfa
    undecisive = set()
    seen, stack = set(init), list(init)
    while stack:
        node = stack.pop()
        b = dfa.output(node[1])
        if b not in table or not table[b].actions:
            undecisive.add(b)
        for t in succ(node):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    ce = graph_counterexample(init, succ, lambda n: world.label_sets[n[0]], goals.up_to(top.level))
    und = tuple(sorted(undecisive, key=str))
    if ce is None:
        return Conservation(True, not tainted, top.level, undecisive=und, consistency=report)
    names = Lasso(tuple(world.states[s] for s, _ in ce.stem),
                  tuple(world.states[s] for s, _ in ce.loop))
    beliefs = Lasso(tuple(dfa.output(q) for _, q in ce.stem),
                    tuple(dfa.output(q) for _, q in ce.loop))
    return Conservation(False, not tainted, top.level, "a best-choice run misses the optimum",
                        counterexample=names, beliefs=beliefs, undecisive=und, consistency=report)


# --------------------------------------------------------------------------
# simulation

class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class EnvScript:
    init: str
    env: tuple = ()             # env actions per step; the last one repeats


def parse_env_script(text: str) -> EnvScript:
    init, env = None, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "init":
            init = rest.strip()
        elif head == "env":
            env.extend(rest.split())
        else:
            raise SimulationError(f"line {lineno}: unknown directive {head!r}")
    if init is None:
        raise SimulationError("env script needs an init line")
    return EnvScript(init, tuple(env))


def format_env_script(sc: EnvScript) -> str:
    lines = [f"init {sc.init}"]
    if sc.env:
        lines.append("env " + " ".join(sc.env))
    return "\n".join(lines) + "\n"


@dataclass
class Simulation:
    states: tuple
    observations: tuple
    beliefs: tuple
    actions: tuple              # (ego, env) per step
    loop_start: int             # positions >= loop_start repeat forever
    level: int
    violations: tuple           # (position, goal priority) of failed safety parts
    nondeterministic: bool = False

    def lasso(self):
        return Lasso(self.states[:self.loop_start], self.states[self.loop_start:])


def _conjuncts(f):
    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


def _safety_parts(goals):
    out = []
    for i, g in enumerate(goals.goals, 1):
        for c in _conjuncts(g):
            if isinstance(c, Globally) and is_propositional(c.arg):
                out.append((i, c.arg))
    return out


def run_doxastic_system(world, formation, machine, script: EnvScript, goals=None,
                        max_steps=10000) -> Simulation:
    """Execute formation + belief-reading machine against an env script."""
    if script.init not in world.state_index:
        raise SimulationError(f"unknown initial state {script.init!r}")
    s = world.state_id(script.init)
    if s not in world.init:
        raise SimulationError(f"{script.init} is not an initial state")
    for e in script.env:
        if e not in world.env_index:
            raise SimulationError(f"env action not enabled: {e!r} is not an env action")
    dfa = formation.dfa
    env = list(script.env) or [world.env_actions[0]]
    q = dfa.initial
    m = machine.init
    states, obs_hist, beliefs, acts = [], [], [], []
    seen = {}
    nondet = False
    i = 0
    while True:
        letter = formation.letter_of(world.label_sets[s])
        q = dfa.step(q, letter)
        b = dfa.output(q)
        if b is None:
            raise SimulationError(f"no-rule-matches after {i + 1} observations")
        pos = min(i, len(env) - 1)
        key = (s, q, m, pos if i < len(env) - 1 else -1)
        if key in seen:
            loop_start = seen[key]
            break
        seen[key] = i
        m, a = machine.step(m, b)
        e = env[pos]
        if a not in world.ego_index:
            raise SimulationError(f"strategy chose unknown action {a!r}")
        dsts = world.targets(s, world.ego_index[a], world.env_index[e])
        if not dsts:
            raise SimulationError(f"env action not enabled: {a}/{e} at {world.states[s]}")
        nondet = nondet or len(dsts) > 1
        states.append(world.states[s])
        obs_hist.append(letter_token(letter))
        beliefs.append(b)
        acts.append((a, e))
        s = dsts[0]
        i += 1
        if i > max_steps:
            raise SimulationError("simulation did not close a loop")
    level, viol = 0, ()
    if goals is not None:
        labs = [world.label_sets[world.state_id(x)] for x in states]
        stem, loop = labs[:loop_start], labs[loop_start:]
        level = 0
        for n in range(len(goals), 0, -1):
            if evaluate_lasso(goals.up_to(n), stem, loop):
                level = n
                break
        found = []
        for prio, p in _safety_parts(goals):
            for j, lab in enumerate(labs):
                if not holds_propositional(p, lab):
                    found.append((j, prio))
                    break
        viol = tuple(sorted(found))
    return Simulation(tuple(states), tuple(obs_hist), tuple(beliefs), tuple(acts), loop_start,
                      level, viol, nondet)
