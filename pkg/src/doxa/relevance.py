"""Weak relevance and relevance over the (knowledge, observations, beliefs) lattice.

A tuple is weakly relevant when an optimal autonomous system exists for it
and for no strictly smaller tuple.  Observations shrink by dropping atoms or
families, catalogs by dropping beliefs, and knowledge labelings by dropping
formulas at single states.  Two labelings that admit the same beliefs at every
state are the same point of the lattice.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .autonomy import best_choice_table, synthesize_autonomous
from .beliefs.knowledge import KnowledgeLabeling, satisfies_all
from .parallel import pmap

KNOWLEDGE_CAP = 4096


@dataclass(frozen=True)
class Point:
    """One lattice element.  ``knowledge`` holds formula names per state."""

    obs: tuple
    beliefs: tuple
    knowledge: tuple

    def describe(self, world=None, base=None) -> str:
        parts = ["O={" + ",".join(self.obs) + "}", "B={" + ",".join(self.beliefs) + "}"]
        if base is not None and self.knowledge != base.knowledge:
            dropped = []
            for s, (mine, full) in enumerate(zip(self.knowledge, base.knowledge)):
                for n in sorted(set(full) - set(mine)):
                    name = world.states[s] if world is not None else str(s)
                    dropped.append(f"{name}:{n}")
            parts.append("K-{" + ",".join(dropped) + "}")
        else:
            parts.append("K")
        return " ".join(parts)


@dataclass
class PointResult:
    point: Point
    status: str                 # exists | none | bound-exhausted

    @property
    def succeeds(self):
        return self.status == "exists"


@dataclass
class WeakRelevance:
    holds: bool
    definitive: bool
    mode: str
    top: PointResult
    checked: list = field(default_factory=list)         # PointResult per lesser point
    monotonicity: list = field(default_factory=list)    # (pruned point, successful smaller point)
    truncated: bool = False

    def __bool__(self):
        return self.holds

    @property
    def succeeding(self):
        return [r.point for r in self.checked if r.succeeds]

    @property
    def failing(self):
        return [r.point for r in self.checked if r.status == "none"]

    @property
    def conditional(self):
        return [r.point for r in self.checked if r.status not in ("exists", "none")]


def knowledge_options(K: KnowledgeLabeling, catalog):
    """Per state: semantically distinct formula subsets, each keyed by the set
    of catalog beliefs it admits.  The first option is the full set."""
    out = []
    for s in range(len(K.world.states)):
        names = sorted(K.names_at(s))
        opts = {}
        full_key = None
        for r in range(len(names), -1, -1):
            for sub in itertools.combinations(names, r):
                fs = tuple(K.formulas[n] for n in sub)
                key = frozenset(b.id for b in catalog if satisfies_all(b, fs))
                if full_key is None:
                    full_key = key
                # keep the smallest syntactic subset per semantic class
                opts[key] = sub
        ordered = [(full_key, opts[full_key])] + sorted(
            ((k, v) for k, v in opts.items() if k != full_key), key=lambda kv: (len(kv[1]), kv[1]))
        out.append(ordered)
    return out


def knowledge_downset(K: KnowledgeLabeling, catalog, cap=KNOWLEDGE_CAP):
    """Labelings strictly below ``K`` up to semantic equality.

    Returns ``(list of per-state name tuples, truncated)``; the first option at
    each state stands for ``K`` itself, so the all-first combination is skipped.
    """
    opts = knowledge_options(K, catalog)
    sizes = [len(o) for o in opts]
    total = 1
    for n in sizes:
        total *= n
    truncated = total > cap
    found = []
    for combo in itertools.product(*[range(n) for n in sizes]):
        if not any(combo):
            continue
        found.append(tuple(opts[s][i][1] for s, i in enumerate(combo)))
        if len(found) >= cap:
            break
    return found, truncated


def _subsets(items, proper=True, nonempty=False):
    items = tuple(items)
    for r in range(len(items) + 1):
        if nonempty and r == 0:
            continue
        for sub in itertools.combinations(items, r):
            if proper and len(sub) == len(items):
                continue
            yield sub


class _Evaluator:
    def __init__(self, world, goals, K, catalog, bound):
        self.world = world
        self.goals = goals
        self.K = K
        self.catalog = catalog
        self.bound = bound
        self.table = best_choice_table(catalog, goals, world.ego_actions, bound)
        self.cache = {}

    def labeling(self, names):
        return self.K.restrict(names)

    def __call__(self, point: Point) -> PointResult:
        hit = self.cache.get(point)
        if hit is not None:
            return hit
        if not point.beliefs:
            res = PointResult(point, "none")
        else:
            sub = self.catalog.subset(point.beliefs)
            table = {b: self.table[b] for b in point.beliefs}
            r = synthesize_autonomous(self.world, self.goals, self.labeling(point.knowledge),
                                      self.world.resolve_obs(point.obs), sub, self.bound,
                                      table=table)
            res = PointResult(point, r.status)
        self.cache[point] = res
        return res


def _point(obs, beliefs, K):
    return Point(tuple(obs), tuple(beliefs), tuple(tuple(sorted(K.names_at(s)))
                                                   for s in range(len(K.world.states))))


def weak_relevance(world, goals, K, obs, catalog, bound=None, mode="full", vary="KOB",
                   evaluator=None) -> WeakRelevance:
    """Is ``(K, obs, catalog)`` weakly relevant for ``(world, goals)``?

    ``vary`` picks the lattice dimensions (``"KO"`` keeps the catalog fixed,
    the shape used when a formation's belief set is given).
    """
    if mode not in ("full", "frontier"):
        raise ValueError(f"unknown lattice mode {mode!r}")
    ev = evaluator or _Evaluator(world, goals, K, catalog, bound)
    obs = tuple(obs)
    ids = tuple(catalog.ids)
    top = _point(obs, ids, K)
    top_res = ev(top)
    if top_res.status != "exists":
        return WeakRelevance(False, top_res.status == "none", mode, top_res)
    obs_opts = list(_subsets(obs, proper=False)) if "O" in vary else [obs]
    bel_opts = list(_subsets(ids, proper=False, nonempty=True)) if "B" in vary else [ids]
    kdown, truncated = knowledge_downset(K, catalog) if "K" in vary else ([], False)
    k_opts = [top.knowledge] + kdown

    if mode == "full":
        points = [Point(o, b, k) for o in obs_opts for b in bel_opts for k in k_opts]
        points = [p for p in points if p != top]
    else:
        points = []
        if "O" in vary:
            points += [Point(tuple(x for x in obs if x != drop), ids, top.knowledge) for drop in obs]
        if "B" in vary and len(ids) > 1:
            points += [Point(obs, tuple(x for x in ids if x != drop), top.knowledge) for drop in ids]
        points += [Point(obs, ids, k) for k in kdown]
    checked = pmap(ev, points)
    monotone = []
    if mode == "frontier":
        # capability is expected to shrink with observations and beliefs;
        # spot-check one level below every failing predecessor
        for r in checked:
            if r.status != "none":
                continue
            p = r.point
            below = [Point(tuple(x for x in p.obs if x != d), p.beliefs, p.knowledge) for d in p.obs]
            if len(p.beliefs) > 1:
                below += [Point(p.obs, tuple(x for x in p.beliefs if x != d), p.knowledge)
                          for d in p.beliefs]
            for q in pmap(ev, below):
                if q.succeeds:
                    monotone.append((p, q.point))
    any_success = any(r.succeeds for r in checked)
    tainted = any(r.status not in ("exists", "none") for r in checked) or truncated
    holds = not any_success
    definitive = any_success or not tainted
    return WeakRelevance(holds, definitive, mode, top_res, checked, monotone, truncated)


@dataclass
class Relevance:
    holds: bool
    definitive: bool
    component: str
    weak: WeakRelevance
    alternatives: list          # other pool members that are weakly relevant
    pool_results: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def relevance(world, goals, K, obs, catalog, component="O", pool=None, bound=None,
              mode="full") -> Relevance:
    """Is the ``component`` (one of O, B, K) of the tuple relevant, i.e. weakly
    relevant with no other weakly relevant pool member?

    Pools: for O a list of observation-name tuples, for B a list of belief-id
    tuples, for K a list of per-state formula-name tuples.  Defaults: every
    subset of the given observations, every nonempty sub-catalog, the
    knowledge down-set.
    """
    component = component.upper()
    if component not in ("O", "B", "K"):
        raise ValueError(f"unknown component {component!r}")
    ev = _Evaluator(world, goals, K, catalog, bound)
    obs = tuple(obs)
    if pool is None:
        if component == "O":
            pool = [s for s in _subsets(obs, proper=False)]
        elif component == "B":
            pool = [s for s in _subsets(catalog.ids, proper=False, nonempty=True)]
        else:
            pool = [tuple(tuple(sorted(K.names_at(s))) for s in range(len(world.states)))]
            pool += knowledge_downset(K, catalog)[0]
    pool = [tuple(p) for p in pool]
    if not pool:
        raise ValueError("pool-empty")

    def weak_for(member):
        if component == "O":
            return weak_relevance(world, goals, K, member, catalog, bound, mode, evaluator=ev)
        if component == "B":
            sub = catalog.subset(member)
            return weak_relevance(world, goals, K, obs, sub, bound, mode,
                                  evaluator=_SubEvaluator(ev, sub))
        lab = K.restrict(member)
        return weak_relevance(world, goals, lab, obs, catalog, bound, mode,
                              evaluator=_SubEvaluator(ev, catalog, lab))

    if component == "O":
        mine = obs
    elif component == "B":
        mine = tuple(catalog.ids)
    else:
        mine = tuple(tuple(sorted(K.names_at(s))) for s in range(len(world.states)))
    weak = weak_for(mine)
    results = {}
    for member in pool:
        if _same(component, member, mine):
            continue
        results[member] = weak_for(member)
    alternatives = [m for m, r in results.items() if r.holds]
    tainted = (not weak.definitive) or any(not r.definitive for r in results.values())
    holds = weak.holds and not alternatives
    definitive = not tainted or (not weak.holds and weak.definitive) or bool(
        [m for m, r in results.items() if r.holds and r.definitive])
    return Relevance(holds, definitive, component, weak, alternatives, results)


def _same(component, a, b):
    if component == "K":
        return tuple(a) == tuple(b)
    return set(a) == set(b)


class _SubEvaluator:
    """Shares the best-choice table of a larger catalog."""

    def __init__(self, parent, catalog, K=None):
        self.parent = parent
        self.catalog = catalog
        self.K = K or parent.K
        self.cache = {}

    def __call__(self, point):
        hit = self.cache.get(point)
        if hit is None:
            if not point.beliefs:
                hit = PointResult(point, "none")
            else:
                sub = self.parent.catalog.subset(point.beliefs)
                table = {b: self.parent.table[b] for b in point.beliefs}
                r = synthesize_autonomous(self.parent.world, self.parent.goals,
                                          self.K.restrict(point.knowledge),
                                          self.parent.world.resolve_obs(point.obs), sub,
                                          self.parent.bound, table=table)
                hit = PointResult(point, r.status)
            self.cache[point] = hit
        return hit
