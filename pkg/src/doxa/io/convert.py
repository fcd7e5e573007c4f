"""Structured-data mirror of bundles, for tooling that does not read the text formats."""
from __future__ import annotations

import json

from ..logic.formulas import format_formula
from ..world import World, WorldBuilder


def world_to_dict(w: World) -> dict:
    fams = {f: list(a) for f, a in w.families.items() if len(a) > 1 or a[0] != f}
    edges = []
    for s, d, acts in w.edges:
        pairs = sorted((w.ego_actions[a], w.env_actions[e]) for a, e in acts)
        edges.append({"src": w.states[s], "dst": w.states[d], "actions": [list(p) for p in pairs]})
    return {
        "name": w.name,
        "props": list(w.props),
        "families": fams,
        "ego_actions": list(w.ego_actions),
        "env_actions": list(w.env_actions),
        "states": [{"id": w.states[s], "labels": sorted(w.label_sets[s])}
                   for s in range(len(w.states))],
        "init": sorted(w.states[s] for s in w.init),
        "sink": w.states[w.sink] if w.sink is not None else None,
        "edges": edges,
    }


def world_from_dict(d: dict) -> World:
    b = WorldBuilder(name=d["name"])
    owner = {a: fam for fam, atoms in d.get("families", {}).items() for a in atoms}
    for p in d["props"]:
        fam = owner.get(p)
        if fam is None:
            b.prop(p)
        elif fam not in b.families:
            b.family(fam, [a.split("=", 1)[1] for a in d["families"][fam]])
    b.actions(ego=d["ego_actions"], env=d["env_actions"])
    for st in d["states"]:
        b.state(st["id"], st["labels"])
    b.initial(*d["init"])
    if d.get("sink"):
        b.set_sink(d["sink"])
    for e in d["edges"]:
        b.edge(e["src"], e["dst"], [tuple(p) for p in e["actions"]])
    return b.build()


def machine_to_dict(m) -> dict:
    return {"memory": list(m.memory), "init": m.init, "default": m.default,
            "rows": [{"memory": k[0], "observation": k[1], "next": v[0], "action": v[1]}
                     for k, v in m.rows]}


def bundle_to_dict(b) -> dict:
    out = {"world": world_to_dict(b.world) if b.world is not None else None}
    if b.goals is not None:
        out["goals"] = [{"priority": i, "ltl": format_formula(f)}
                        for i, f in enumerate(b.goals.goals[2:], 1)]
    out["obs"] = list(b.obs_names)
    out["obs_atoms"] = sorted(b.obs)
    if b.knowledge is not None:
        K = b.knowledge
        out["knowledge"] = {
            "formulas": {n: format_formula(f) for n, f in K.formulas.items()},
            "at": {K.world.states[s]: sorted(K.names_at(s)) for s in range(len(K.world.states))},
        }
    if b.catalog is not None:
        out["catalog"] = {
            "worlds": {name: world_to_dict(w) for name, w in sorted(b.catalog.worlds().items())},
            "beliefs": [{"id": bel.id,
                         "realities": [{"world": r.world.name, "current": r.current_names()}
                                       for r in bel.realities]} for bel in b.catalog],
        }
    if b.formation is not None:
        f = b.formation
        out["formation"] = {"obs": sorted(f.obs_set),
                            "letters": {k: sorted(v) for k, v in f.letters.items()},
                            "rules": [{"regex": r.text, "belief": r.belief} for r in f.rules]}
    out["strategies"] = {k: machine_to_dict(m) for k, m in sorted(b.strategies.items())}
    out["envs"] = {k: {"init": e.init, "env": list(e.env)} for k, e in sorted(b.envs.items())}
    out["bound"] = b.bound
    return out


def bundle_json(b) -> str:
    return json.dumps(bundle_to_dict(b), indent=2, sort_keys=True) + "\n"
