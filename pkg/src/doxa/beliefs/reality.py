"""Realities, beliefs and belief catalogs."""
from __future__ import annotations

from dataclasses import dataclass

from ..world import Issue, World, WorldError, validate_world


@dataclass(frozen=True)
class Reality:
    world: World
    current: frozenset

    @classmethod
    def of(cls, world, current_names):
        return cls(world, frozenset(world.state_id(n) for n in current_names))

    def current_names(self):
        return sorted(self.world.states[s] for s in self.current)


@dataclass(frozen=True)
class Belief:
    id: str
    realities: tuple

    def __post_init__(self):
        if not self.realities:
            raise WorldError(f"belief {self.id} has no realities")

    def worlds(self):
        return tuple(dict.fromkeys(r.world for r in self.realities))


def validate_reality(r: Reality, design: World | None = None) -> list:
    """Check reachability of current states, the path-antichain condition and
    the action/proposition subset assumptions relative to ``design``."""
    w = r.world
    issues = [Issue("world:" + i.code, i.message) for i in validate_world(w)]
    if not r.current:
        issues.append(Issue("empty-current", "reality has no current state"))
    reach = w.reachable()
    for c in sorted(r.current):
        if c not in reach:
            issues.append(Issue("unreachable-current",
                                f"current state {w.states[c]} is not reachable from init"))
    for c in sorted(r.current):
        later = w.reachable(w.succ[c])
        hit = sorted(later & r.current)
        if hit:
            issues.append(Issue(
                "antichain",
                f"current state {w.states[hit[0]]} is reachable from current state {w.states[c]}"))
    if design is not None:
        extra = set(w.ego_actions) - set(design.ego_actions)
        extra |= set(w.env_actions) - set(design.env_actions)
        if extra:
            issues.append(Issue("foreign-action", f"actions not in the design world: {sorted(extra)}"))
        props = set(w.props) - set(design.props)
        if props:
            issues.append(Issue("foreign-prop", f"propositions not in the design world: {sorted(props)}"))
    return issues


class BeliefCatalog:
    """Finite, ordered set of beliefs keyed by id."""

    def __init__(self, beliefs):
        self.beliefs = tuple(beliefs)
        self.by_id = {}
        for b in self.beliefs:
            if b.id in self.by_id:
                raise WorldError(f"duplicate belief id {b.id}")
            self.by_id[b.id] = b

    @property
    def ids(self):
        return tuple(b.id for b in self.beliefs)

    def __len__(self):
        return len(self.beliefs)

    def __iter__(self):
        return iter(self.beliefs)

    def __contains__(self, bid):
        return bid in self.by_id

    def __getitem__(self, bid):
        try:
            return self.by_id[bid]
        except KeyError:
            raise WorldError(f"unknown belief id {bid!r}") from None

    def subset(self, ids):
        ids = set(ids)
        return BeliefCatalog([b for b in self.beliefs if b.id in ids])

    def worlds(self):
        out = {}
        for b in self.beliefs:
            for r in b.realities:
                out.setdefault(r.world.name, r.world)
        return out

    def __eq__(self, other):
        return isinstance(other, BeliefCatalog) and self.beliefs == other.beliefs

    def __hash__(self):
        return hash(self.beliefs)

    def __repr__(self):
        return f"BeliefCatalog({list(self.ids)})"


def validate_catalog(cat: BeliefCatalog, design: World | None = None) -> list:
    issues = []
    for b in cat:
        for i, r in enumerate(b.realities):
            for issue in validate_reality(r, design):
                issues.append(Issue(issue.code, f"belief {b.id} reality {i}: {issue.message}"))
    return issues


def parse_catalog(text: str, load_world) -> BeliefCatalog:
    """``load_world(name, path)`` returns the World for a ``world`` line."""
    worlds, beliefs = {}, []
    cur_id, cur_real = None, []

    def flush():
        if cur_id is not None:
            beliefs.append(Belief(cur_id, tuple(cur_real)))

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "world":
            if len(parts) != 3:
                raise WorldError("world <name> <path>", lineno)
            worlds[parts[1]] = load_world(parts[1], parts[2])
        elif head == "belief":
            flush()
            if len(parts) != 2:
                raise WorldError("belief <id>", lineno)
            cur_id, cur_real = parts[1], []
        elif head == "reality":
            if cur_id is None:
                raise WorldError("reality outside a belief", lineno)
            if len(parts) < 4 or parts[2] != "current":
                raise WorldError("reality <world> current <states...>", lineno)
            if parts[1] not in worlds:
                raise WorldError(f"unknown world {parts[1]!r}", lineno)
            try:
                cur_real.append(Reality.of(worlds[parts[1]], parts[3:]))
            except WorldError as exc:
                raise WorldError(str(exc), lineno) from None
        else:
            raise WorldError(f"unknown directive {head!r}", lineno)
    flush()
    return BeliefCatalog(beliefs)


def format_catalog(cat: BeliefCatalog, world_paths: dict) -> str:
    """``world_paths`` maps world name to the path written in the file."""
    lines = []
    for name, w in cat.worlds().items():
        lines.append(f"world {name} {world_paths.get(name, name + '.world')}")
    for b in cat:
        lines.append(f"belief {b.id}")
        for r in b.realities:
            lines.append(f"reality {r.world.name} current {' '.join(r.current_names())}")
    return "\n".join(lines) + "\n"
