"""Labeled Kripke structures with concurrent ego/environment actions.

A world is stored with interned integer ids for states, propositions and
actions.  Labels are bitmasks over the proposition table, transitions are
precomputed as ``trans[state][ego][env] -> tuple of targets``.

Text format (one directive per line, ``#`` starts a comment)::

    prop xe = 1..4          # finite-domain family, compiled to xe=1 .. xe=4
    prop h s bp rp          # boolean atoms
    act ego f t
    act env f F
    state s1 xe=1 h rp
    init s1
    edge s1 s2 {f/f, f/F}   # also f/*, */F and * (every action pair)
    sink su
    complete                # route every missing action to the sink
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

UNDEF = "undef"


class WorldError(ValueError):
    """Raised for malformed worlds, paths or world files."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Issue:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


class World:
    """Immutable labeled Kripke structure.

    Build one with :class:`WorldBuilder` or :func:`parse_world`.
    """

    def __init__(self, name, props, families, ego_actions, env_actions,
                 states, init, labels, edges, sink):
        self.name = name
        self.props = tuple(props)
        self.families = {k: tuple(v) for k, v in families.items()}
        self.ego_actions = tuple(ego_actions)
        self.env_actions = tuple(env_actions)
        self.states = tuple(states)
        self.init = frozenset(init)
        self.labels = tuple(labels)
        self.edges = tuple(sorted((s, d, frozenset(a)) for s, d, a in edges))
        self.sink = sink
        self.prop_index = {p: i for i, p in enumerate(self.props)}
        self.state_index = {s: i for i, s in enumerate(self.states)}
        self.ego_index = {a: i for i, a in enumerate(self.ego_actions)}
        self.env_index = {a: i for i, a in enumerate(self.env_actions)}
        n, ne, nv = len(self.states), len(self.ego_actions), len(self.env_actions)
        trans = [[[[] for _ in range(nv)] for _ in range(ne)] for _ in range(n)]
        succ = [set() for _ in range(n)]
        for s, d, acts in self.edges:
            succ[s].add(d)
            for a, e in acts:
                trans[s][a][e].append(d)
        self.trans = tuple(tuple(tuple(tuple(sorted(set(t))) for t in row)
                                 for row in per_state) for per_state in trans)
        self.succ = tuple(tuple(sorted(x)) for x in succ)
        self.label_sets = tuple(frozenset(self.props[i] for i in range(len(self.props))
                                          if mask >> i & 1) for mask in self.labels)
        self._key = (self.props, tuple(sorted(self.families.items())), self.ego_actions,
                     self.env_actions, self.states, self.init, self.labels, self.edges,
                     self.sink)
        self._hash = hash(self._key)

    def __eq__(self, other):
        return isinstance(other, World) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return (f"World({self.name!r}, states={len(self.states)}, "
                f"props={len(self.props)}, init={sorted(self.init)})")

    # lookups -------------------------------------------------------------
    def state_id(self, name):
        try:
            return self.state_index[name]
        except KeyError:
            raise WorldError(f"unknown state {name!r} in world {self.name!r}") from None

    def mask_of(self, atoms: Iterable[str]) -> int:
        mask = 0
        for a in atoms:
            if a in self.prop_index:
                mask |= 1 << self.prop_index[a]
        return mask

    def label(self, s) -> frozenset:
        return self.label_sets[s]

    def resolve_obs(self, names: Iterable[str]) -> frozenset:
        """Expand family names to their atoms; atoms pass through."""
        out = set()
        for n in names:
            if n in self.families:
                out.update(self.families[n])
            elif n in self.prop_index:
                out.add(n)
            else:
                raise WorldError(f"unknown observation {n!r}")
        return frozenset(out)

    def family_of(self, atom):
        for fam, atoms in self.families.items():
            if atom in atoms:
                return fam
        return atom

    def targets(self, s, ego, env):
        return self.trans[s][ego][env]

    def ego_targets(self, s, ego):
        out = set()
        for row in self.trans[s][ego]:
            out.update(row)
        return tuple(sorted(out))

    def reachable(self, sources=None):
        seen = set(self.init if sources is None else sources)
        stack = list(seen)
        while stack:
            s = stack.pop()
            for d in self.succ[s]:
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
        return frozenset(seen)

    def is_sink(self, s):
        return s == self.sink


@dataclass
class WorldBuilder:
    """Mutable accumulator producing a :class:`World`."""

    name: str = "world"
    props: list = field(default_factory=list)
    families: dict = field(default_factory=dict)
    ego_actions: list = field(default_factory=list)
    env_actions: list = field(default_factory=list)
    states: list = field(default_factory=list)
    labels: dict = field(default_factory=dict)
    init: list = field(default_factory=list)
    edges: dict = field(default_factory=dict)
    sink: str | None = None

    def prop(self, *atoms):
        for a in atoms:
            if a not in self.props:
                self.props.append(a)
                self.families.setdefault(a, (a,))
        return self

    def family(self, name, values):
        atoms = tuple(f"{name}={v}" for v in values)
        for a in atoms:
            if a not in self.props:
                self.props.append(a)
        self.families[name] = tuple(dict.fromkeys(self.families.get(name, ()) + atoms))
        self.families.pop(name + "=", None)
        for a in atoms:
            if self.families.get(a) == (a,):
                del self.families[a]
        return self

    def actions(self, ego=(), env=()):
        for a in ego:
            if a not in self.ego_actions:
                self.ego_actions.append(a)
        for a in env:
            if a not in self.env_actions:
                self.env_actions.append(a)
        return self

    def state(self, name, labels=()):
        if name not in self.labels:
            self.states.append(name)
        self.labels[name] = set(labels)
        return self

    def initial(self, *names):
        for n in names:
            if n not in self.init:
                self.init.append(n)
        return self

    def edge(self, src, dst, pairs):
        self.edges.setdefault((src, dst), set()).update(pairs)
        return self

    def set_sink(self, name):
        self.sink = name
        if name not in self.labels:
            self.state(name, {UNDEF})
        return self

    def build(self, repair=False) -> World:
        self.prop(UNDEF)
        if repair:
            if self.sink is None:
                self.set_sink("s_undef")
            covered = {}
            for (s, _), pairs in self.edges.items():
                covered.setdefault(s, set()).update(pairs)
            every = {(a, e) for a in self.ego_actions for e in self.env_actions}
            for s in self.states:
                missing = every - covered.get(s, set())
                if missing:
                    self.edge(s, self.sink, missing)
        props = list(self.props)
        pidx = {p: i for i, p in enumerate(props)}
        sidx = {s: i for i, s in enumerate(self.states)}
        aidx = {a: i for i, a in enumerate(self.ego_actions)}
        eidx = {a: i for i, a in enumerate(self.env_actions)}
        labels = []
        for s in self.states:
            mask = 0
            for a in self.labels[s]:
                if a not in pidx:
                    raise WorldError(f"state {s!r}: undeclared proposition {a!r}")
                mask |= 1 << pidx[a]
            labels.append(mask)
        edges = []
        for (src, dst), pairs in self.edges.items():
            for n in (src, dst):
                if n not in sidx:
                    raise WorldError(f"edge {src}->{dst}: unknown state {n!r}")
            acts = set()
            for a, e in pairs:
                if a not in aidx or e not in eidx:
                    raise WorldError(f"edge {src}->{dst}: unknown action {a}/{e}")
                acts.add((aidx[a], eidx[e]))
            edges.append((sidx[src], sidx[dst], acts))
        for n in self.init:
            if n not in sidx:
                raise WorldError(f"unknown initial state {n!r}")
        sink = sidx.get(self.sink) if self.sink is not None else None
        if self.sink is not None and sink is None:
            raise WorldError(f"unknown sink state {self.sink!r}")
        return World(self.name, props, self.families, self.ego_actions, self.env_actions,
                     self.states, [sidx[n] for n in self.init], labels, edges, sink)


# --------------------------------------------------------------------------
# validation

def validate_world(w: World) -> list:
    """Return every invariant violation of ``w`` as a list of :class:`Issue`."""
    issues = []
    if not w.init:
        issues.append(Issue("empty-init", "world has no initial state"))
    if not w.ego_actions or not w.env_actions:
        issues.append(Issue("no-actions", "ego and env action sets must be nonempty"))
    for s, d, acts in w.edges:
        if not acts:
            issues.append(Issue("empty-edge", f"edge {w.states[s]}->{w.states[d]} has no actions"))
    for s in range(len(w.states)):
        for a in range(len(w.ego_actions)):
            for e in range(len(w.env_actions)):
                if not w.trans[s][a][e]:
                    issues.append(Issue(
                        "missing-action",
                        f"state {w.states[s]}: no edge carries {w.ego_actions[a]}/{w.env_actions[e]}"))
    undef_bit = 1 << w.prop_index[UNDEF] if UNDEF in w.prop_index else 0
    if w.sink is None:
        issues.append(Issue("missing-sink", "no sink state declared"))
    elif w.labels[w.sink] != undef_bit:
        issues.append(Issue("mislabeled-sink",
                            f"sink {w.states[w.sink]} must be labeled exactly {{undef}}"))
    for s, mask in enumerate(w.labels):
        if s != w.sink and mask & undef_bit:
            issues.append(Issue("mislabeled-sink", f"non-sink state {w.states[s]} carries undef"))
    for fam, atoms in sorted(w.families.items()):
        if len(atoms) < 2:
            continue
        bits = w.mask_of(atoms)
        for s, mask in enumerate(w.labels):
            if s == w.sink:
                continue
            if bin(mask & bits).count("1") != 1:
                issues.append(Issue(
                    "family-exclusive",
                    f"state {w.states[s]}: family {fam} needs exactly one value"))
    return issues


# --------------------------------------------------------------------------
# paths and histories

@dataclass(frozen=True)
class ObservableHistory:
    obs_set: frozenset
    entries: tuple

    def __len__(self):
        return len(self.entries)

    def prefix(self, n):
        return ObservableHistory(self.obs_set, self.entries[:n])


def is_path(w: World, path: Sequence[int]) -> bool:
    return all(b in w.succ[a] for a, b in zip(path, path[1:]))


def trace_of(w: World, path: Sequence[int]) -> tuple:
    return tuple(w.label_sets[s] for s in path)


def observable_history(w: World, path: Sequence, obs: Iterable[str]) -> ObservableHistory:
    """Entry ``i`` is the label of ``path[i]`` restricted to ``obs``."""
    ids = [w.state_id(s) if isinstance(s, str) else s for s in path]
    if not is_path(w, ids):
        raise WorldError("path-not-in-world: consecutive states are not connected")
    obs_set = w.resolve_obs(obs)
    return ObservableHistory(obs_set, tuple(w.label_sets[s] & obs_set for s in ids))


# --------------------------------------------------------------------------
# text format

_EDGE_RE = re.compile(r"^edge\s+(\S+)\s+(\S+)\s+(.*)$")


def _expand_range(spec):
    spec = spec.strip()
    m = re.fullmatch(r"(-?\d+)\s*\.\.\s*(-?\d+)", spec)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        return [str(v) for v in range(lo, hi + 1)]
    return [v.strip() for v in spec.split(",") if v.strip()]


def _parse_pairs(text, ego, env, line):
    text = text.strip()
    if text == "*":
        return {(a, e) for a in ego for e in env}
    if not (text.startswith("{") and text.endswith("}")):
        raise WorldError("edge actions must be written {ego/env, ...}", line)
    pairs = set()
    for item in text[1:-1].split(","):
        item = item.strip()
        if not item:
            continue
        if "/" not in item:
            raise WorldError(f"bad action pair {item!r}", line)
        a, e = (x.strip() for x in item.split("/", 1))
        for aa in (ego if a == "*" else [a]):
            for ee in (env if e == "*" else [e]):
                pairs.add((aa, ee))
    return pairs


def parse_world(text: str, name="world", repair=False) -> World:
    b = WorldBuilder(name=name)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "prop":
            if "=" in rest and not rest.split("=", 1)[0].strip().count(" "):
                fam, values = rest.split("=", 1)
                b.family(fam.strip(), _expand_range(values))
            else:
                b.prop(*rest.split())
        elif head == "act":
            side, *names = rest.split()
            if side == "ego":
                b.actions(ego=names)
            elif side == "env":
                b.actions(env=names)
            else:
                raise WorldError(f"act needs ego|env, got {side!r}", lineno)
        elif head == "state":
            parts = rest.split()
            if not parts:
                raise WorldError("state needs an identifier", lineno)
            b.state(parts[0], parts[1:])
        elif head == "init":
            b.initial(*rest.split())
        elif head == "sink":
            b.set_sink(rest.split()[0])
        elif head == "edge":
            m = _EDGE_RE.match(line)
            if not m:
                raise WorldError("edge <src> <dst> {ego/env, ...}", lineno)
            b.edge(m.group(1), m.group(2),
                   _parse_pairs(m.group(3), b.ego_actions, b.env_actions, lineno))
        elif head == "complete":
            repair = True
        elif head == "world":
            b.name = rest or name
        else:
            raise WorldError(f"unknown directive {head!r}", lineno)
    try:
        return b.build(repair=repair)
    except WorldError:
        raise
    except KeyError as exc:
        raise WorldError(f"unknown identifier {exc}") from None


def _format_pairs(w, acts):
    env_all = set(range(len(w.env_actions)))
    by_ego = {}
    for a, e in acts:
        by_ego.setdefault(a, set()).add(e)
    if len(by_ego) == len(w.ego_actions) and all(v == env_all for v in by_ego.values()):
        return "*"
    items = []
    for a in sorted(by_ego):
        envs = by_ego[a]
        if envs == env_all:
            items.append(f"{w.ego_actions[a]}/*")
        else:
            items.extend(f"{w.ego_actions[a]}/{w.env_actions[e]}" for e in sorted(envs))
    return "{" + ", ".join(items) + "}"


def format_world(w: World) -> str:
    lines = [f"world {w.name}"]
    in_family = set()
    for fam, atoms in w.families.items():
        if len(atoms) > 1 or atoms[0] != fam:
            values = [a.split("=", 1)[1] for a in atoms]
            lines.append(f"prop {fam} = {', '.join(values)}")
            in_family.update(atoms)
    singles = [p for p in w.props if p not in in_family]
    if singles:
        lines.append("prop " + " ".join(singles))
    lines.append("act ego " + " ".join(w.ego_actions))
    lines.append("act env " + " ".join(w.env_actions))
    for s, name in enumerate(w.states):
        labels = [w.props[i] for i in range(len(w.props)) if w.labels[s] >> i & 1]
        lines.append(" ".join(["state", name] + labels))
    lines.append("init " + " ".join(w.states[s] for s in sorted(w.init)))
    if w.sink is not None:
        lines.append(f"sink {w.states[w.sink]}")
    for s, d, acts in w.edges:
        lines.append(f"edge {w.states[s]} {w.states[d]} {_format_pairs(w, acts)}")
    return "\n".join(lines) + "\n"
