"""Game arenas: a world seen through an observation function.

Ego commits an action from the observation history; the environment action
and any remaining nondeterminism are adversarial, so an arena only keeps, per
node and ego action, the union of possible successor nodes.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..beliefs.regex import letter_token


class Arena:
    def __init__(self, init, actions, step, label, token, world_state=None, limit=200000):
        """Explore from ``init``; ``step(node, action)`` yields successors."""
        self.actions = tuple(actions)
        self.nodes = []
        self.index = {}
        self.labels = []
        self.tokens = []
        self.world_state = []
        queue = deque()

        def intern(key):
            i = self.index.get(key)
            if i is None:
                if len(self.nodes) >= limit:
                    raise RuntimeError(f"arena exceeds {limit} nodes")
                i = len(self.nodes)
                self.index[key] = i
                self.nodes.append(key)
                self.labels.append(frozenset(label(key)))
                self.tokens.append(token(key))
                self.world_state.append(world_state(key) if world_state else key)
                queue.append(i)
            return i

        self.init = tuple(dict.fromkeys(intern(k) for k in init))
        self.succ = []
        while queue:
            i = queue.popleft()
            key = self.nodes[i]
            row = []
            for a in self.actions:
                row.append(tuple(sorted({intern(k) for k in step(key, a)})))
            while len(self.succ) <= i:
                self.succ.append(None)
            self.succ[i] = tuple(row)
        self.alphabet = tuple(sorted(set(self.tokens)))

    def __len__(self):
        return len(self.nodes)

    def any_succ(self, i):
        out = set()
        for row in self.succ[i]:
            out.update(row)
        return out


# --------------------------------------------------------------------------
# observation functions

@dataclass(frozen=True)
class MaskObservation:
    """Observation = state label intersected with a set of atoms."""

    atoms: frozenset

    def describe(self):
        return "mask:" + ",".join(sorted(self.atoms))


@dataclass(frozen=True)
class FullObservation:
    """Observation = the complete state label."""

    def describe(self):
        return "full"


@dataclass(frozen=True)
class FormationObservation:
    """Observation = the belief id emitted by a formation on the history."""

    formation: object

    def describe(self):
        return "formation"


def world_step(w):
    def step(s, a):
        ai = w.ego_index.get(a)
        if ai is None:
            return (w.sink,) if w.sink is not None else ()
        return w.ego_targets(s, ai)
    return step


def build_arena(w, obs, actions=None) -> Arena:
    actions = tuple(actions) if actions is not None else w.ego_actions
    if isinstance(obs, (frozenset, set, list, tuple)):
        # plain atom or family names
        obs = MaskObservation(w.resolve_obs(obs))
    if isinstance(obs, FullObservation):
        return Arena(sorted(w.init), actions, world_step(w), lambda s: w.label_sets[s],
                     lambda s: letter_token(w.label_sets[s]))
    if isinstance(obs, MaskObservation):
        mask = frozenset(obs.atoms)
        return Arena(sorted(w.init), actions, world_step(w), lambda s: w.label_sets[s],
                     lambda s: letter_token(w.label_sets[s] & mask))
    if isinstance(obs, FormationObservation):
        f = obs.formation
        dfa = f.dfa
        step = world_step(w)
        letters = [f.letter_of(l) for l in w.label_sets]

        def fstep(node, a):
            s, q = node
            return [(t, dfa.step(q, letters[t])) for t in step(s, a)]

        def tok(node):
            out = dfa.output(node[1])
            return out if out is not None else "?"

        init = [(s, dfa.step(dfa.initial, letters[s])) for s in sorted(w.init)]
        return Arena(init, actions, fstep, lambda n: w.label_sets[n[0]], tok,
                     world_state=lambda n: n[0])
    raise TypeError(f"unknown observation {obs!r}")


def estimate_step(w, token_of):
    """Any-action state estimate update: ``(E, token) -> E'``."""
    def step(E, tok):
        if E is None:
            return frozenset(s for s in w.init if token_of(s) == tok)
        nxt = set()
        for s in E:
            nxt.update(w.succ[s])
        return frozenset(s for s in nxt if token_of(s) == tok)
    return step
