"""Regular belief formation: ordered ``regex -> belief`` rules.

The rules compile to one lazily built deterministic automaton whose states are
tuples of per-rule NFA state sets; the output of a state is the belief of the
first rule that accepts.  The automaton is the shared tool for forming
beliefs, for consistency products and for building doxastic arenas.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .regex import ANY, NFA, RegexError, format_regex, letter_token, parse_regex, regex_letters


class NoRuleMatches(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    text: str
    belief: str


class FormationDFA:
    """Lazy product automaton of all rule NFAs (first-match output)."""

    def __init__(self, nfas, beliefs):
        self.nfas = nfas
        self.beliefs = beliefs
        self.states = []
        self.index = {}
        self.outputs = []
        self.trans = {}
        self._lock = threading.Lock()
        self.initial = self._intern(tuple(n.initial() for n in nfas))

    def _intern(self, key):
        sid = self.index.get(key)
        if sid is None:
            sid = len(self.states)
            self.index[key] = sid
            self.states.append(key)
            out = None
            for nfa, sets, b in zip(self.nfas, key, self.beliefs):
                if nfa.accept in sets:
                    out = b
                    break
            self.outputs.append(out)
        return sid

    def step(self, q, letter) -> int:
        k = (q, letter)
        hit = self.trans.get(k)
        if hit is not None:
            return hit
        with self._lock:
            hit = self.trans.get(k)
            if hit is None:
                key = tuple(n.step(s, letter) for n, s in zip(self.nfas, self.states[q]))
                hit = self.trans[k] = self._intern(key)
        return hit

    def output(self, q):
        return self.outputs[q]

    def is_dead(self, q):
        return not any(self.states[q])

    def run(self, word):
        q = self.initial
        for letter in word:
            q = self.step(q, letter)
        return q


class RegularBeliefFormation:
    def __init__(self, obs_set, rules, letters=None):
        self.obs_set = frozenset(obs_set)
        self.letters = dict(letters or {})
        self.rules = tuple(Rule(t, b) for t, b in rules)
        for name, letter in self.letters.items():
            if not letter <= self.obs_set:
                raise RegexError(f"letter {name} uses atoms outside the observation set")
        self.asts = tuple(parse_regex(r.text, self._resolve) for r in self.rules)
        self._dfa = None
        self._lock = threading.Lock()

    def _resolve(self, word):
        if word in self.letters:
            return self.letters[word]
        letter = frozenset() if word == "{}" else frozenset(word.split("."))
        bad = letter - self.obs_set
        if bad:
            raise RegexError(f"token {word!r} is neither a letter alias nor a canonical "
                             f"observation (unknown atoms {sorted(bad)})")
        return letter

    @property
    def dfa(self) -> FormationDFA:
        if self._dfa is None:
            with self._lock:
                if self._dfa is None:
                    self._dfa = FormationDFA([NFA(a) for a in self.asts],
                                             [r.belief for r in self.rules])
        return self._dfa

    @property
    def belief_ids(self):
        return tuple(dict.fromkeys(r.belief for r in self.rules))

    def letter_of(self, label) -> frozenset:
        return frozenset(label) & self.obs_set

    def form_belief(self, history) -> str:
        entries = getattr(history, "entries", history)
        if not entries:
            raise NoRuleMatches("empty history")
        q = self.dfa.run(self.letter_of(e) for e in entries)
        out = self.dfa.output(q)
        if out is None:
            raise NoRuleMatches("no-rule-matches: " + " ".join(letter_token(self.letter_of(e))
                                                               for e in entries))
        return out

    def belief_history(self, history) -> list:
        entries = getattr(history, "entries", history)
        out, q = [], self.dfa.initial
        for e in entries:
            q = self.dfa.step(q, self.letter_of(e))
            b = self.dfa.output(q)
            if b is None:
                raise NoRuleMatches(f"no-rule-matches at position {len(out)}")
            out.append(b)
        return out

    def lint(self, alphabet=None) -> list:
        """Pairs (i, j), i < j, of rules that match a common history."""
        letters = set(alphabet) if alphabet is not None else set()
        for a in self.asts:
            letters |= regex_letters(a)
        letters.add(("unmentioned",))
        nfas = [NFA(a) for a in self.asts]
        out = []
        for i in range(len(nfas)):
            for j in range(i + 1, len(nfas)):
                if _intersects(nfas[i], nfas[j], letters):
                    out.append((i, j))
        return out

    def format(self) -> str:
        lines = ["obs " + " ".join(sorted(self.obs_set))]
        for name, letter in self.letters.items():
            lines.append(f"letter {name} = {' '.join(sorted(letter))}".rstrip())
        for r in self.rules:
            lines.append(f"rule {r.text} -> {r.belief}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        return (isinstance(other, RegularBeliefFormation) and self.obs_set == other.obs_set
                and self.letters == other.letters and self.rules == other.rules)

    def __hash__(self):
        return hash((self.obs_set, self.rules))

    def __repr__(self):
        return f"RegularBeliefFormation(obs={sorted(self.obs_set)}, rules={len(self.rules)})"


def _intersects(n1, n2, letters):
    def step(nfa, s, letter):
        if letter == ("unmentioned",):
            nxt = {t for st in s for lab, t in nfa.edges[st] if lab is ANY}
            return nfa.closure(nxt)
        return nfa.step(s, letter)

    start = (n1.initial(), n2.initial())
    seen = {start}
    stack = [start]
    while stack:
        a, b = stack.pop()
        for letter in letters:
            a2, b2 = step(n1, a, letter), step(n2, b, letter)
            if not a2 or not b2:
                continue
            if n1.accept in a2 and n2.accept in b2:
                return True
            if (a2, b2) not in seen:
                seen.add((a2, b2))
                stack.append((a2, b2))
    return False


def parse_formation(text: str, resolve_obs=None) -> RegularBeliefFormation:
    """``resolve_obs(names)`` expands family names (defaults to identity)."""
    obs, letters, rules = None, {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "obs":
            names = rest.split()
            obs = frozenset(resolve_obs(names) if resolve_obs else names)
        elif head == "letter":
            name, eq, atoms = rest.partition("=")
            if not eq:
                raise RegexError(f"line {lineno}: letter <name> = <atoms>")
            letters[name.strip()] = frozenset(atoms.split())
        elif head == "rule":
            expr, arrow, belief = rest.rpartition("->")
            if not arrow or not belief.strip():
                raise RegexError(f"line {lineno}: rule <regex> -> <belief>")
            rules.append((expr.strip(), belief.strip()))
        else:
            raise RegexError(f"line {lineno}: unknown directive {head!r}")
    if obs is None:
        raise RegexError("formation needs an obs line")
    try:
        return RegularBeliefFormation(obs, rules, letters)
    except RegexError as exc:
        raise RegexError(str(exc)) from None


# --------------------------------------------------------------------------
# Mealy-style automata back to rules

@dataclass
class OutputAutomaton:
    """Complete DFA over ``alphabet`` with an output (belief id or None) per state."""

    alphabet: tuple
    initial: int
    trans: list            # trans[q][i] -> q'
    outputs: list
    names: dict = field(default_factory=dict)


def minimize(a: OutputAutomaton) -> OutputAutomaton:
    """Moore partition refinement restricted to reachable states."""
    reach, stack = {a.initial}, [a.initial]
    while stack:
        q = stack.pop()
        for t in a.trans[q]:
            if t not in reach:
                reach.add(t)
                stack.append(t)
    states = sorted(reach)
    block = {q: repr(a.outputs[q]) for q in states}
    while True:
        sig = {q: (block[q],) + tuple(block[t] for t in a.trans[q]) for q in states}
        ids = {}
        new = {q: ids.setdefault(sig[q], len(ids)) for q in states}
        if len(set(new.values())) == len(set(block.values())):
            block = new
            break
        block = new
    order = {}
    queue = [a.initial]
    order[block[a.initial]] = 0
    reps = {0: a.initial}
    i = 0
    while i < len(queue):
        q = queue[i]
        i += 1
        for t in a.trans[q]:
            if block[t] not in order:
                order[block[t]] = len(order)
                reps[order[block[t]]] = t
                queue.append(t)
    n = len(order)
    trans = [[order[block[t]] for t in a.trans[reps[k]]] for k in range(n)]
    outputs = [a.outputs[reps[k]] for k in range(n)]
    return OutputAutomaton(a.alphabet, 0, trans, outputs)


def _re_alt(x, y):
    if x is None:
        return y
    if y is None or x == y:
        return x
    return ("alt", x, y)


def _re_cat(x, y):
    if x is None or y is None:
        return None
    if x == ("eps",):
        return y
    if y == ("eps",):
        return x
    return ("cat", x, y)


def _re_star(x):
    if x is None or x == ("eps",):
        return ("eps",)
    return ("star", x)


def language_regex(a: OutputAutomaton, belief):
    """Regex AST for the nonempty words leading to a state with output ``belief``."""
    n = len(a.trans)
    full = frozenset(a.alphabet)
    # edge labels as letter sets, turned into regex nodes later
    edges = {}
    for q in range(n):
        for i, t in enumerate(a.trans[q]):
            edges.setdefault((q, t), set()).add(a.alphabet[i])

    def sym(letters):
        letters = frozenset(letters)
        if letters == full and len(full) > 1:
            return ANY
        node = None
        for letter in sorted(letters, key=letter_token):
            node = _re_alt(node, ("sym", letter))
        return node

    START, FINAL = n, n + 1
    R = {}
    for (q, t), letters in edges.items():
        R[(q, t)] = sym(letters)
    R[(START, a.initial)] = ("eps",)
    finals = [q for q in range(n) if a.outputs[q] == belief]
    for q in finals:
        R[(q, FINAL)] = _re_alt(R.get((q, FINAL)), ("eps",))
    # words must be nonempty: forbid accepting the empty word via the start edge
    for q in range(n):
        x = R.get((q, q))
        loop = _re_star(x)
        preds = [p for p in list(range(n)) + [START] if p != q and R.get((p, q)) is not None]
        succs = [s for s in list(range(n)) + [FINAL] if s != q and R.get((q, s)) is not None]
        for p in preds:
            for s in succs:
                path = _re_cat(_re_cat(R[(p, q)], loop), R[(q, s)])
                R[(p, s)] = _re_alt(R.get((p, s)), path)
        for key in [k for k in R if q in k]:
            del R[key]
    return R.get((START, FINAL))


def automaton_rules(a: OutputAutomaton):
    """Disjoint ``(regex text, belief)`` rules equivalent to ``a`` on nonempty words."""
    beliefs = [b for b in dict.fromkeys(a.outputs) if b is not None]
    rules = []
    for b in beliefs:
        node = language_regex(_no_empty_word(a), b)
        if node is not None:
            rules.append((format_regex(node), b))
    return rules


def _no_empty_word(a: OutputAutomaton) -> OutputAutomaton:
    """Split the initial state so the empty word carries no output."""
    n = len(a.trans)
    trans = [list(row) for row in a.trans] + [list(a.trans[a.initial])]
    outputs = list(a.outputs) + [None]
    return OutputAutomaton(a.alphabet, n, trans, outputs)
