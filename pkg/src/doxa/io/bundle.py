"""Project bundles: a manifest naming the world, goals, knowledge, beliefs,
formation, strategies and env scripts of one doxastic model.

Manifest lines (paths are relative to the manifest)::

    world <path>
    goals <path>
    obs <atom or family>...
    knowledge <path>
    catalog <path>
    formation <path>
    strategy <name> <path>
    env <name> <path>
    bound <int>
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

from ..autonomy import EnvScript, SimulationError, parse_env_script
from ..beliefs.formation import RegularBeliefFormation, parse_formation
from ..beliefs.knowledge import KnowledgeLabeling, parse_knowledge
from ..beliefs.reality import BeliefCatalog, parse_catalog, validate_catalog
from ..beliefs.regex import RegexError
from ..goals import GoalError, GoalList, normalize_goal_list
from ..logic.formulas import FormulaSyntaxError, atoms, format_formula, parse_ltl
from ..synthesis.machine import MachineError, StrategyMachine, parse_machine
from ..world import World, WorldError, parse_world, validate_world

MANIFEST = "bundle.doxa"


class BundleError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class Diagnostic:
    file: str
    line: int | None
    message: str

    def __str__(self):
        where = self.file if self.line is None else f"{self.file}:{self.line}"
        return f"{where}: {self.message}"


# --------------------------------------------------------------------------
# goal files

def parse_goals(text: str) -> GoalList:
    goals, prios = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 2)
        if parts[0] != "goal" or len(parts) < 3:
            raise WorldError("goal <priority> <ltl>", lineno)
        try:
            prios.append(int(parts[1]))
            goals.append(parse_ltl(parts[2]))
        except ValueError as exc:
            raise WorldError(str(exc), lineno) from None
    try:
        return normalize_goal_list(goals, prios)
    except GoalError as exc:
        raise WorldError(str(exc)) from None


def format_goals(g: GoalList) -> str:
    return "".join(f"goal {i} {format_formula(f)}\n" for i, f in enumerate(g.goals[2:], 1))


# --------------------------------------------------------------------------
# bundles

@dataclass
class Bundle:
    path: str
    world: World | None = None
    goals: GoalList | None = None
    obs_names: tuple = ()
    obs: frozenset = frozenset()
    knowledge: KnowledgeLabeling | None = None
    catalog: BeliefCatalog | None = None
    formation: RegularBeliefFormation | None = None
    strategies: dict = field(default_factory=dict)
    envs: dict = field(default_factory=dict)
    bound: int | None = None
    files: dict = field(default_factory=dict)       # section -> path as written

    @property
    def root(self):
        return os.path.dirname(self.path)


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def manifest_path(path):
    return os.path.join(path, MANIFEST) if os.path.isdir(path) else path


def load_bundle(path, strict=True):
    """Parse a bundle; with ``strict`` any diagnostic raises :class:`BundleError`.

    Returns ``(bundle, diagnostics)``.
    """
    path = manifest_path(path)
    diags = []
    if not os.path.exists(path):
        raise BundleError([Diagnostic(path, None, "bundle manifest not found")])
    b = Bundle(path)
    root = b.root
    entries = {}
    for lineno, raw in enumerate(_read(path).splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head in ("world", "goals", "knowledge", "catalog", "formation") and len(parts) == 2:
            if head in entries:
                diags.append(Diagnostic(path, lineno, f"duplicate {head} line"))
            entries[head] = (parts[1], lineno)
        elif head == "obs":
            b.obs_names = tuple(parts[1:])
            entries["obs"] = (None, lineno)
        elif head in ("strategy", "env") and len(parts) == 3:
            entries.setdefault(head + "s", []).append((parts[1], parts[2], lineno))
        elif head == "bound" and len(parts) == 2 and parts[1].isdigit():
            b.bound = int(parts[1])
        else:
            diags.append(Diagnostic(path, lineno, f"cannot read manifest line {line!r}"))
    for section in ("world", "goals", "obs"):
        if section not in entries:
            diags.append(Diagnostic(path, None, f"missing-section: {section}"))

    def attempt(name, fn):
        rel = entries[name][0]
        b.files[name] = rel
        full = os.path.join(root, rel)
        try:
            return fn(_read(full), full)
        except OSError as exc:
            diags.append(Diagnostic(full, None, f"cannot read: {exc.strerror}"))
        except WorldError as exc:
            diags.append(Diagnostic(full, exc.line, exc.args[0] if exc.args else str(exc)))
        except (FormulaSyntaxError, RegexError, MachineError, GoalError, SimulationError,
                ValueError) as exc:
            diags.append(Diagnostic(full, getattr(exc, "line", None), str(exc)))
        return None

    if "world" in entries:
        b.world = attempt("world", lambda t, p: parse_world(t, _stem(p)))
        if b.world is not None:
            for issue in validate_world(b.world):
                diags.append(Diagnostic(os.path.join(root, b.files["world"]), None, str(issue)))
    if "goals" in entries:
        b.goals = attempt("goals", lambda t, p: parse_goals(t))
    w = b.world
    if w is not None and b.obs_names:
        try:
            b.obs = w.resolve_obs(b.obs_names)
        except WorldError as exc:
            diags.append(Diagnostic(path, entries["obs"][1], str(exc)))
    if b.goals is not None and w is not None:
        unknown = set()
        for g in b.goals.goals:
            unknown |= {a for a in atoms(g) if a not in w.prop_index}
        if unknown:
            diags.append(Diagnostic(os.path.join(root, b.files["goals"]), None,
                                    f"goals mention unknown propositions {sorted(unknown)}"))
    if "knowledge" in entries and w is not None:
        b.knowledge = attempt("knowledge", lambda t, p: parse_knowledge(t, w))
    elif w is not None:
        b.knowledge = KnowledgeLabeling.empty(w)
    if "catalog" in entries:
        cache = {}

        def load_world(name, rel, base):
            full = os.path.join(os.path.dirname(base), rel)
            if full not in cache:
                cache[full] = parse_world(_read(full), name)
            return cache[full]

        b.catalog = attempt("catalog", lambda t, p: parse_catalog(
            t, lambda name, rel: load_world(name, rel, p)))
        if b.catalog is not None:
            for issue in validate_catalog(b.catalog, w):
                diags.append(Diagnostic(os.path.join(root, b.files["catalog"]), None, str(issue)))
    if "formation" in entries:
        resolve = w.resolve_obs if w is not None else None
        b.formation = attempt("formation", lambda t, p: parse_formation(t, resolve))
        if b.formation is not None:
            if b.catalog is not None:
                for bid in b.formation.belief_ids:
                    if bid not in b.catalog:
                        diags.append(Diagnostic(os.path.join(root, b.files["formation"]), None,
                                                f"formation names unknown belief {bid!r}"))
            if b.obs and not b.formation.obs_set <= b.obs:
                diags.append(Diagnostic(os.path.join(root, b.files["formation"]), None,
                                        "formation observes atoms outside the bundle obs set"))
    for name, rel, lineno in entries.get("strategys", []):
        full = os.path.join(root, rel)
        try:
            b.strategies[name] = parse_machine(_read(full))
            b.files["strategy:" + name] = rel
        except OSError as exc:
            diags.append(Diagnostic(full, None, f"cannot read: {exc.strerror}"))
        except MachineError as exc:
            diags.append(Diagnostic(full, None, str(exc)))
    for name, rel, lineno in entries.get("envs", []):
        full = os.path.join(root, rel)
        try:
            sc = parse_env_script(_read(full))
            if w is not None and sc.init not in w.state_index:
                diags.append(Diagnostic(full, None, f"unknown initial state {sc.init!r}"))
            b.envs[name] = sc
            b.files["env:" + name] = rel
        except OSError as exc:
            diags.append(Diagnostic(full, None, f"cannot read: {exc.strerror}"))
        except SimulationError as exc:
            diags.append(Diagnostic(full, None, str(exc)))
    if strict and diags:
        raise BundleError(diags)
    return b, diags


def _stem(path):
    return os.path.splitext(os.path.basename(path))[0]


def write_manifest(b: Bundle) -> str:
    lines = []
    for key in ("world", "goals", "knowledge", "catalog", "formation"):
        if key in b.files:
            lines.append(f"{key} {b.files[key]}")
    if b.obs_names:
        lines.append("obs " + " ".join(b.obs_names))
    for key, rel in b.files.items():
        if key.startswith("strategy:"):
            lines.append(f"strategy {key.split(':', 1)[1]} {rel}")
    for key, rel in b.files.items():
        if key.startswith("env:"):
            lines.append(f"env {key.split(':', 1)[1]} {rel}")
    if b.bound is not None:
        lines.append(f"bound {b.bound}")
    return "\n".join(lines) + "\n"


__all__ = ["Bundle", "BundleError", "Diagnostic", "EnvScript", "StrategyMachine", "load_bundle",
           "manifest_path", "parse_goals", "format_goals", "write_manifest", "MANIFEST"]
