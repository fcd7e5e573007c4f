"""Command line: ``doxa validate|analyze|convert``.

Exit codes: 0 affirmative, 1 negative, 2 conditional (bound-limited),
3 input error.
"""
from __future__ import annotations

import argparse
import os
import sys

from ..autonomy import (best_choice_table, conserves_autonomous,
                        conserves_doxastic, parse_env_script, run_doxastic_system,
                        SimulationError, synthesize_autonomous)
from ..beliefs.formation import NoRuleMatches
from ..beliefs.knowledge import check_knowledge_consistency
from ..beliefs.regex import RegexError
from ..relevance import knowledge_options, relevance, weak_relevance
from ..synthesis.api import max_achievable, verify_arena
from ..synthesis.arena import FormationObservation, FullObservation, build_arena
from ..synthesis.machine import MachineError
from ..world import WorldError
from .bundle import BundleError, load_bundle
from .convert import bundle_json
from .report import EXIT_INPUT, EXIT_YES, Report, exit_code

QUESTIONS = ("dominance", "best-actions", "decisive", "synth-autonomous", "conserve-doxastic",
             "conserve-autonomous", "weak-relevance", "relevance", "simulate")


class InputError(Exception):
    pass


def _lasso_text(lasso):
    return " ".join(lasso.stem) + " (" + " ".join(lasso.loop) + ")"


def _write(rep, out, name, text):
    if out is None:
        return
    path = os.path.join(out, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    rep.file(name)


def _plot(rep, out, name, fn, *args, **kw):
    if out is None:
        return
    from . import plots
    getattr(plots, fn)(*args, path=os.path.join(out, name), **kw)
    rep.file(name)


def _need(b, *parts):
    for p in parts:
        if getattr(b, p) is None:
            raise InputError(f"bundle has no {p}")


# --------------------------------------------------------------------------
# questions

def q_dominance(b, args, rep):
    w = b.world
    full = max_achievable(w, b.goals, FullObservation(), args.bound)
    rep.add("level-full", full.level)
    obs = max_achievable(w, b.goals, b.obs, args.bound)
    rep.add("level-obs", obs.level)
    definitive = not (full.conditional or obs.conditional)
    _write(rep, args.out, "dominant.machine", full.machine.format())
    verdict = True
    if b.strategies:
        _need(b, "formation")
        arena = build_arena(w, FormationObservation(b.formation))
        for name, m in sorted(b.strategies.items()):
            lvl = 0
            for n in range(len(b.goals), 0, -1):
                if verify_arena(arena, b.goals, n, m):
                    lvl = n
                    break
            rep.add(f"strategy-level {name}", lvl)
            rep.add(f"dominant {name}", lvl >= full.level)
            verdict = verdict and lvl >= full.level
    rep.verdict(verdict, definitive)
    return exit_code(verdict, definitive)


def q_best_actions(b, args, rep):
    _need(b, "catalog")
    table = best_choice_table(b.catalog, b.goals, b.world.ego_actions, args.bound)
    cond = False
    for bid, row in table.items():
        rep.add(f"belief {bid}", f"level {row.level} actions {' '.join(row.actions) or '-'}")
        cond = cond or row.conditional
    rep.verdict(True, not cond)
    return exit_code(True, not cond)


def q_decisive(b, args, rep):
    _need(b, "catalog")
    cat = b.catalog
    if b.formation is not None:
        cat = cat.subset(b.formation.belief_ids)
    table = best_choice_table(cat, b.goals, b.world.ego_actions, args.bound)
    ok = all(r.decisive for r in table.values())
    cond = any(r.conditional for r in table.values())
    for bid, row in table.items():
        rep.add(f"decisive {bid}", row.decisive)
    rep.verdict(ok, not cond)
    return exit_code(ok, not cond)


def q_synth_autonomous(b, args, rep):
    _need(b, "catalog", "knowledge")
    r = synthesize_autonomous(b.world, b.goals, b.knowledge, b.obs, b.catalog, args.bound)
    rep.add("level", r.level)
    rep.add("filtered", list(r.filtered) or "-")
    if r.reason:
        rep.add("reason", r.reason)
    if r.witness:
        rep.add("witness", list(r.witness))
    if r.formation is not None:
        consistent = check_knowledge_consistency(r.formation, b.world, b.knowledge, b.catalog)
        rep.add("knowledge-consistent", bool(consistent))
        _write(rep, args.out, "autonomous.formation", r.formation.format())
        _write(rep, args.out, "autonomous.machine", r.machine.format())
        _write(rep, args.out, "belief-choice.machine", r.doxastic.format())
    rep.verdict(r.status, r.definitive)
    return exit_code(bool(r), r.definitive)


def _conservation(rep, args, b, res, name):
    rep.add("level", res.level)
    if res.reason:
        rep.add("reason", res.reason)
    if res.undecisive:
        rep.add("undecisive", list(res.undecisive))
    if res.consistency is not None and not res.consistency:
        c = res.consistency
        rep.add("inconsistent", f"belief {c.belief} along {' '.join(c.witness)}")
    if res.counterexample is not None:
        rep.add("counterexample", _lasso_text(res.counterexample))
        if res.beliefs is not None:
            rep.add("counterexample-beliefs", _lasso_text(res.beliefs))
        _write(rep, args.out, "counterexample.txt",
               "states " + _lasso_text(res.counterexample) + "\n"
               + ("beliefs " + _lasso_text(res.beliefs) + "\n" if res.beliefs else ""))
        _plot(rep, args.out, "counterexample.svg", "plot_world", b.world,
              highlight=res.counterexample.stem + res.counterexample.loop, title=name)
    if res.machine is not None:
        _write(rep, args.out, "doxastic.machine", res.machine.format())
    rep.verdict(res.holds, res.definitive)
    return exit_code(res.holds, res.definitive)


def q_conserve_doxastic(b, args, rep):
    _need(b, "catalog", "formation", "knowledge")
    res = conserves_doxastic(b.world, b.goals, b.knowledge, b.obs, b.catalog, b.formation,
                             args.bound)
    return _conservation(rep, args, b, res, "conserve-doxastic")


def q_conserve_autonomous(b, args, rep):
    _need(b, "catalog", "formation", "knowledge")
    res = conserves_autonomous(b.world, b.goals, b.knowledge, b.obs, b.catalog, b.formation,
                               args.bound)
    return _conservation(rep, args, b, res, "conserve-autonomous")


def _weak_lines(rep, wr, world, prefix=""):
    rep.add(prefix + "tuple", f"{wr.top.point.describe()} {wr.top.status}")
    for r in wr.checked:
        rep.add(prefix + "lesser", f"{r.point.describe(world, wr.top.point)} {r.status}")
    for p, q in wr.monotonicity:
        rep.add(prefix + "monotonicity-violation",
                f"{p.describe(world, wr.top.point)} < {q.describe(world, wr.top.point)}")
    if wr.truncated:
        rep.add(prefix + "truncated", True)


def _k_order_lines(rep, K, catalog):
    """Per group of states: each formula subset kept as a lattice option and
    the beliefs it admits, so both readings of the K order can be checked."""
    groups = {}
    for s, opts in enumerate(knowledge_options(K, catalog)):
        names = tuple(sorted(K.names_at(s)))
        if not names:
            continue
        key = (names, tuple((sub, tuple(sorted(adm))) for adm, sub in opts))
        groups.setdefault(key, []).append(K.world.states[s])
    for (names, opts), states in groups.items():
        where = ",".join(states)
        rep.add("k-classes", f"{where} {{{','.join(names)}}} syntactic-subsets={2 ** len(names)} "
                             f"semantic-classes={len(opts)}")
        full = set(opts[0][1])
        for sub, adm in opts:
            wider = "yes" if set(adm) >= full else "no"
            rep.add("k-option", f"{where} {{{','.join(sub)}}} admits {{{','.join(adm)}}} "
                                f"contains-K-beliefs={wider}")


def q_weak_relevance(b, args, rep):
    _need(b, "catalog", "knowledge")
    wr = weak_relevance(b.world, b.goals, b.knowledge, b.obs_names, b.catalog, args.bound,
                        mode=args.lattice, vary=args.vary)
    rep.add("mode", wr.mode)
    if "K" in args.vary.upper():
        _k_order_lines(rep, b.knowledge, b.catalog)
    _weak_lines(rep, wr, b.world)
    rows = [(wr.top.point.describe(), wr.top.status)]
    rows += [(r.point.describe(b.world, wr.top.point), r.status) for r in wr.checked]
    _plot(rep, args.out, "lattice.svg", "plot_lattice", rows, title="weak relevance")
    rep.verdict(wr.holds, wr.definitive)
    return exit_code(wr.holds, wr.definitive)


def _parse_pool(args, b):
    if not args.pool:
        return None
    comp = args.component.upper()
    out = []
    for entry in args.pool:
        items = tuple(x for x in entry.split(",") if x)
        if comp == "K":
            raise InputError("knowledge pools are taken from the knowledge down-set")
        out.append(items)
    return out


def q_relevance(b, args, rep):
    _need(b, "catalog", "knowledge")
    pool = _parse_pool(args, b)
    res = relevance(b.world, b.goals, b.knowledge, b.obs_names, b.catalog,
                    component=args.component, pool=pool, bound=args.bound, mode=args.lattice)
    rep.add("component", res.component)
    _weak_lines(rep, res.weak, b.world)
    for member, wr in res.pool_results.items():
        label = ",".join("+".join(x) if isinstance(x, tuple) else x for x in member) or "-"
        rep.add(f"pool {label}", "weakly-relevant" if wr.holds else "not-weakly-relevant")
    rep.add("alternatives", [",".join(str(x) for x in m) or "-" for m in res.alternatives]
            or "-")
    rep.verdict(res.holds, res.definitive)
    return exit_code(res.holds, res.definitive)


def q_simulate(b, args, rep):
    if not args.env:
        raise InputError("simulate needs --env")
    if args.env in b.envs:
        script = b.envs[args.env]
    elif os.path.exists(args.env):
        with open(args.env, encoding="utf-8") as fh:
            script = parse_env_script(fh.read())
    else:
        raise InputError(f"unknown env script {args.env!r}")
    if b.formation is not None and b.strategies:
        name = args.strategy or sorted(b.strategies)[0]
        if name not in b.strategies:
            raise InputError(f"unknown strategy {name!r}")
        formation, machine = b.formation, b.strategies[name]
        rep.add("system", f"formation {b.files.get('formation')} strategy {name}")
    else:
        _need(b, "catalog", "knowledge")
        r = synthesize_autonomous(b.world, b.goals, b.knowledge, b.obs, b.catalog, args.bound)
        if not r:
            raise InputError("no autonomous system to simulate: " + (r.reason or r.status))
        formation, machine = r.formation, r.machine
        rep.add("system", "synthesized autonomous")
    sim = run_doxastic_system(b.world, formation, machine, script, b.goals)
    for i, s in enumerate(sim.states):
        a, e = sim.actions[i]
        loop = " loop" if i == sim.loop_start else ""
        rep.add(f"step {i}", f"{s} [{sim.observations[i]}] {sim.beliefs[i]} {a}/{e}{loop}")
    rep.add("level", sim.level)
    rep.add("violations", [f"{p}@{g}" for p, g in sim.violations] or "-")
    if sim.nondeterministic:
        rep.add("nondeterministic", True)
    _plot(rep, args.out, "simulation.svg", "plot_simulation", sim, title=args.env)
    ok = not sim.violations
    rep.verdict(ok)
    return exit_code(ok)


HANDLERS = {
    "dominance": q_dominance, "best-actions": q_best_actions, "decisive": q_decisive,
    "synth-autonomous": q_synth_autonomous, "conserve-doxastic": q_conserve_doxastic,
    "conserve-autonomous": q_conserve_autonomous, "weak-relevance": q_weak_relevance,
    "relevance": q_relevance, "simulate": q_simulate,
}


# --------------------------------------------------------------------------
# commands

def cmd_validate(args, rep):
    try:
        b, diags = load_bundle(args.bundle, strict=False)
    except BundleError as exc:
        diags, b = exc.diagnostics, None
    for d in diags:
        rep.add("diagnostic", str(d))
    if b is not None and not diags and b.formation is not None and b.catalog is not None:
        consistent = check_knowledge_consistency(b.formation, b.world, b.knowledge, b.catalog)
        rep.add("knowledge-consistent", bool(consistent))
        for i, j in b.formation.lint():
            rep.add("overlap", f"rules {i + 1} and {j + 1} match a common history")
    rep.verdict("valid" if not diags else "invalid")
    return EXIT_YES if not diags else EXIT_INPUT


def cmd_analyze(args, rep):
    b, _ = load_bundle(args.bundle)
    if args.bound is None:
        args.bound = b.bound
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
    return HANDLERS[args.question](b, args, rep)


def cmd_convert(args, rep):
    b, _ = load_bundle(args.bundle)
    text = bundle_json(b)
    if args.out is None:
        sys.stdout.write(text)
        return None
    os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    rep.add("wrote", args.out)
    rep.verdict(True)
    return EXIT_YES


def build_parser():
    p = argparse.ArgumentParser(prog="doxa", description="Doxastic world analysis.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("validate", help="run every validator over a bundle")
    v.add_argument("bundle")
    a = sub.add_parser("analyze", help="answer one question about a bundle")
    a.add_argument("question", choices=QUESTIONS)
    a.add_argument("bundle")
    a.add_argument("--bound", type=int, default=None, help="largest strategy memory tried by bounded synthesis")
    a.add_argument("--lattice", choices=("full", "frontier"), default="full")
    a.add_argument("--vary", default="KOB", help="lattice dimensions for weak-relevance")
    a.add_argument("--component", default="O", choices=("O", "B", "K", "o", "b", "k"))
    a.add_argument("--pool", action="append", help="comma separated pool member (repeatable)")
    a.add_argument("--env", help="env script name in the bundle, or a path")
    a.add_argument("--strategy", help="strategy name for simulate")
    a.add_argument("--out", help="directory for witness files and figures")
    c = sub.add_parser("convert", help="emit a JSON mirror of a bundle")
    c.add_argument("bundle")
    c.add_argument("--out", help="output file (default stdout)")
    return p


def _echo(argv):
    return "doxa " + " ".join(argv)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    rep = Report(_echo(argv))
    try:
        if args.command == "validate":
            code = cmd_validate(args, rep)
        elif args.command == "analyze":
            code = cmd_analyze(args, rep)
        else:
            code = cmd_convert(args, rep)
            if code is None:
                return EXIT_YES
    except BundleError as exc:
        for d in exc.diagnostics:
            rep.add("error", str(d))
        code = EXIT_INPUT
    except (InputError, WorldError, RegexError, MachineError, SimulationError, NoRuleMatches,
            OSError, ValueError) as exc:
        rep.add("error", str(exc))
        code = EXIT_INPUT
    rep.code = code
    sys.stdout.write(rep.render())
    return code


if __name__ == "__main__":
    sys.exit(main())
