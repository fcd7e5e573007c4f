"""Figures written next to a report when an output directory is given."""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed metadata keeps svg output byte-stable
_META = {"Date": None, "Creator": "doxa"}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)
    return path


def _layout(n):
    return [(math.cos(2 * math.pi * i / max(n, 1)), math.sin(2 * math.pi * i / max(n, 1)))
            for i in range(n)]


def plot_world(world, path, highlight=(), title=""):
    """States on a circle, edges as arrows; ``highlight`` names states on a witness."""
    pos = _layout(len(world.states))
    marked = set(highlight)
    fig, ax = plt.subplots(figsize=(7, 7))
    drawn = set()
    for s in range(len(world.states)):
        for t in sorted({t for row in world.trans[s] for ts in row for t in ts}):
            if (s, t) in drawn:
                continue
            drawn.add((s, t))
            (x0, y0), (x1, y1) = pos[s], pos[t]
            if s == t:
                ax.add_patch(plt.Circle((x0 * 1.08, y0 * 1.08), 0.05, fill=False, lw=0.6,
                                        color="0.5"))
                continue
            on = world.states[s] in marked and world.states[t] in marked
            ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                        arrowprops=dict(arrowstyle="->", lw=1.6 if on else 0.6,
                                        color="tab:red" if on else "0.5", shrinkA=9, shrinkB=9))
    for s, (x, y) in enumerate(pos):
        name = world.states[s]
        colour = "tab:red" if name in marked else ("tab:blue" if s in world.init else "white")
        ax.scatter([x], [y], s=260, c=colour, edgecolors="black", zorder=3)
        ax.text(x, y - 0.11, name, ha="center", va="top", fontsize=8)
    ax.set_aspect("equal")
    ax.axis("off")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_simulation(sim, path, title=""):
    """Formed belief per step; the looping suffix is shaded."""
    beliefs = list(sim.beliefs)
    ids = list(dict.fromkeys(beliefs))
    fig, ax = plt.subplots(figsize=(max(4, len(beliefs) * 0.8), 1.5 + 0.35 * len(ids)))
    xs = range(len(beliefs))
    ax.step(list(xs), [ids.index(b) for b in beliefs], where="post", color="tab:blue")
    ax.scatter(list(xs), [ids.index(b) for b in beliefs], color="tab:blue", zorder=3)
    for i, (a, _) in enumerate(sim.actions):
        ax.text(i, ids.index(beliefs[i]) + 0.15, a, ha="center", fontsize=8)
    ax.axvspan(sim.loop_start - 0.4, len(beliefs) - 0.6, color="0.9", zorder=0)
    ax.set_yticks(range(len(ids)))
    ax.set_yticklabels(ids)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(sim.states, rotation=45, fontsize=8)
    ax.set_ylim(-0.5, len(ids) - 0.2)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_lattice(rows, path, title=""):
    """``rows`` are (label, status) pairs; one coloured cell per checked tuple."""
    colours = {"exists": "tab:green", "none": "tab:red"}
    fig, ax = plt.subplots(figsize=(7, 0.5 + 0.28 * max(len(rows), 1)))
    for i, (label, status) in enumerate(rows):
        ax.barh(i, 1, color=colours.get(status, "tab:orange"))
        ax.text(1.05, i, f"{label}  [{status}]", va="center", fontsize=8)
    ax.set_xlim(0, 6)
    ax.set_ylim(-0.6, max(len(rows), 1) - 0.4)
    ax.invert_yaxis()
    ax.axis("off")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)
