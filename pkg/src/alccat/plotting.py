"""PNG figures for a differential report (matplotlib, headless)."""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, outdir: str, name: str) -> str:
    path = os.path.join(outdir, name)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def render_figures(rep, outdir: str) -> list[str]:
    """Verdict counts, per-instance time and certificate size against tree count."""
    rs = rep.results
    paths = []

    fig, ax = plt.subplots(figsize=(6, 3.5))
    labels = ["tableau", "syntactic", "guided"]
    fields = ["tableau", "cat_syntactic", "cat_guided"]
    unsat = [sum(1 for r in rs if getattr(r, f) == "unsat") for f in fields]
    other = [sum(1 for r in rs if getattr(r, f) in ("sat", "open")) for f in fields]
    ax.bar(labels, other, label="sat / open", color="#8fb3d9")
    ax.bar(labels, unsat, bottom=other, label="unsat", color="#d98f8f")
    ax.set_ylabel("instances")
    ax.set_title(f"verdicts ({len(rs)} instances, {len(rep.discrepancies)} discrepancies)")
    ax.legend()
    paths.append(_save(fig, outdir, "verdicts.png"))

    fig, ax = plt.subplots(figsize=(6, 3.5))
    secs = sorted(r.seconds for r in rs)
    ax.plot(range(len(secs)), secs, color="#444")
    ax.set_yscale("symlog", linthresh=1e-3)
    ax.set_xlabel("instances (sorted)")
    ax.set_ylabel("seconds")
    ax.set_title("time per instance")
    paths.append(_save(fig, outdir, "timing.png"))

    fig, ax = plt.subplots(figsize=(6, 3.5))
    pts = [(r.trees, r.cert_steps) for r in rs if r.certificate == "verified"]
    if pts:
        ax.scatter(*zip(*pts), s=12, color="#a05050")
    ax.set_xlabel("completion trees")
    ax.set_ylabel("certificate steps")
    ax.set_title("certificate size")
    paths.append(_save(fig, outdir, "certificates.png"))
    return paths
