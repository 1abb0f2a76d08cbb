"""Matplotlib figure output rendered alongside the delimited reports."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def save_correlation_figure(rows, path: str) -> None:
    """Scatter of CDER against DER (both collars) for a correlation study."""
    defined = [r for r in rows if r.cder is not None]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.scatter(
        [r.der_collar0 for r in defined],
        [r.cder for r in defined],
        s=18,
        label="DER collar 0 s",
    )
    ax.scatter(
        [r.der_collar025 for r in defined],
        [r.cder for r in defined],
        s=18,
        marker="x",
        label="DER collar 0.25 s",
    )
    ax.set_xlabel("DER")
    ax.set_ylabel("CDER")
    ax.set_title("CDER vs DER across simulated systems")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_score_figure(entries, path: str) -> None:
    """Per-recording DER/CDER bar chart for a scoring run."""
    recs = [e for e in entries if e.recording_id != "OVERALL"]
    names = [e.recording_id for e in recs]
    ders = [e.der.der if e.der is not None else 0.0 for e in recs]
    cders = [
        e.cder.cder if e.cder is not None and not e.cder_undefined else 0.0
        for e in recs
    ]
    x = range(len(recs))
    width = 0.4
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(recs) + 2), 4.5))
    ax.bar([i - width / 2 for i in x], ders, width, label="DER")
    ax.bar([i + width / 2 for i in x], cders, width, label="CDER")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=45, ha="right")
    ax.set_ylabel("error rate")
    ax.grid(True, axis="y", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
