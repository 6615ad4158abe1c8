"""Figure and delimited-output rendering for CLI reports.

Figures are deterministic (no timestamps, empty PNG metadata): a pass/fail
summary bar for check tables and a coefficient-valuation profile for series
outputs (the Newton-polygon view of a Mellin transform).
"""

from __future__ import annotations

import csv
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def write_checks_csv(checks, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["check", "pass"])
        for c in checks:
            writer.writerow([c["name"], str(bool(c["pass"])).lower()])


def checks_figure(checks, path, title="kernel checks"):
    names = [c["name"] for c in checks]
    values = [1 if c["pass"] else 0 for c in checks]
    colors = ["#2a9d2a" if v else "#cc3333" for v in values]
    height = max(2.0, 0.32 * len(names) + 0.8)
    fig, ax = plt.subplots(figsize=(7.2, height))
    ax.barh(range(len(names)), [1] * len(names), color=colors, edgecolor="none")
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=7)
    ax.set_xticks([])
    ax.invert_yaxis()
    ax.set_title(f"{title}: {sum(values)}/{len(values)} pass", fontsize=9)
    for spine in ax.spines.values():
        spine.set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={})
    plt.close(fig)


def _valuation(q, p):
    q = Fraction(q)
    if q == 0:
        return None
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def valuation_figure(series_list, p, path, labels=None, title=None):
    """Coefficient p-adic valuations degree by degree for one or more series."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for idx, coeffs in enumerate(series_list):
        xs, ys = [], []
        for k, c in enumerate(coeffs):
            v = _valuation(c, p)
            if v is not None:
                xs.append(k)
                ys.append(v)
        label = labels[idx] if labels else f"series {idx}"
        ax.plot(xs, ys, marker="o", markersize=3, linewidth=1, label=label)
    ax.set_xlabel("degree")
    ax.set_ylabel(f"v_{p}(coefficient)")
    ax.set_title(title or f"coefficient valuations at p = {p}", fontsize=10)
    if labels or len(series_list) > 1:
        ax.legend(fontsize=7)
    ax.grid(alpha=0.25, linewidth=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={})
    plt.close(fig)
