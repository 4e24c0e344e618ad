"""Figure rendering for the CLI report path.

Every report subcommand drops a PNG next to its delimited output.  Figures
are rendered off-screen and saved without embedded timestamps so that runs
with the same seed produce byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KW = {"dpi": 144, "metadata": {"Date": None}}


def histogram(values, title: str, xlabel: str, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.hist(np.asarray(values), bins=60, color="#39668c", edgecolor="white", lw=0.3)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("replicates")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def ecdf_comparison(a, b, labels, stat: float, threshold: float, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for vals, label, color in zip((a, b), labels, ("#39668c", "#c4542d")):
        v = np.sort(np.asarray(vals))
        ax.step(v, np.arange(1, len(v) + 1) / len(v), where="post",
                label=label, color=color, lw=1.2)
    ax.set_xlabel("statistic")
    ax.set_ylabel("empirical CDF")
    verdict = "PASS" if stat < threshold else "FAIL"
    ax.set_title(f"KS = {stat:.4f}, threshold = {threshold:.4f} ({verdict})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def step_function_plot(f, title: str, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    end = f.breakpoints[-1] * 1.25 if np.isinf(f.domain_end) else f.domain_end
    xs = np.append(f.breakpoints, end)
    ys = np.append(f.values, f.values[-1])
    ax.step(xs, ys, where="post", color="#39668c", lw=1.4)
    ax.set_xlabel("time")
    ax.set_ylabel("value")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def local_limit_plot(xs, lattice, gauss, title: str, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(xs, lattice, label="rescaled lattice pmf", color="#39668c", lw=1.0)
    ax.plot(xs, gauss, label="gaussian density", color="#c4542d", lw=1.0, ls="--")
    ax.set_xlabel("x / a_n")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def ratio_ladder_plot(ns, ratios, title: str, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.semilogx(ns, ratios, "o-", color="#39668c")
    ax.set_xlabel("n")
    ax.set_ylabel("scaled tail probability")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
