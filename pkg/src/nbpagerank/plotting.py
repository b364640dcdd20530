"""Static figures for the report commands.  Rendered with the Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _figure(width=6.0, ratio=0.62, **kw):
    with plt.rc_context(STYLE):
        return plt.subplots(figsize=(width, width * ratio), **kw)


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_sweep(result, path, labels=None):
    """One line per node: mu-PageRank value against mu."""
    fig, ax = _figure()
    for i in range(result.values.shape[1]):
        ax.plot(result.mu_grid, result.values[:, i], lw=0.9, marker=".", ms=3,
                label=None if labels is None else str(labels[i]))
    ax.set_xlabel(r"$\mu$")
    ax.set_ylabel("PageRank value")
    if labels is not None and len(labels) <= 20:
        ax.legend(ncol=2, frameon=False)
    return _save(fig, path)


def plot_overlap(reports: dict, path):
    """Mean top-x% overlap per model, one line per percent level."""
    fig, ax = _figure()
    names = list(reports)
    percents = next(iter(reports.values())).percents
    for j, pct in enumerate(percents):
        means = [reports[name].mean_overlap[j] for name in names]
        ax.plot(range(len(names)), means, marker="o", label=f"top {pct:g}%")
    ax.set_xticks(range(len(names)), names)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("overlap fraction")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_distributions(standard, infinity, path, bins=50):
    """Overlaid histograms of standard and infinity-PageRank values."""
    fig, ax = _figure()
    lo = min(np.min(standard), np.min(infinity))
    hi = max(np.max(standard), np.max(infinity))
    edges = np.geomspace(lo, hi, bins) if lo > 0 else bins
    ax.hist(standard, bins=edges, alpha=0.5, color="tab:blue", label="standard")
    ax.hist(infinity, bins=edges, alpha=0.5, color="tab:red", label=r"$\infty$")
    if lo > 0:
        ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("PageRank value")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_accuracy_curve(curve, path):
    fig, ax = _figure()
    mean = curve.mean_accuracy
    sd = curve.accuracy.std(axis=0)
    ax.fill_between(curve.separations, mean - sd, mean + sd, alpha=0.2)
    ax.plot(curve.separations, mean, marker="o")
    ax.set_xlabel(r"$p_{in} - p_{out}$")
    ax.set_ylabel("best-match accuracy")
    ax.set_ylim(0, 1.05)
    return _save(fig, path)


def plot_clusters(g, labels, path, truth=None, seed=0):
    """Spring-style layout coloured by cluster label (and by truth, if given)."""
    from scipy.sparse.csgraph import laplacian
    from scipy.linalg import eigh

    lap = laplacian(g.adjacency().toarray(), normed=True)
    _, vecs = eigh(lap)
    pos = vecs[:, 1:3] if g.n > 2 else np.random.default_rng(seed).random((g.n, 2))
    panels = [("clusters", labels)] + ([("truth", truth)] if truth is not None else [])
    fig, axes = _figure(width=4.0 * len(panels), ratio=0.9 / len(panels), ncols=len(panels))
    axes = np.atleast_1d(axes)
    for ax, (title, lab) in zip(axes, panels):
        for u, v in g.edges:
            ax.plot(pos[[u, v], 0], pos[[u, v], 1], color="0.8", lw=0.4, zorder=1)
        ax.scatter(pos[:, 0], pos[:, 1], c=np.asarray(lab), cmap="tab20", s=18, zorder=2)
        ax.set_title(title)
        ax.set_axis_off()
    return _save(fig, path)
