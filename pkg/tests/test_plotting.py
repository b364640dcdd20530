import numpy as np

from nbpagerank.clustering import accuracy_curve
from nbpagerank.experiments import mu_sweep, overlap_experiment
from nbpagerank.generators import GeneratorSpec
from nbpagerank.graph import build_graph
from nbpagerank.plotting import plot_accuracy_curve, plot_clusters, plot_distributions, plot_overlap, plot_sweep

G = build_graph([(0, 1), (1, 2), (2, 3), (3, 0), (1, 3), (3, 4)], 5)


def test_figures_written(tmp_path):
    paths = [
        plot_sweep(mu_sweep(G, 0.85, np.linspace(0, 10, 4)), tmp_path / "a" / "sweep.png", list("abcde")),
        plot_overlap({"gnp": overlap_experiment(GeneratorSpec("gnp", {"n": 60, "p": 0.1}), trials=2)},
                     tmp_path / "overlap.png"),
        plot_distributions(np.random.default_rng(0).random(50) + 0.01, np.random.default_rng(1).random(50) + 0.01,
                           tmp_path / "dist.png"),
        plot_accuracy_curve(accuracy_curve([0.5, 0.8], instances=2, sizes=(8, 8)), tmp_path / "acc.png"),
        plot_clusters(G, np.array([0, 0, 1, 1, 1]), tmp_path / "clusters.png", truth=np.array([0, 0, 0, 1, 1])),
    ]
    for path in paths:
        assert path.exists() and path.stat().st_size > 1000
