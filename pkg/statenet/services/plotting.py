"""
StateNet-PH Plotting Module
SVG figures: persistence diagrams, network drawings, sweep curves and the
MDS plane with the SVM decision raster
"""
import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402
import numpy as np  # noqa: E402

from statenet.schemas.results import LabeledEmbedding2D, NoiseSweepResult, SweepResult  # noqa: E402
from statenet.services.analysis import REGIME_SIGN, RbfSvm  # noqa: E402
from statenet.services.homology import PersistenceDiagram  # noqa: E402
from statenet.services.networks import TransitionNetwork  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

matplotlib.rcParams["svg.hashsalt"] = "statenet"
matplotlib.rcParams["svg.fonttype"] = "none"

REGIME_COLORS = {"periodic": "tab:blue", "chaotic": "tab:red"}


def _save(fig, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug(f"Wrote {path}")
    return path


def plot_diagram(dgm: PersistenceDiagram, path: PathLike, title: Optional[str] = None) -> Path:
    """Birth-death scatter of D_0 and D_1 with the diagonal"""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    points = np.vstack([dgm.dim0, dgm.dim1]) if dgm.dim0.size or dgm.dim1.size else np.zeros((0, 2))
    top = float(points.max()) if points.size else 1.0
    ax.plot([0, top * 1.05], [0, top * 1.05], color="0.6", lw=1)
    if dgm.dim0.size:
        ax.scatter(dgm.dim0[:, 0], dgm.dim0[:, 1], s=18, label="$D_0$")
    if dgm.dim1.size:
        ax.scatter(dgm.dim1[:, 0], dgm.dim1[:, 1], s=18, marker="^", label="$D_1$")
    ax.set_xlabel("birth")
    ax.set_ylabel("death")
    ax.legend(loc="lower right")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_network(net: TransitionNetwork, path: PathLike, title: Optional[str] = None) -> Path:
    """Spring layout with a fixed seed; edge width follows the weight"""
    g = net.to_networkx()
    pos = nx.spring_layout(g, seed=0)
    weights = np.array([d["weight"] for _, _, d in g.edges(data=True)], dtype=float)
    widths = 0.5 + 2.5 * weights / weights.max() if weights.size else []
    fig, ax = plt.subplots(figsize=(5, 5))
    nx.draw_networkx_edges(g, pos, ax=ax, width=widths, edge_color="0.5")
    nx.draw_networkx_nodes(g, pos, ax=ax, node_size=40)
    if net.node_count <= 30:
        nx.draw_networkx_labels(g, pos, labels={i: int(s) for i, s in enumerate(net.states)}, ax=ax, font_size=7)
    ax.set_axis_off()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_sweep(sweep: SweepResult, path: PathLike, title: Optional[str] = None) -> Path:
    """Entropy and max lifetime against the swept parameter"""
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    x = np.array(sweep.x_values, dtype=float)
    finite = np.isfinite(x)
    std = sweep.entropy_std if isinstance(sweep, NoiseSweepResult) else {}
    for label, entropy in sweep.entropy_series.items():
        e = np.array([np.nan if v is None else v for v in entropy], dtype=float)
        if label in std:
            s = np.array([np.nan if v is None else v for v in std[label]], dtype=float)
            top.errorbar(x[finite], e[finite], yerr=s[finite], marker="o", ms=3, capsize=2, label=label)
        else:
            top.plot(x[finite], e[finite], marker="o", ms=3, label=label)
        life = np.array([np.nan if v is None else v for v in sweep.max_lifetime_series[label]], dtype=float)
        bottom.plot(x[finite], life[finite], marker="o", ms=3, label=label)
    top.set_ylabel("$E'(D_1)$")
    bottom.set_ylabel("$\\max(L_1)$")
    bottom.set_xlabel("bins" if sweep.parameter == "bins" else "SNR (dB)")
    top.legend()
    if title:
        top.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_mds(embedding: LabeledEmbedding2D, path: PathLike, seed: int = 1, title: Optional[str] = None) -> Path:
    """MDS scatter coloured by regime over the SVM decision raster"""
    points = np.array(embedding.points, dtype=float).reshape(-1, 2)
    fig, ax = plt.subplots(figsize=(5, 5))
    signs = np.array([REGIME_SIGN[v] for v in embedding.labels], dtype=float)
    if points.shape[0] and np.unique(signs).size == 2:
        svm = RbfSvm().fit(points, signs, seed)
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        pad = 0.1 * np.maximum(hi - lo, 1e-9)
        gx, gy = np.meshgrid(
            np.linspace(lo[0] - pad[0], hi[0] + pad[0], 120),
            np.linspace(lo[1] - pad[1], hi[1] + pad[1], 120),
        )
        z = svm.decision_function(np.column_stack([gx.ravel(), gy.ravel()])).reshape(gx.shape)
        levels = [min(float(z.min()), 0.0) - 1.0, 0.0, max(float(z.max()), 0.0) + 1.0]
        ax.contourf(gx, gy, z, levels=levels, colors=["#f6d5d5", "#d5e3f6"])
        if z.min() < 0 < z.max():
            ax.contour(gx, gy, z, levels=[0], colors="0.3", linewidths=1)
    for regime, color in REGIME_COLORS.items():
        mask = np.array([v == regime for v in embedding.labels], dtype=bool)
        if mask.any():
            ax.scatter(points[mask, 0], points[mask, 1], c=color, s=24, label=regime, edgecolors="k", linewidths=0.4)
    ax.legend()
    ax.set_xlabel("MDS 1")
    ax.set_ylabel("MDS 2")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_series(samples: Sequence[float], sample_rate: float, path: PathLike, title: Optional[str] = None) -> Path:
    x = np.asarray(samples, dtype=float)
    fig, ax = plt.subplots(figsize=(7, 2.5))
    ax.plot(np.arange(x.size) / sample_rate, x, lw=0.8)
    ax.set_xlabel("time (s)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)
