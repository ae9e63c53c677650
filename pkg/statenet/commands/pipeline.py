"""
StateNet-PH Pipeline Commands
simulate, embed, network, persist, entropy, bottleneck and mds
"""
import logging
from typing import List

import numpy as np

from statenet.commands import command
from statenet.commands.common import (
    load_signal,
    output_dir,
    resolve_bins,
    resolve_diffusion_t,
    resolve_embedding,
)
from statenet.config import get_settings
from statenet.errors import StateNetError
from statenet.schemas.results import LabeledEmbedding2D, RunSummary
from statenet.schemas.run_config import RunConfig
from statenet.services import export
from statenet.services.analysis import AnalysisError, accuracy_over_seeds, mds_2d
from statenet.services.diagstats import bottleneck_matrix, summarize
from statenet.services.embedding import delay_embed, fnn_fractions, hyperdiagonal_distance, mpe_curve
from statenet.services.graphdist import DistanceKind, compute_distance
from statenet.services.homology import PersistenceDiagram, compute_diagrams
from statenet.services.networks import adjacency_record, build_network, symbolize, write_edge_list

logger = logging.getLogger(__name__)


def _artifacts(paths) -> List[str]:
    return [str(p) for p in paths]


@command("simulate")
def simulate(cfg: RunConfig) -> RunSummary:
    """Write a preset signal as CSV"""
    ts = load_signal(cfg)
    out = output_dir(cfg)
    paths = [
        export.write_series_csv(out / "series.csv", ts.samples),
        export.write_json(out / "series.json", {
            "label": ts.label,
            "sample_rate": ts.sample_rate,
            "length": len(ts),
            "snr_db": cfg.snr,
            "seed": cfg.seed if cfg.snr is not None else None,
        }),
    ]
    if cfg.plot:
        from statenet.services.plotting import plot_series
        paths.append(plot_series(ts.samples, ts.sample_rate, out / "series.svg", ts.label))
    return RunSummary(command="simulate", artifacts=_artifacts(paths),
                      result={"label": ts.label, "length": len(ts), "sample_rate": ts.sample_rate})


@command("embed")
def embed(cfg: RunConfig) -> RunSummary:
    """Delay embedding with its selection diagnostics"""
    ts = load_signal(cfg)
    tau, n, details = resolve_embedding(cfg, ts)
    emb = delay_embed(ts, tau, n)
    hyper = hyperdiagonal_distance(emb)

    record = {"tau": tau, "n": n, "vectors": len(emb), **details,
              "hyperdiagonal": {"min": float(hyper.min()), "mean": float(hyper.mean())}}
    try:
        settings = get_settings().embedding
        record["mpe_curve"] = mpe_curve(ts, settings.mpe_dimension, min(settings.mpe_tau_max, (len(ts) - 2) // 2))
    except StateNetError as e:
        logger.warning(f"MPE curve skipped: {e}")
    try:
        record["fnn_fractions"] = fnn_fractions(ts, tau, max(n + 1, 3))
    except StateNetError as e:
        logger.warning(f"FNN fractions skipped: {e}")

    out = output_dir(cfg)
    paths = [
        export.write_json(out / "embedding.json", record),
        export.write_rows(out / "embedding.csv", [f"x{j}" for j in range(n)], emb.vectors.tolist()),
    ]
    return RunSummary(command="embed", artifacts=_artifacts(paths), result={"tau": tau, "n": n, **details})


def _network(cfg: RunConfig):
    ts = load_signal(cfg)
    tau, n, details = resolve_embedding(cfg, ts)
    b = resolve_bins(cfg)
    net = build_network(symbolize(delay_embed(ts, tau, n), cfg.kind, b))
    params = {"tau": tau, "n": n, "b": b, "kind": cfg.kind, **details}
    return ts, net, params


@command("network")
def network(cfg: RunConfig) -> RunSummary:
    """Transition network as an edge list and adjacency JSON"""
    ts, net, params = _network(cfg)
    out = output_dir(cfg)
    edges = out / "edges.csv"
    write_edge_list(net, edges)
    paths = [edges, export.write_json(out / "network.json", {**adjacency_record(net), "embedding": params})]
    if cfg.plot:
        from statenet.services.plotting import plot_network
        paths.append(plot_network(net, out / "network.svg", ts.label))
    return RunSummary(command="network", artifacts=_artifacts(paths),
                      result={"nodes": net.node_count, "edges": net.edge_count, **params})


def _persist(cfg: RunConfig):
    ts, net, params = _network(cfg)
    d = compute_distance(net, DistanceKind.parse(cfg.distance), resolve_diffusion_t(cfg), cfg.jobs)
    dgm = compute_diagrams(d)
    dgm.provenance.update({"label": ts.label, **params})
    return ts, net, d, dgm, params


@command("persist")
def persist(cfg: RunConfig) -> RunSummary:
    """Persistence diagrams of a signal's network"""
    ts, net, d, dgm, params = _persist(cfg)
    summary = summarize(dgm, cfg.normalization)
    out = output_dir(cfg)
    paths = [
        export.write_json(out / "diagram.json", dgm),
        export.write_diagram_csv(out / "diagram.csv", dgm),
        export.write_matrix_csv(out / "distance.csv", d, net.states.tolist()),
        export.write_json(out / "distance.json", {**d.provenance(), "states": net.states.tolist()}),
        export.write_json(out / "summary.json", summary),
    ]
    if cfg.plot:
        from statenet.services.plotting import plot_diagram
        paths.append(plot_diagram(dgm, out / "diagram.svg", ts.label))
    return RunSummary(command="persist", artifacts=_artifacts(paths),
                      result={**summary.model_dump(), "dim0_pairs": len(dgm.dim0), "nodes": net.node_count})


@command("entropy")
def entropy(cfg: RunConfig) -> RunSummary:
    """Diagram statistics only"""
    ts, net, d, dgm, params = _persist(cfg)
    summary = summarize(dgm, cfg.normalization)
    path = export.write_json(output_dir(cfg) / "summary.json", {**summary.model_dump(), "embedding": params})
    return RunSummary(command="entropy", artifacts=[str(path)], result=summary.model_dump())


@command("bottleneck")
def bottleneck(cfg: RunConfig) -> RunSummary:
    """Pairwise bottleneck distances between D_1 of saved diagrams"""
    diagrams = [PersistenceDiagram.from_record(export.read_json(p)) for p in cfg.diagrams]
    names = [p.stem if p.stem != "diagram" else p.parent.name for p in cfg.diagrams]
    matrix = bottleneck_matrix([dgm.dim1 for dgm in diagrams], cfg.jobs)
    out = output_dir(cfg)
    paths = [
        export.write_matrix_csv(out / "bottleneck.csv", matrix, names),
        export.write_json(out / "bottleneck.json", {"values": matrix, "names": names,
                                                    "sources": [str(p) for p in cfg.diagrams]}),
    ]
    return RunSummary(command="bottleneck", artifacts=_artifacts(paths),
                      result={"count": len(diagrams), "max": float(matrix.max())})


@command("mds")
def mds(cfg: RunConfig) -> RunSummary:
    """Classical MDS of a saved distance matrix, with SVM accuracy when labels are given"""
    record = export.read_json(cfg.matrix)
    if not isinstance(record, dict) or "values" not in record:
        raise AnalysisError(f"{cfg.matrix}: expected a JSON object with a 'values' matrix")
    matrix = np.array(record["values"], dtype=float)
    names = record.get("names") or [str(i) for i in range(matrix.shape[0])]
    coords = mds_2d(matrix)
    if cfg.labels and len(cfg.labels) != matrix.shape[0]:
        raise AnalysisError(f"--labels has {len(cfg.labels)} entries for {matrix.shape[0]} points")

    result = {"count": matrix.shape[0]}
    out = output_dir(cfg)
    payload = {"points": coords, "names": names}
    paths = []
    if cfg.labels:
        embedding = LabeledEmbedding2D(points=[tuple(p) for p in coords.tolist()], labels=cfg.labels, names=names)
        payload["labels"] = cfg.labels
        if len(set(cfg.labels)) == 2:
            accuracy = accuracy_over_seeds(coords, cfg.labels, [cfg.seed])
            payload["accuracy"] = accuracy.mean
            result["accuracy"] = accuracy.mean
        export.write_points_csv(out / "mds.csv", embedding.points, cfg.labels, names)
        paths.append(out / "mds.csv")
        if cfg.plot:
            from statenet.services.plotting import plot_mds
            paths.append(plot_mds(embedding, out / "mds.svg", cfg.seed))
    paths.insert(0, export.write_json(out / "mds.json", payload))
    return RunSummary(command="mds", artifacts=_artifacts(paths), result=result)
