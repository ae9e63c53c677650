"""
StateNet-PH Experiment Commands
battery, bin-sweep and noise-sweep
"""
import logging
import math

import numpy as np

from statenet.commands import command
from statenet.commands.common import (
    load_dataset,
    load_signal,
    output_dir,
    regime_pair,
    resolve_bins,
    resolve_diffusion_t,
    resolve_embedding,
)
from statenet.config import get_settings
from statenet.schemas.results import RunSummary
from statenet.schemas.run_config import RunConfig
from statenet.services import export
from statenet.services.analysis import battery as run_battery
from statenet.services.analysis import bin_sweep as run_bin_sweep
from statenet.services.analysis import builtin_battery, find_entropy_drop
from statenet.services.analysis import noise_sweep as run_noise_sweep
from statenet.services.signals import preset, simulate_preset

logger = logging.getLogger(__name__)


def default_snr_grid() -> list:
    """Configured SNR grid, cleanest first, preceded by the noise-free point"""
    cfg = get_settings().analysis
    grid = np.arange(cfg.snr_max_db, cfg.snr_min_db - 1e-9, -cfg.snr_step_db)
    return [math.inf] + [round(float(v), 6) for v in grid]


@command("battery")
def battery(cfg: RunConfig) -> RunSummary:
    """Bottleneck matrix, MDS plane and separation accuracy over labelled signals"""
    entries = builtin_battery() if cfg.builtin else []
    if cfg.dataset is not None:
        entries += load_dataset(cfg.dataset)
    seeds = list(range(1, (cfg.seeds or get_settings().analysis.accuracy_seeds) + 1))
    result = run_battery(
        entries,
        cfg.kind,
        cfg.distance,
        b=resolve_bins(cfg),
        t=resolve_diffusion_t(cfg),
        seeds=seeds,
        jobs=cfg.jobs,
    )

    out = output_dir(cfg)
    names = result.embedding.names
    paths = [
        export.write_json(out / "battery.json", result),
        export.write_matrix_csv(out / "bottleneck.csv", np.array(result.bottleneck), names),
        export.write_points_csv(out / "mds.csv", result.embedding.points, result.embedding.labels, names),
    ]
    if cfg.plot:
        from statenet.services.plotting import plot_mds
        title = f"{cfg.kind} / {result.distance_kind}"
        paths.append(plot_mds(result.embedding, out / "mds.svg", seeds[0], title))
    return RunSummary(
        command="battery",
        artifacts=[str(p) for p in paths],
        result={
            "series": len(names),
            "skipped": sorted(result.skipped),
            "accuracy_mean": result.accuracy.mean,
            "accuracy_std": result.accuracy.std,
        },
    )


@command("bin-sweep")
def bin_sweep(cfg: RunConfig) -> RunSummary:
    """Coarse-grained network statistics over a range of bin counts"""
    ts = load_signal(cfg)
    tau, n, details = resolve_embedding(cfg.model_copy(update={"kind": "coarse"}), ts)
    analysis = get_settings().analysis
    lo = cfg.bin_min or analysis.bin_min
    hi = cfg.bin_max or analysis.bin_max
    sweep = run_bin_sweep(
        ts, tau, n, range(lo, hi + 1), cfg.distance,
        t=resolve_diffusion_t(cfg), normalization=cfg.normalization, jobs=cfg.jobs,
    )
    drop = find_entropy_drop(sweep)

    out = output_dir(cfg)
    paths = export.write_sweep(out, sweep, "binsweep")
    if cfg.plot:
        from statenet.services.plotting import plot_sweep
        paths.append(plot_sweep(sweep, out / "binsweep.svg", ts.label))
    return RunSummary(command="bin-sweep", artifacts=[str(p) for p in paths],
                      result={"tau": tau, "n": n, "entropy_drop_bins": drop, **details})


@command("noise-sweep")
def noise_sweep(cfg: RunConfig) -> RunSummary:
    """Entropy of a periodic/chaotic preset pair under additive noise"""
    periodic_name, chaotic_name = regime_pair(cfg.system)
    periodic = simulate_preset(periodic_name)
    chaotic = simulate_preset(chaotic_name)
    tau = cfg.tau or preset(periodic_name).tau
    if tau is None or cfg.auto_tau:
        tau, _, _ = resolve_embedding(cfg.model_copy(update={"system": periodic_name, "dim": 2}), periodic)
    networks = get_settings().networks
    n = cfg.dim or (networks.ordinal_dim if cfg.kind == "ordinal" else networks.coarse_dim)
    snr = cfg.snr_values or default_snr_grid()
    seeds = list(range(1, (cfg.seeds or get_settings().analysis.noise_seeds) + 1))

    sweep = run_noise_sweep(
        periodic, chaotic, snr, cfg.kind, tau, n,
        b=resolve_bins(cfg),
        distance_kind=cfg.distance,
        seeds=seeds,
        t=resolve_diffusion_t(cfg),
        normalization=cfg.normalization,
        jobs=cfg.jobs,
    )
    out = output_dir(cfg)
    paths = export.write_sweep(out, sweep, "noise")
    if cfg.plot:
        from statenet.services.plotting import plot_sweep
        paths.append(plot_sweep(sweep, out / "noise.svg", f"{cfg.system} {cfg.kind}"))
    return RunSummary(command="noise-sweep", artifacts=[str(p) for p in paths],
                      result={"tau": tau, "n": n, "breakdown_snr_db": sweep.breakdown_snr_db})
