"""
StateNet-PH Reproductions
Named experiments checked against their expected outcome
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List

import numpy as np

from statenet.commands import command
from statenet.commands.common import output_dir
from statenet.commands.experiments import default_snr_grid
from statenet.config import get_settings
from statenet.errors import StateNetError
from statenet.schemas.results import RunSummary
from statenet.schemas.run_config import RunConfig
from statenet.services import export
from statenet.services.analysis import battery, bin_sweep, builtin_battery, find_entropy_drop, noise_sweep, signal_diagram
from statenet.services.diagstats import summarize
from statenet.services.graphdist import DistanceKind
from statenet.services.homology import compute_diagrams
from statenet.services.signals import TimeSeries, simulate_preset

logger = logging.getLogger(__name__)

FIG4_PATH = Path(__file__).parent.parent / "data" / "fig4_toy.json"

ROSSLER_TAU = 43

# (network, regime) -> (low, high) bounds on E'(D_1)
ROSSLER_ENTROPY_BOUNDS = {
    ("coarse", "periodic"): (0.0, 0.10),
    ("coarse", "chaotic"): (0.70, 1.0),
    ("ordinal", "periodic"): (0.30, 0.70),
    ("ordinal", "chaotic"): (0.75, 1.0),
}


class ReproductionError(StateNetError):
    """Unknown reproduction name"""
    pass


@dataclass
class Outcome:
    passed: bool
    result: Dict
    artifacts: List[Path] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)


Reproduction = Callable[[RunConfig, Path], Outcome]
REPRODUCTIONS: Dict[str, Reproduction] = {}


def reproduction(name: str):
    def decorator(func: Reproduction) -> Reproduction:
        REPRODUCTIONS[name] = func
        return func
    return decorator


def list_reproductions() -> List[str]:
    return sorted(REPRODUCTIONS)


def _outcome(result: Dict, artifacts: List[Path], failures: List[str]) -> Outcome:
    for f in failures:
        logger.error(f"Check failed: {f}")
    return Outcome(not failures, result, artifacts, failures)


# =====================
# Reproductions
# =====================

@reproduction("fig4-toy")
def fig4_toy(cfg: RunConfig, out: Path) -> Outcome:
    """Diagrams of the four-node toy graph with both persistence engines"""
    with open(FIG4_PATH, "r", encoding="utf-8") as f:
        fixture = json.load(f)
    matrix = np.array(fixture["distance"], dtype=float)
    expected_deaths = sorted(fixture["expected"]["dim0_deaths"])
    expected_dim1 = [tuple(p) for p in fixture["expected"]["dim1"]]

    failures = []
    result = {}
    for engine in ("native", "ripser"):
        dgm = compute_diagrams(matrix, engine)
        deaths = sorted(float(d) for d in dgm.dim0[:, 1])
        dim1 = [tuple(float(v) for v in p) for p in dgm.dim1]
        result[engine] = {"dim0_deaths": deaths, "dim1": dim1}
        if not np.allclose(deaths, expected_deaths, atol=1e-12):
            failures.append(f"{engine}: dim0 deaths {deaths} != {expected_deaths}")
        if len(dim1) != len(expected_dim1) or not np.allclose(dim1, expected_dim1, atol=1e-12):
            failures.append(f"{engine}: dim1 {dim1} != {expected_dim1}")
    paths = [export.write_json(out / "fig4_toy.json", result)]
    return _outcome(result, paths, failures)


def sine_example() -> TimeSeries:
    """Two periods of sin(pi t) at 50 Hz plus one delay: 226 samples"""
    k = np.arange(226)
    return TimeSeries(np.sin(np.pi * k / 50.0), 50.0, "sine")


@reproduction("sine-method-example")
def sine_method_example(cfg: RunConfig, out: Path) -> Outcome:
    """A sampled sine forms a single loop in the coarse-grained network"""
    dgm = signal_diagram(sine_example(), "coarse", tau=26, n=2, b=10, distance=DistanceKind.UNWEIGHTED)
    dim1 = [tuple(float(v) for v in p) for p in dgm.dim1]
    failures = []
    if len(dim1) != 1:
        failures.append(f"expected one dim1 pair, got {dim1}")
    else:
        birth, death = dim1[0]
        if birth != 1.0:
            failures.append(f"birth {birth} != 1")
        if not 10.0 <= death <= 14.0:
            failures.append(f"death {death} outside 12 +/- 2")
    result = {"dim1": dim1, "dim0_pairs": len(dgm.dim0)}
    paths = [export.write_json(out / "sine_method_example.json", dgm)]
    if cfg.plot:
        from statenet.services.plotting import plot_diagram
        paths.append(plot_diagram(dgm, out / "sine_method_example.svg", "sine"))
    return _outcome(result, paths, failures)


@reproduction("rossler-entropy")
def rossler_entropy(cfg: RunConfig, out: Path) -> Outcome:
    """E'(D_1) of periodic and chaotic Rossler with both network kinds"""
    networks = get_settings().networks
    failures = []
    result = {}
    for regime in ("periodic", "chaotic"):
        ts = simulate_preset(f"rossler-{regime}")
        for kind, n, b in (("coarse", networks.coarse_dim, networks.bins), ("ordinal", networks.ordinal_dim, None)):
            dgm = signal_diagram(ts, kind, ROSSLER_TAU, n, b, DistanceKind.UNWEIGHTED, jobs=cfg.jobs)
            summary = summarize(dgm, cfg.normalization)
            lo, hi = ROSSLER_ENTROPY_BOUNDS[(kind, regime)]
            result[f"{kind}-{regime}"] = summary.model_dump()
            e = summary.entropy
            if e is None or not lo <= e <= hi:
                failures.append(f"{kind} {regime}: E'={e} outside [{lo}, {hi}]")
    paths = [export.write_json(out / "rossler_entropy.json", result)]
    return _outcome(result, paths, failures)


@reproduction("appendixA-binsweep")
def appendix_binsweep(cfg: RunConfig, out: Path) -> Outcome:
    """Entropy drop of periodic Rossler as the bin count grows"""
    analysis = get_settings().analysis
    ts = simulate_preset("rossler-periodic")
    sweep = bin_sweep(ts, ROSSLER_TAU, get_settings().networks.coarse_dim,
                      range(analysis.bin_min, analysis.bin_max + 1), DistanceKind.UNWEIGHTED,
                      normalization=cfg.normalization, jobs=cfg.jobs)
    drop = find_entropy_drop(sweep, threshold=analysis.entropy_drop_threshold)
    failures = []
    if drop is None or not 10 <= drop <= 13:
        failures.append(f"entropy drop at b={drop}, expected within [10, 13]")
    else:
        lifetimes = dict(zip(sweep.x_values, next(iter(sweep.max_lifetime_series.values()))))
        before, at = lifetimes.get(float(drop - 1)), lifetimes.get(float(drop))
        if before is not None and at is not None and not at > before:
            failures.append(f"max lifetime does not jump at b={drop}: {before} -> {at}")
    paths = export.write_sweep(out, sweep, "appendixA_binsweep")
    if cfg.plot:
        from statenet.services.plotting import plot_sweep
        paths.append(plot_sweep(sweep, out / "appendixA_binsweep.svg", "rossler-periodic"))
    return _outcome({"entropy_drop_bins": drop}, paths, failures)


@reproduction("noise-robustness")
def noise_robustness(cfg: RunConfig, out: Path) -> Outcome:
    """Breakdown SNR of coarse-grained versus ordinal networks on Rossler"""
    networks = get_settings().networks
    periodic = simulate_preset("rossler-periodic")
    chaotic = simulate_preset("rossler-chaotic")
    snr = default_snr_grid()
    seeds = list(range(1, get_settings().analysis.noise_seeds + 1))

    breakdown = {}
    paths = []
    for kind, n, b in (("coarse", networks.coarse_dim, networks.bins), ("ordinal", networks.ordinal_dim, None)):
        sweep = noise_sweep(periodic, chaotic, snr, kind, ROSSLER_TAU, n, b, DistanceKind.UNWEIGHTED,
                            seeds, normalization=cfg.normalization, jobs=cfg.jobs)
        breakdown[kind] = sweep.breakdown_snr_db
        paths += export.write_sweep(out, sweep, f"noise_{kind}")
        if cfg.plot:
            from statenet.services.plotting import plot_sweep
            paths.append(plot_sweep(sweep, out / f"noise_{kind}.svg", f"rossler {kind}"))

    failures = []
    coarse, ordinal = breakdown["coarse"], breakdown["ordinal"]
    if coarse is None or coarse > 27.0:
        failures.append(f"coarse breakdown {coarse} dB, expected <= 27")
    if ordinal is None or ordinal < 28.0:
        failures.append(f"ordinal breakdown {ordinal} dB, expected >= 28")
    if coarse is not None and ordinal is not None and not coarse < ordinal:
        failures.append(f"coarse ({coarse} dB) is not more robust than ordinal ({ordinal} dB)")
    return _outcome({"breakdown_snr_db": breakdown}, paths, failures)


@reproduction("table-accuracy")
def table_accuracy(cfg: RunConfig, out: Path) -> Outcome:
    """Separation accuracy for every (network, distance) combination"""
    entries = builtin_battery()
    seeds = list(range(1, get_settings().analysis.accuracy_seeds + 1))
    table = {}
    for kind in ("ordinal", "coarse"):
        for distance in DistanceKind:
            r = battery(entries, kind, distance, seeds=seeds, jobs=cfg.jobs)
            table[f"{kind}/{distance.value}"] = {"mean": r.accuracy.mean, "std": r.accuracy.std,
                                                 "skipped": sorted(r.skipped)}

    failures = []
    for distance in DistanceKind:
        c, o = table[f"coarse/{distance.value}"], table[f"ordinal/{distance.value}"]
        if c["mean"] < o["mean"]:
            failures.append(f"{distance.value}: coarse {c['mean']:.3f} < ordinal {o['mean']:.3f}")
    for distance in (DistanceKind.SHORTEST_WEIGHTED, DistanceKind.DIFFUSION):
        c = table[f"coarse/{distance.value}"]
        if c["mean"] != 1.0 or c["std"] != 0.0:
            failures.append(f"coarse/{distance.value}: {c['mean']:.3f} +/- {c['std']:.3f}, expected 1.0 +/- 0")
    paths = [export.write_json(out / "table_accuracy.json", table)]
    return _outcome(table, paths, failures)


# =====================
# Command
# =====================

@command("repro")
def repro(cfg: RunConfig) -> RunSummary:
    """Run one named reproduction; failed checks give status ``failed``"""
    func = REPRODUCTIONS.get(cfg.name)
    if func is None:
        raise ReproductionError(f"unknown reproduction {cfg.name!r}; available: {list_reproductions()}")
    outcome = func(cfg, output_dir(cfg, "repro"))
    result = {"name": cfg.name, **outcome.result}
    if outcome.failures:
        result["failures"] = outcome.failures
    return RunSummary(
        status="ok" if outcome.passed else "failed",
        command="repro",
        artifacts=[str(p) for p in outcome.artifacts],
        result=result,
    )
