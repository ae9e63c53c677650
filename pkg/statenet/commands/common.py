"""
StateNet-PH Command Helpers
Input loading and parameter resolution shared by the subcommands
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from statenet.config import get_settings
from statenet.schemas.run_config import DatasetManifest, RunConfig
from statenet.services.analysis import BatteryEntry
from statenet.services.embedding import delay_selection, select_dim_fnn
from statenet.services.export import read_json
from statenet.services.signals import (
    TimeSeries,
    UnknownSystemError,
    add_noise_snr,
    ingest_csv,
    load_presets,
    preset,
    simulate_preset,
)

logger = logging.getLogger(__name__)


def load_signal(cfg: RunConfig) -> TimeSeries:
    """Signal from --system or --csv, with optional --snr noise"""
    if cfg.system is not None:
        ts = simulate_preset(cfg.system)
    else:
        ts = ingest_csv(cfg.csv, cfg.fs, cfg.column, cfg.skip_header)
    if cfg.snr is not None:
        ts = add_noise_snr(ts, cfg.snr, cfg.seed)
    return ts


def resolve_embedding(cfg: RunConfig, ts: TimeSeries) -> Tuple[int, int, Dict]:
    """
    Delay and dimension for a run

    Delay: --tau, else MPE when --auto-tau or no preset delay exists, else
    the preset delay. Dimension: --dim, else FNN when --auto-dim or no
    network kind is given, else the configured default for the kind.
    """
    details: Dict = {}
    tau = cfg.tau
    if tau is None:
        preset_tau = preset(cfg.system).tau if cfg.system is not None and not cfg.auto_tau else None
        if preset_tau is not None:
            tau = preset_tau
            details["tau_source"] = "preset"
        else:
            selection = delay_selection(ts)
            tau = selection.tau
            details["tau_source"] = "mpe"
            details["mpe_peak_found"] = selection.peak_found
    else:
        details["tau_source"] = "flag"

    n = cfg.dim
    if n is None:
        networks = get_settings().networks
        if cfg.auto_dim or cfg.kind is None:
            n = select_dim_fnn(ts, tau)
            details["dim_source"] = "fnn"
        else:
            n = networks.ordinal_dim if cfg.kind == "ordinal" else networks.coarse_dim
            details["dim_source"] = "default"
    else:
        details["dim_source"] = "flag"
    return tau, n, details


def resolve_bins(cfg: RunConfig) -> Optional[int]:
    if cfg.kind != "coarse":
        return None
    return cfg.bins if cfg.bins is not None else get_settings().networks.bins


def resolve_diffusion_t(cfg: RunConfig) -> Optional[int]:
    return cfg.diffusion_t if cfg.diffusion_t is not None else get_settings().distances.diffusion_t


def regime_pair(family: str) -> Tuple[str, str]:
    """Preset names of the periodic and chaotic members of a family"""
    presets = load_presets()
    names = (f"{family}-periodic", f"{family}-chaotic")
    for name in names:
        if name not in presets:
            raise UnknownSystemError(f"preset family {family!r} has no {name!r}")
    return names


def load_dataset(path: Path) -> List[BatteryEntry]:
    """Battery entries from a JSON manifest of labelled CSV files"""
    manifest = DatasetManifest(**read_json(path))
    base = Path(path).parent
    entries = []
    for item in manifest.items:
        csv_path = item.csv if item.csv.is_absolute() else base / item.csv
        ts = ingest_csv(csv_path, item.fs, item.column, item.skip_header)
        if item.name:
            ts = ts.with_samples(ts.samples, label=item.name)
        entries.append(BatteryEntry(ts, item.regime, item.tau, item.dimension))
    logger.info(f"Loaded {len(entries)} series from {path}")
    return entries


def output_dir(cfg: RunConfig, *parts: str) -> Path:
    path = Path(cfg.out).joinpath(*parts)
    path.mkdir(parents=True, exist_ok=True)
    return path
