"""
StateNet-PH Signals Module
Built-in dynamical systems, fixed-step RK4 simulation, CSV ingestion and
SNR-calibrated Gaussian noise
"""
import csv
import json
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from statenet.config import get_settings
from statenet.errors import StateNetError
from statenet.schemas.system import PresetCatalog, SystemPreset, SystemSpec

logger = logging.getLogger(__name__)

PRESETS_PATH = Path(__file__).parent.parent / "data" / "system_presets.json"


class SignalError(StateNetError):
    """Invalid signal or simulation request"""
    pass


class UnknownSystemError(SignalError):
    """System name not present in the registry"""
    pass


class DivergenceError(SignalError):
    """Integration produced a non-finite state"""

    def __init__(self, system: str, time_s: float):
        self.system = system
        self.time_s = time_s
        super().__init__(f"{system} diverged at t={time_s:.6g} s (non-finite state)")

    @property
    def details(self) -> dict:
        return {"system": self.system, "time_s": self.time_s}


class CsvFormatError(SignalError):
    """CSV input could not be parsed"""

    def __init__(self, row: int, message: str):
        self.row = row
        super().__init__(f"row {row}: {message}")

    @property
    def details(self) -> dict:
        return {"row": self.row}


# =====================
# Time series
# =====================

@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled scalar signal"""
    samples: np.ndarray
    sample_rate: float
    label: Optional[str] = None

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 1:
            raise SignalError("samples must be one-dimensional")
        if samples.size < 2:
            raise SignalError(f"a time series needs at least 2 samples, got {samples.size}")
        if not self.sample_rate > 0:
            raise SignalError(f"sample_rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise SignalError("samples must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate

    def with_samples(self, samples: np.ndarray, label: Optional[str] = None) -> "TimeSeries":
        return TimeSeries(samples, self.sample_rate, label if label is not None else self.label)


# =====================
# System registry
# =====================

VectorField = Callable[..., np.ndarray]


@dataclass(frozen=True)
class SystemDefinition:
    name: str
    field: VectorField
    parameters: Tuple[str, ...]
    dimension: int


_SYSTEMS: Dict[str, SystemDefinition] = {}


def register_system(name: str, parameters: Sequence[str], dimension: int):
    """
    Register a vector field ``f(state, t, **parameters) -> dstate/dt``

    Args:
        name: Registry key used by SystemSpec.name
        parameters: Parameter names the field expects
        dimension: Length of the state vector
    """
    def decorator(func: VectorField) -> VectorField:
        _SYSTEMS[name] = SystemDefinition(name, func, tuple(parameters), dimension)
        return func
    return decorator


def get_system(name: str) -> SystemDefinition:
    try:
        return _SYSTEMS[name]
    except KeyError:
        raise UnknownSystemError(f"unknown system {name!r}; registered: {sorted(_SYSTEMS)}") from None


def list_systems() -> List[str]:
    return sorted(_SYSTEMS)


@register_system("rossler", ("a", "b", "c"), 3)
def rossler(state: np.ndarray, t: float, a: float, b: float, c: float) -> np.ndarray:
    x, y, z = state
    return np.array([-y - z, x + a * y, b + z * (x - c)])


@register_system("lorenz", ("sigma", "rho", "beta"), 3)
def lorenz(state: np.ndarray, t: float, sigma: float, rho: float, beta: float) -> np.ndarray:
    x, y, z = state
    return np.array([sigma * (y - x), x * (rho - z) - y, x * y - beta * z])


@register_system("driven_van_der_pol", ("mu", "amplitude", "omega"), 2)
def driven_van_der_pol(state: np.ndarray, t: float, mu: float, amplitude: float, omega: float) -> np.ndarray:
    x, y = state
    return np.array([y, mu * (1.0 - x * x) * y - x + amplitude * math.sin(omega * t)])


# =====================
# Integration
# =====================

def integrate_rk4(
    func: Callable[[np.ndarray, float], np.ndarray],
    state0: Sequence[float],
    h: float,
    steps: int,
    t0: float = 0.0,
    substeps: int = 1,
    name: str = "system"
) -> np.ndarray:
    """
    Classical fourth-order Runge-Kutta with a fixed step

    Args:
        func: Right-hand side ``func(state, t)``
        state0: Initial state
        h: Output step; each output step is split into ``substeps`` RK4 steps
        steps: Number of output steps
        t0: Initial time
        substeps: RK4 steps per output step
        name: Used in divergence messages

    Returns:
        Array of shape (steps + 1, dim) with the state at every output time

    Raises:
        DivergenceError: If a non-finite state is produced
    """
    state = np.array(state0, dtype=float)
    out = np.empty((steps + 1, state.size))
    out[0] = state
    dt = h / substeps
    t = t0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, steps + 1):
            for _ in range(substeps):
                k1 = func(state, t)
                k2 = func(state + 0.5 * dt * k1, t + 0.5 * dt)
                k3 = func(state + 0.5 * dt * k2, t + 0.5 * dt)
                k4 = func(state + dt * k3, t + dt)
                state = state + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                t += dt
            if not np.all(np.isfinite(state)):
                raise DivergenceError(name, t)
            out[k] = state
    return out


def simulate(
    spec: SystemSpec,
    duration_s: float,
    sample_rate: float,
    discard_fraction: float,
    substeps: int = 1
) -> TimeSeries:
    """
    Integrate a registered system and return its x-coordinate

    Args:
        spec: System and parameters
        duration_s: Simulated span; ``round(duration_s * sample_rate)`` samples are produced
        sample_rate: Output rate (Hz); the RK4 step is ``1 / sample_rate``
        discard_fraction: Leading fraction of samples dropped as transient
        substeps: Optional RK4 refinement per output sample

    Returns:
        TimeSeries labelled ``"<name>-<regime>"``
    """
    if not duration_s > 0:
        raise SignalError(f"duration_s must be positive, got {duration_s}")
    if not 0.0 <= discard_fraction < 1.0:
        raise SignalError(f"discard_fraction must be in [0, 1), got {discard_fraction}")
    if not sample_rate > 0:
        raise SignalError(f"sample_rate must be positive, got {sample_rate}")

    definition = get_system(spec.name)
    if set(spec.parameters) != set(definition.parameters):
        raise SignalError(
            f"{spec.name} expects parameters {list(definition.parameters)}, got {sorted(spec.parameters)}"
        )
    if len(spec.initial_state) != definition.dimension:
        raise SignalError(
            f"{spec.name} expects a {definition.dimension}-dimensional initial state"
        )

    total = int(round(duration_s * sample_rate))
    if total < 2:
        raise SignalError("duration too short for the sample rate")

    params = dict(spec.parameters)

    def rhs(state: np.ndarray, t: float) -> np.ndarray:
        return definition.field(state, t, **params)

    logger.debug(f"Simulating {spec.name} {params} for {duration_s} s at {sample_rate} Hz")
    trajectory = integrate_rk4(rhs, spec.initial_state, 1.0 / sample_rate, total - 1,
                               substeps=substeps, name=spec.name)
    start = int(total * discard_fraction)
    x = trajectory[start:, 0]
    if x.size < 2:
        raise SignalError("discard_fraction leaves fewer than two samples")
    return TimeSeries(x, sample_rate, f"{spec.name}-{spec.regime}")


def appendix_duration(tau: int, sample_rate: float) -> float:
    """Simulation span used for the multi-system battery: 750 delays"""
    return 750.0 * tau / sample_rate


# =====================
# Presets
# =====================

@lru_cache(maxsize=4)
def _load_catalog(path: str) -> PresetCatalog:
    with open(path, "r", encoding="utf-8") as f:
        return PresetCatalog(**json.load(f))


def load_presets() -> Dict[str, SystemPreset]:
    """Presets from the configured file or the packaged default"""
    path = get_settings().simulation.presets_file or str(PRESETS_PATH)
    return _load_catalog(path).presets


def list_presets() -> List[str]:
    return sorted(load_presets())


def preset(name: str) -> SystemPreset:
    presets = load_presets()
    if name not in presets:
        raise UnknownSystemError(f"unknown preset {name!r}; available: {sorted(presets)}")
    return presets[name]


def preset_duration(p: SystemPreset) -> float:
    """Explicit preset span, or 750 delays when the preset leaves it out"""
    return p.duration_s if p.duration_s is not None else appendix_duration(p.tau, p.sample_rate)


def simulate_preset(name: str) -> TimeSeries:
    """Simulate a named preset with its own duration, rate and discard policy"""
    p = preset(name)
    ts = simulate(p.system, preset_duration(p), p.sample_rate, p.discard_fraction, substeps=p.substeps)
    return ts.with_samples(ts.samples, label=name)


# =====================
# Ingestion
# =====================

def ingest_csv(
    path: Union[str, Path],
    sample_rate: float,
    column: int = 0,
    skip_header: bool = False
) -> TimeSeries:
    """
    Read one numeric column of a CSV file

    Args:
        path: CSV file
        sample_rate: Sample rate of the recorded signal (Hz)
        column: Zero-based column index
        skip_header: Drop the first row before parsing

    Returns:
        TimeSeries labelled with the file stem

    Raises:
        CsvFormatError: On empty, non-numeric or non-finite cells (1-based row number)
    """
    values: List[float] = []
    with open(path, "r", encoding="utf-8-sig", newline="") as f:
        reader = csv.reader(f)
        for row_number, row in enumerate(reader, start=1):
            if skip_header and row_number == 1:
                continue
            if column >= len(row):
                raise CsvFormatError(row_number, f"missing column {column}")
            cell = row[column].strip()
            if not cell:
                raise CsvFormatError(row_number, "empty cell")
            try:
                value = float(cell)
            except ValueError:
                raise CsvFormatError(row_number, f"not a number: {cell!r}") from None
            if not math.isfinite(value):
                raise CsvFormatError(row_number, f"non-finite value: {cell!r}")
            values.append(value)

    if len(values) < 2:
        raise SignalError(f"{path}: need at least 2 rows in column {column}, got {len(values)}")
    logger.info(f"Ingested {len(values)} samples from {path}")
    return TimeSeries(np.array(values), sample_rate, Path(path).stem)


# =====================
# Noise
# =====================

def rms(ts: Union[TimeSeries, np.ndarray]) -> float:
    """Root-mean-square amplitude"""
    x = ts.samples if isinstance(ts, TimeSeries) else np.asarray(ts, dtype=float)
    return float(np.sqrt(np.mean(np.square(x))))


def add_noise_snr(ts: TimeSeries, snr_db: float, seed: int) -> TimeSeries:
    """
    Add white Gaussian noise at an exact signal-to-noise ratio

    The drawn noise vector is rescaled by its own realized RMS, so
    ``20*log10(rms(ts) / rms(noisy - ts)) == snr_db``.

    Args:
        ts: Clean signal
        snr_db: Target SNR in dB; ``math.inf`` returns the input unchanged
        seed: Seed for the noise generator

    Raises:
        SignalError: For zero-RMS input or a NaN target
    """
    if math.isnan(snr_db):
        raise SignalError("snr_db must not be NaN")
    if snr_db == math.inf:
        return ts
    signal_rms = rms(ts)
    if signal_rms == 0.0:
        raise SignalError("cannot calibrate noise against a zero-RMS signal")

    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(len(ts))
    noise -= noise.mean()
    target_rms = signal_rms / 10.0 ** (snr_db / 20.0)
    noise *= target_rms / rms(noise)
    return ts.with_samples(ts.samples + noise)


def measured_snr_db(clean: TimeSeries, noisy: TimeSeries) -> float:
    """SNR of ``noisy`` relative to ``clean``"""
    return 20.0 * math.log10(rms(clean) / rms(noisy.samples - clean.samples))
