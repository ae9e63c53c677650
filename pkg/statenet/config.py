"""
StateNet-PH Configuration Module
Load configuration from config.yaml, .env and environment variables
"""
import os
from pathlib import Path
from typing import Literal, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field


# =====================
# Configuration Models
# =====================

class SimulationConfig(BaseModel):
    """Simulation defaults"""
    presets_file: Optional[str] = None


class EmbeddingConfig(BaseModel):
    """Delay and dimension selection"""
    mpe_dimension: int = 3
    mpe_tau_max: int = 100
    mpe_peak_fraction: float = 0.95
    mpe_min_range: float = 0.05
    fnn_rtol: float = 15.0
    fnn_atol: float = 2.0
    fnn_threshold: float = 0.01
    fnn_max_dim: int = 10


class NetworksConfig(BaseModel):
    """Transition network defaults"""
    ordinal_dim: int = 7
    coarse_dim: int = 4
    bins: int = 12


class DistancesConfig(BaseModel):
    """Graph (dis)similarity defaults"""
    diffusion_t: Optional[int] = None  # None: ceil(log2(N)) + 1


class HomologyConfig(BaseModel):
    """Persistence engine"""
    engine: Literal["ripser", "native"] = "ripser"


class AnalysisConfig(BaseModel):
    """Experiment defaults"""
    svm_c: float = 1.0
    svm_tol: float = 1e-3
    svm_max_passes: int = 200
    accuracy_seeds: int = 100
    noise_seeds: int = 5
    snr_min_db: float = 10.0
    snr_max_db: float = 50.0
    snr_step_db: float = 2.0
    bin_min: int = 2
    bin_max: int = 20
    entropy_drop_threshold: float = 0.1


class OutputConfig(BaseModel):
    """Artifact output"""
    directory: str = "output"
    jobs: int = 1


class LoggingConfig(BaseModel):
    """Logging Configuration"""
    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class Settings(BaseModel):
    """Main Settings Class"""
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    embedding: EmbeddingConfig = Field(default_factory=EmbeddingConfig)
    networks: NetworksConfig = Field(default_factory=NetworksConfig)
    distances: DistancesConfig = Field(default_factory=DistancesConfig)
    homology: HomologyConfig = Field(default_factory=HomologyConfig)
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


# =====================
# Configuration Loader
# =====================

_config: Optional[Settings] = None


def load_config(config_path: Optional[str] = None) -> Settings:
    """
    Load configuration from YAML file

    Args:
        config_path: Path to config.yaml file. If None, looks for config.yaml
                    in the project root directory.

    Returns:
        Settings object with loaded configuration
    """
    global _config

    if _config is not None:
        return _config

    if config_path is None:
        project_root = Path(__file__).parent.parent
        config_path = project_root / "config.yaml"
    else:
        config_path = Path(config_path)

    if config_path.exists():
        with open(config_path, "r", encoding="utf-8") as f:
            config_data = yaml.safe_load(f) or {}
        _config = Settings(**config_data)
    else:
        _config = Settings()

    load_dotenv()
    _config = _apply_env_overrides(_config)

    return _config


def _apply_env_overrides(settings: Settings) -> Settings:
    """Apply environment variable overrides to settings"""

    if os.getenv("STATENET_OUTPUT_DIR"):
        settings.output.directory = os.getenv("STATENET_OUTPUT_DIR")
    if os.getenv("STATENET_JOBS"):
        settings.output.jobs = int(os.getenv("STATENET_JOBS"))
    if os.getenv("STATENET_LOG_LEVEL"):
        settings.logging.level = os.getenv("STATENET_LOG_LEVEL")
    if os.getenv("STATENET_HOMOLOGY_ENGINE"):
        settings.homology.engine = os.getenv("STATENET_HOMOLOGY_ENGINE")
    if os.getenv("STATENET_DIFFUSION_T"):
        settings.distances.diffusion_t = int(os.getenv("STATENET_DIFFUSION_T"))

    return settings


def get_settings() -> Settings:
    """Get current settings, loading if necessary"""
    global _config
    if _config is None:
        return load_config()
    return _config


def reset_config():
    """Reset configuration (useful for testing)"""
    global _config
    _config = None
