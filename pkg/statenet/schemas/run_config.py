"""
StateNet-PH Pydantic Schemas
Validated command-line configuration
"""
import math
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from statenet.schemas.system import Regime

Command = Literal[
    "simulate", "embed", "network", "persist", "entropy",
    "bottleneck", "mds", "battery", "bin-sweep", "noise-sweep", "repro",
]

# commands that read one signal from --system or --csv
SIGNAL_COMMANDS = {"simulate", "embed", "network", "persist", "entropy", "bin-sweep"}
NETWORK_COMMANDS = {"network", "persist", "entropy", "battery", "noise-sweep"}


class DatasetItem(BaseModel):
    """One user signal added to the battery"""
    csv: Path
    fs: float = Field(..., gt=0)
    regime: Regime
    column: int = Field(default=0, ge=0)
    skip_header: bool = False
    tau: Optional[int] = Field(default=None, ge=1)
    dimension: Optional[int] = Field(default=None, ge=2)
    name: Optional[str] = None


class DatasetManifest(BaseModel):
    items: List[DatasetItem] = Field(default_factory=list)


class RunConfig(BaseModel):
    """
    Every flag of a CLI invocation, checked before any computation

    Attributes:
        command: Subcommand name
        system: Preset name (noise-sweep: preset family such as ``rossler``)
        csv / fs / column / skip_header: CSV input
        tau / dim / auto_tau / auto_dim: Embedding parameters
        kind / bins: Network construction
        distance / diffusion_t: Graph distance
        out / seed / plot / jobs: Output and execution
    """
    command: Command
    system: Optional[str] = None
    csv: Optional[Path] = None
    fs: Optional[float] = Field(default=None, gt=0)
    column: int = Field(default=0, ge=0)
    skip_header: bool = False
    snr: Optional[float] = None

    tau: Optional[int] = Field(default=None, ge=1)
    dim: Optional[int] = Field(default=None, ge=2)
    auto_tau: bool = False
    auto_dim: bool = False

    kind: Optional[Literal["ordinal", "coarse"]] = None
    bins: Optional[int] = Field(default=None, ge=2)
    distance: Literal["unweighted", "weighted_shortest", "shortest_weighted", "diffusion"] = "unweighted"
    diffusion_t: Optional[int] = Field(default=None, ge=1)
    normalization: Literal["total", "count"] = "total"

    diagrams: List[Path] = Field(default_factory=list)
    matrix: Optional[Path] = None
    labels: List[Regime] = Field(default_factory=list)
    dataset: Optional[Path] = None
    builtin: bool = True
    bin_min: Optional[int] = Field(default=None, ge=2, le=20)
    bin_max: Optional[int] = Field(default=None, ge=2, le=20)
    snr_values: List[float] = Field(default_factory=list)
    seeds: Optional[int] = Field(default=None, ge=1)
    name: Optional[str] = None

    out: Path = Path("output")
    seed: int = 1
    plot: bool = False
    jobs: int = Field(default=1, ge=1)

    @field_validator("distance", mode="before")
    @classmethod
    def normalize_distance(cls, v):
        """Accept hyphenated spellings"""
        return v.replace("-", "_") if isinstance(v, str) else v

    @field_validator("snr")
    @classmethod
    def validate_snr(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and math.isnan(v):
            raise ValueError("--snr must be a number or inf")
        return v

    @model_validator(mode="after")
    def check_consistency(self) -> "RunConfig":
        """Reject flag combinations that cannot be honoured"""
        if self.command in SIGNAL_COMMANDS:
            if (self.system is None) == (self.csv is None):
                raise ValueError(f"{self.command} needs exactly one of --system or --csv")
            if self.csv is not None and self.fs is None:
                raise ValueError("--csv needs --fs")
            if self.command == "simulate" and self.system is None:
                raise ValueError("simulate needs --system")
        elif self.csv is not None:
            raise ValueError(f"--csv is not used by {self.command}")

        if self.bins is not None and self.kind != "coarse":
            raise ValueError("--bins is only valid with --kind coarse")
        if self.command in NETWORK_COMMANDS and self.kind is None:
            raise ValueError(f"{self.command} needs --kind")
        if self.tau is not None and self.auto_tau:
            raise ValueError("--tau and --auto-tau are mutually exclusive")
        if self.dim is not None and self.auto_dim:
            raise ValueError("--dim and --auto-dim are mutually exclusive")
        if self.diffusion_t is not None and self.distance != "diffusion":
            raise ValueError("--diffusion-t is only valid with --distance diffusion")

        if self.command == "bottleneck" and len(self.diagrams) < 2:
            raise ValueError("bottleneck needs at least two --diagrams files")
        if self.command == "mds" and self.matrix is None:
            raise ValueError("mds needs --matrix")
        if self.command == "noise-sweep" and self.system is None:
            raise ValueError("noise-sweep needs --system naming a preset family, e.g. rossler")
        if self.command == "repro" and not self.name:
            raise ValueError("repro needs a reproduction name")
        if self.command == "battery" and not self.builtin and self.dataset is None:
            raise ValueError("battery without built-in systems needs --dataset")
        if self.bin_min is not None and self.bin_max is not None and self.bin_min > self.bin_max:
            raise ValueError("--bin-min must not exceed --bin-max")
        return self


__all__ = [
    "Command",
    "DatasetItem",
    "DatasetManifest",
    "RunConfig",
]
