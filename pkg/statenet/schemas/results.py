"""
StateNet-PH Pydantic Schemas
Result records written by the experiments and printed by the CLI
"""
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from statenet.schemas.system import Regime


# =====================
# Diagram statistics
# =====================

class DiagramSummary(BaseModel):
    """
    Statistics of a 1-dimensional persistence diagram

    Attributes:
        max_lifetime: Largest death - birth (0 when empty)
        entropy: Normalized persistent entropy; None when undefined
        pair_count: Number of finite pairs
        total_persistence: Sum of lifetimes
        normalization: ``total`` (log2 of total persistence) or ``count``
        warnings: Conditions worth flagging, e.g. an empty diagram
    """
    max_lifetime: float = Field(..., ge=0.0)
    entropy: Optional[float] = Field(default=None, description="E'(D_1)")
    pair_count: int = Field(..., ge=0)
    total_persistence: float = Field(..., ge=0.0)
    normalization: Literal["total", "count"] = "total"
    warnings: List[str] = Field(default_factory=list)


# =====================
# Sweeps
# =====================

class SweepResult(BaseModel):
    """
    Statistics recorded over a grid of bin counts or SNR values

    Every series is keyed by a signal label and has one entry per x value;
    ``errors`` holds the failure message of grid points that could not be
    computed (their statistics are None).
    """
    parameter: Literal["bins", "snr_db"]
    x_values: List[float]
    entropy_series: Dict[str, List[Optional[float]]]
    max_lifetime_series: Dict[str, List[Optional[float]]]
    compute_time_series: Dict[str, List[float]]
    errors: Dict[str, List[Optional[str]]] = Field(default_factory=dict)
    provenance: Dict = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_shapes(self) -> "SweepResult":
        """Equal lengths and a strictly monotone grid"""
        n = len(self.x_values)
        for series in (self.entropy_series, self.max_lifetime_series, self.compute_time_series, self.errors):
            for key, values in series.items():
                if len(values) != n:
                    raise ValueError(f"series {key!r} has {len(values)} entries, expected {n}")
        steps = [b - a for a, b in zip(self.x_values, self.x_values[1:])]
        if steps and not (all(s > 0 for s in steps) or all(s < 0 for s in steps)):
            raise ValueError("x_values must be strictly monotone")
        return self


class NoiseSweepResult(SweepResult):
    """
    Noise sweep over periodic and chaotic signals

    ``entropy_series`` holds per-SNR means over the seeds and
    ``entropy_std`` the matching standard deviations.
    """
    parameter: Literal["snr_db"] = "snr_db"
    entropy_std: Dict[str, List[Optional[float]]] = Field(default_factory=dict)
    seeds: List[int] = Field(default_factory=list)
    breakdown_snr_db: Optional[float] = None


# =====================
# Battery
# =====================

class LabeledEmbedding2D(BaseModel):
    """MDS projection of a set of diagrams"""
    points: List[Tuple[float, float]]
    labels: List[Regime]
    names: List[str] = Field(default_factory=list)
    provenance: Dict = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_lengths(self) -> "LabeledEmbedding2D":
        """One label per point"""
        if len(self.points) != len(self.labels):
            raise ValueError("points and labels differ in length")
        if self.names and len(self.names) != len(self.points):
            raise ValueError("points and names differ in length")
        return self


class AccuracySummary(BaseModel):
    """Separation accuracy over repeated seeds"""
    mean: float = Field(..., ge=0.0, le=1.0)
    std: float = Field(..., ge=0.0)
    seeds: List[int]
    values: List[float]


class BatteryResult(BaseModel):
    """
    Output of the multi-system battery

    Attributes:
        bottleneck: Pairwise bottleneck distances between D_1 diagrams
        embedding: 2-D MDS projection with labels
        accuracy: SVM separation accuracy over seeds
        skipped: Series that failed, with the reason
    """
    network_kind: Literal["ordinal", "coarse"]
    distance_kind: str
    bottleneck: List[List[float]]
    embedding: LabeledEmbedding2D
    accuracy: Optional[AccuracySummary] = None
    skipped: Dict[str, str] = Field(default_factory=dict)


# =====================
# CLI summaries
# =====================

class RunSummary(BaseModel):
    """One-line JSON printed to stdout on success"""
    status: Literal["ok", "failed"] = "ok"
    command: str
    artifacts: List[str] = Field(default_factory=list)
    result: Dict = Field(default_factory=dict)


class ErrorSummary(BaseModel):
    """One-line JSON printed to stdout on a compute error"""
    status: Literal["error"] = "error"
    command: Optional[str] = None
    error: str = Field(..., description="Exception class name")
    message: str
    details: Optional[dict] = None


__all__ = [
    "DiagramSummary",
    "SweepResult",
    "NoiseSweepResult",
    "LabeledEmbedding2D",
    "AccuracySummary",
    "BatteryResult",
    "RunSummary",
    "ErrorSummary",
]
