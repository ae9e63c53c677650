"""
StateNet-PH Pydantic Schemas
Dynamical system specifications and the presets shipped with the package
"""
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

Regime = Literal["periodic", "chaotic"]


class SystemSpec(BaseModel):
    """
    A registered vector field with concrete parameter values

    Attributes:
        name: Key of the vector field in the system registry
        parameters: Named real parameters of the field
        initial_state: Starting point of the integration
        regime: Dynamic state the parameters are known to produce
    """
    name: str = Field(..., min_length=1, description="Registered vector field", examples=["rossler"])
    parameters: Dict[str, float] = Field(
        default_factory=dict,
        description="Named parameters of the field",
        examples=[{"a": 0.1, "b": 0.2, "c": 14.0}]
    )
    initial_state: List[float] = Field(..., min_length=1, description="Initial state vector")
    regime: Regime = Field(..., description="periodic or chaotic")


class SystemPreset(BaseModel):
    """
    Simulation settings bundled with a SystemSpec

    The embedding fields are the values used by the experiments; None means
    the delay is selected automatically. Without duration_s the span is
    derived from tau (750 delays).
    """
    system: SystemSpec
    sample_rate: float = Field(..., gt=0, description="Output sample rate (Hz)")
    duration_s: Optional[float] = Field(default=None, gt=0, description="Integrated time span (s)")
    discard_fraction: float = Field(default=0.8, ge=0.0, lt=1.0)
    substeps: int = Field(default=1, ge=1, description="RK4 steps per output sample")
    tau: Optional[int] = Field(default=None, ge=1)
    notes: str = ""

    @model_validator(mode="after")
    def check_retained_length(self) -> "SystemPreset":
        """Keep at least two samples after the transient is discarded"""
        if self.duration_s is None:
            if self.tau is None:
                raise ValueError("preset needs duration_s or tau")
            return self
        total = int(round(self.duration_s * self.sample_rate))
        if total - int(total * self.discard_fraction) < 2:
            raise ValueError("preset keeps fewer than two samples")
        return self


class PresetCatalog(BaseModel):
    """The JSON presets file"""
    presets: Dict[str, SystemPreset]

    @field_validator("presets")
    @classmethod
    def validate_names(cls, v: Dict[str, SystemPreset]) -> Dict[str, SystemPreset]:
        """Preset keys are lowercase CLI identifiers"""
        for key in v:
            if key != key.strip().lower() or " " in key:
                raise ValueError(f"invalid preset name: {key!r}")
        return v


__all__ = [
    "Regime",
    "SystemSpec",
    "SystemPreset",
    "PresetCatalog",
]
