"""Run configuration models (validated with pydantic)"""

from __future__ import annotations

import hashlib
import math
from typing import Any, Dict, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..constants import MM, NM, UM
from .beam import GSMBeam
from .grating import GratingSpec, SlitPhaseModel
from .physics import BeamEnergy, ScanSpec

SECTIONS = (
    "grating1",
    "grating2",
    "beam",
    "grid",
    "scan",
    "detector",
    "ensemble",
    "fit",
    "noise",
    "setup",
)

# keys a preset controls, per section
PRESETS: Dict[str, Dict[str, Dict[str, Any]]] = {
    "paper": {
        "grid": {"window_um": 300.0, "n": 65536},
        "ensemble": {"m": 15},
        "beam": {"width_um": 150.0},
        "scan": {"x_count": 96},
    },
    "test": {
        "grid": {"window_um": 20.0, "n": 8192},
        "ensemble": {"m": 7},
        "beam": {"width_um": 8.0},
        "scan": {"x_count": 80},
    },
}


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GratingBlock(_Block):
    period_nm: float = Field(100.0, gt=0)
    open_nm: float = Field(50.0, gt=0)
    thickness_nm: float = Field(150.0, gt=0)
    beta_rad_nm: float = Field(0.0, ge=0)
    phi_max: float = Field(4.0 * math.pi, gt=0)
    offset_nm: float = 0.0

    @model_validator(mode="after")
    def _open_inside_period(self) -> "GratingBlock":
        if self.open_nm >= self.period_nm:
            raise ValueError(
                f"open_nm ({self.open_nm}) must be smaller than period_nm ({self.period_nm})"
            )
        return self

    def to_spec(self) -> GratingSpec:
        return GratingSpec(
            period=self.period_nm * NM,
            open_width=self.open_nm * NM,
            thickness=self.thickness_nm * NM,
            phase=SlitPhaseModel.from_strength(self.beta_rad_nm * NM, self.phi_max),
            lateral_offset=self.offset_nm * NM,
        )


class BeamBlock(_Block):
    width_um: float = Field(150.0, gt=0)
    coherence_um: float = Field(2.0, gt=0)
    radius_m: float = math.inf
    center_um: float = 0.0

    @field_validator("radius_m", mode="before")
    @classmethod
    def _radius_token(cls, value: Any) -> Any:
        if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        return value

    @field_validator("radius_m")
    @classmethod
    def _radius_nonzero(cls, value: float) -> float:
        if value == 0 or math.isnan(value):
            raise ValueError("radius_m must be non-zero (use inf for a collimated beam)")
        return value

    def to_beam(self) -> GSMBeam:
        return GSMBeam(
            width=self.width_um * UM,
            coherence_width=self.coherence_um * UM,
            radius=self.radius_m,
            center=self.center_um * UM,
        )


class GridBlock(_Block):
    preset: Optional[Literal["paper", "test"]] = None
    window_um: float = Field(300.0, gt=0)
    n: int = Field(65536, ge=1024)

    @field_validator("n")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError(f"n must be a power of two, got {value}")
        return value


class ScanBlock(_Block):
    z_min_mm: float = Field(0.1, gt=0)
    z_max_mm: float = Field(1.7, gt=0)
    z_step_um: float = Field(30.0, gt=0)
    x_step_nm: float = Field(2.5, gt=0)
    x_count: int = Field(96, ge=2)

    @model_validator(mode="after")
    def _ordered(self) -> "ScanBlock":
        if self.z_min_mm >= self.z_max_mm:
            raise ValueError("z_min_mm must be smaller than z_max_mm")
        return self

    def to_scan(self) -> ScanSpec:
        return ScanSpec(
            z_min=self.z_min_mm * MM,
            z_max=self.z_max_mm * MM,
            z_step=self.z_step_um * UM,
            x_step=self.x_step_nm * NM,
            x_count=self.x_count,
        )


class DetectorBlock(_Block):
    z_m: float = Field(1.0, gt=0)
    pixel_um: float = Field(5.0, gt=0)


class EnsembleBlock(_Block):
    m: int = Field(15, ge=1)

    @field_validator("m")
    @classmethod
    def _odd(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError(f"m must be odd, got {value}")
        return value


class FitBlock(_Block):
    r_min_m: float = Field(0.5, gt=0)
    r_max_m: float = Field(20.0, gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> "FitBlock":
        if self.r_min_m >= self.r_max_m:
            raise ValueError("r_min_m must be smaller than r_max_m")
        return self


class NoiseBlock(_Block):
    sigma_rel: float = Field(0.0, ge=0)
    seed: int = 0


class SetupBlock(_Block):
    z_sep_mm: Union[Literal["talbot"], float] = "talbot"
    shift_count: int = Field(9, ge=2)

    @field_validator("z_sep_mm")
    @classmethod
    def _positive(cls, value: Union[str, float]) -> Union[str, float]:
        if not isinstance(value, str) and value <= 0:
            raise ValueError("z_sep_mm must be positive")
        return value

    def z_sep(self, talbot: float) -> float:
        """Separation in metres; the `talbot` token resolves to the given plane."""
        return talbot if self.z_sep_mm == "talbot" else float(self.z_sep_mm) * MM


class RunConfig(BaseModel):
    """Fully resolved configuration of one run."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    energy_kev: float = Field(gt=0)
    grating1: GratingBlock = GratingBlock()
    grating2: GratingBlock = GratingBlock()
    beam: BeamBlock = BeamBlock()
    grid: GridBlock = GridBlock()
    scan: ScanBlock = ScanBlock()
    detector: DetectorBlock = DetectorBlock()
    ensemble: EnsembleBlock = EnsembleBlock()
    fit: FitBlock = FitBlock()
    noise: NoiseBlock = NoiseBlock()
    setup: SetupBlock = SetupBlock()

    @property
    def energy(self) -> BeamEnergy:
        return BeamEnergy(self.energy_kev)

    def to_text(self) -> str:
        """Render in the input syntax; parsing the result gives back this config."""
        lines = [f"energy_kev = {_format_value(self.energy_kev)}"]
        for section in SECTIONS:
            block: BaseModel = getattr(self, section)
            for key, value in block.model_dump().items():
                if value is None:
                    continue
                lines.append(f"{section}.{key} = {_format_value(value)}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.md5(self.to_text().encode("utf-8")).hexdigest()


def _format_value(value: Any) -> str:
    if isinstance(value, bool) or isinstance(value, (int, str)):
        return str(value)
    return repr(float(value))
