"""JSON run configuration: model parameters, grid, method and tolerances."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .operators import PRESETS, ModelParams
from .scan import ENTROPY_X13, Axis, ScanGrid, ScanOptions


def default_step(n_atoms: int) -> float:
    return 0.05 if n_atoms <= 2 else 0.1


class RunConfig(BaseModel):
    """Everything a CLI run needs; unknown keys are rejected.

    ``x13`` and ``x23`` are ``"lo:hi:step"`` strings (or a single value);
    when omitted they default to [0, 3] with the step for ``n_atoms``.
    ``omega``/``Omega`` override the preset frequencies.
    """

    model_config = ConfigDict(extra="forbid")

    preset: Literal["fig2", "text-s2"] = "fig2"
    omega: Optional[tuple[float, float, float]] = None
    Omega: Optional[tuple[float, float]] = None
    config: Literal["Lambda", "Xi", "V"] = "Lambda"
    n_atoms: int = Field(2, ge=1)
    x13: Optional[str] = None
    x23: Optional[str] = None
    x13_values: list[float] = Field(default_factory=lambda: list(ENTROPY_X13))
    method: Literal["exact", "sas", "meanfield"] = "sas"
    methods: Optional[list[Literal["exact", "sas", "meanfield"]]] = None
    sector: Literal["ee", "eo", "oe", "oo", "auto"] = "ee"
    dx: float = Field(1e-3, gt=0)
    tol: float = Field(1e-8, gt=0)
    threads: int = Field(1, ge=1)
    svg: bool = False
    out: str = "."

    @field_validator("x13", "x23")
    @classmethod
    def _axis(cls, v):
        if v is not None:
            Axis.parse(v)
        return v

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))

    def params(self) -> ModelParams:
        base = PRESETS[self.preset]
        return ModelParams(
            omega=self.omega or base["omega"],
            Omega=self.Omega or base["Omega"],
            config=self.config,
            n_atoms=self.n_atoms,
        )

    def axis(self, which: str) -> Axis:
        text = getattr(self, which)
        if text is None:
            return Axis(0.0, 3.0, default_step(self.n_atoms))
        return Axis.parse(text)

    def grid(self, method: str | None = None) -> ScanGrid:
        return ScanGrid(self.axis("x13"), self.axis("x23"), self.n_atoms, method or self.method, self.sector)

    def options(self, **kw) -> ScanOptions:
        return ScanOptions(dx=self.dx, tol=self.tol, **kw)
