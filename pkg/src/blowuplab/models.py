from enum import Enum
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from blowuplab.constants import ProblemParams
from blowuplab.domain import ModelDomain
from blowuplab.exceptions import ValidationFailure
from blowuplab.numerics import QuadratureSpec, geometric_grid
from blowuplab.reduction import (
    Beta0Convention,
    CriticalPointModel,
    ReducedEnergyParams,
)
from blowuplab.utils import relative_error


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class RunConfig(BaseModel):
    """Inputs of a verification run, read from a YAML or JSON file.

    Command-line flags override file entries, which override the defaults.
    """

    model_config = ConfigDict(extra="forbid")

    n: int = Field(default=6, ge=3)
    D: float = Field(default=1.5, gt=1)
    curvatures: list[float] | None = Field(
        default=None, description="Principal curvatures; all ones when omitted"
    )
    rho: float = Field(default=1.0, gt=0)
    deltas: list[float] = Field(default_factory=lambda: geometric_grid(1e-3, 1e-2, 8))
    mu: float = Field(default=1.0, gt=0)
    H0: float = 2.0
    hess: list[list[float]] | None = Field(
        default=None, description="Hessian of H at p; -I when omitted"
    )
    p: list[float] | None = None
    convention: Beta0Convention = Beta0Convention.SHIFTED
    quadrature: QuadratureSpec = QuadratureSpec()
    output_path: Path | None = None
    format: OutputFormat = OutputFormat.JSON

    @field_validator("deltas")
    @classmethod
    def validate_deltas(cls, deltas: list[float]) -> list[float]:
        if not deltas:
            raise ValueError("deltas must not be empty")
        if any(d <= 0 for d in deltas):
            raise ValueError("deltas must be positive")
        return deltas

    @model_validator(mode="after")
    def validate_dimensions(self) -> "RunConfig":
        if self.curvatures is not None and len(self.curvatures) != self.n - 1:
            raise ValueError(
                f"Expected {self.n - 1} curvatures for n = {self.n}, "
                f"got {len(self.curvatures)}"
            )
        # Builds the derived models so that their invariants are checked now.
        self.domain()
        if self.hess is not None or self.p is not None:
            self.critical_point_model()
        return self

    @classmethod
    def load(cls, config_file: Path | None = None, **overrides: Any) -> "RunConfig":
        data: dict[str, Any] = {}
        if config_file is not None:
            loaded = yaml.safe_load(config_file.read_text())
            if loaded is not None and not isinstance(loaded, dict):
                raise ValidationFailure(f"{config_file} must hold a mapping of settings")
            data.update(loaded or {})
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.model_validate(data)

    def problem(self) -> ProblemParams:
        return ProblemParams(n=self.n, D=self.D)

    def domain(self) -> ModelDomain:
        curvatures = self.curvatures or [1.0] * (self.n - 1)
        return ModelDomain(curvatures=tuple(curvatures), rho=self.rho)

    def critical_point_model(self) -> CriticalPointModel:
        if self.hess is None:
            model = CriticalPointModel.isotropic(self.n, self.H0)
        else:
            model = CriticalPointModel(
                H0=self.H0, hess=tuple(tuple(row) for row in self.hess)
            )
        if self.p is not None:
            model = CriticalPointModel(H0=model.H0, hess=model.hess, p=tuple(self.p))
        return model

    def reduced_energy_params(self) -> ReducedEnergyParams:
        return ReducedEnergyParams(mu=self.mu)


class Reference(BaseModel):
    value: float
    provenance: str
    tolerance: float = Field(ge=0)


class Report(BaseModel):
    """Structured result of a verification run.

    ``pass`` holds when every named error is within the tolerance of its
    reference. ``wall_time`` is left out of files so reruns are bit-identical.
    """

    model_config = ConfigDict(populate_by_name=True)

    command: str
    inputs: dict[str, Any]
    results: dict[str, Any]
    references: dict[str, Reference] = {}
    errors: dict[str, float] = {}
    passed: bool = Field(alias="pass")
    wall_time: float | None = None

    @classmethod
    def build(
        cls,
        command: str,
        inputs: dict[str, Any],
        results: dict[str, Any],
        checks: dict[str, tuple[float, Reference]] | None = None,
        scales: dict[str, float] | None = None,
    ) -> "Report":
        """Compare each checked value with its reference.

        ``scales`` replaces ``|reference|`` in the relative error where the
        reference is zero or not the natural magnitude.
        """
        checks = checks or {}
        scales = scales or {}
        errors = {}
        for name, (value, reference) in checks.items():
            if name in scales:
                errors[name] = abs(value - reference.value) / scales[name]
            else:
                errors[name] = relative_error(value, reference.value)
        references = {name: reference for name, (_, reference) in checks.items()}
        return cls(
            command=command,
            inputs=inputs,
            results=results,
            references=references,
            errors=errors,
            passed=all(errors[name] <= references[name].tolerance for name in errors),
        )

    def to_json(self, include_wall_time: bool = True) -> str:
        exclude = None if include_wall_time else {"wall_time"}
        return self.model_dump_json(by_alias=True, exclude=exclude, indent=2)
