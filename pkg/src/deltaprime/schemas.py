"""Request and response models shared by the HTTP service and the CLI.

Every response model carries a top-level ``schema`` field, currently 1,
so stored reports remain identifiable as the wire format evolves.  The
CLI renders these models to JSON with sorted keys, which makes reruns
byte-identical whether a command executes in process or against a
remote server.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

SCHEMA_VERSION = 1


class ContourSpec(BaseModel):
    """Declarative description of a closed contour.

    circle: R.  ellipse: length and aspect.  perturbed: length, mode
    and eps (a cosine perturbation of the given angular mode).
    """

    model_config = ConfigDict(extra="forbid")

    type: Literal["circle", "ellipse", "perturbed"]
    R: Optional[float] = Field(default=None, gt=0)
    length: Optional[float] = Field(default=None, gt=0)
    aspect: Optional[float] = Field(default=None, ge=1)
    mode: Optional[int] = Field(default=None, ge=2)
    eps: Optional[float] = None

    @model_validator(mode="after")
    def _check_family(self):
        needed = {
            "circle": ("R",),
            "ellipse": ("length", "aspect"),
            "perturbed": ("length", "mode", "eps"),
        }[self.type]
        allowed = set(needed) | {"type"}
        for name in needed:
            if getattr(self, name) is None:
                raise ValueError("%s contour requires %s" % (self.type, name))
        for name in ("R", "length", "aspect", "mode", "eps"):
            if getattr(self, name) is not None and name not in allowed:
                raise ValueError(
                    "%s contour does not accept %s" % (self.type, name)
                )
        return self

    def to_spec(self):
        """Plain dict accepted by the geometry factory."""
        out = {"type": self.type}
        for name in ("R", "length", "aspect", "mode", "eps"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


class CircleRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    R: float = Field(gt=0)
    omega: float = Field(gt=0)
    tol: float = Field(default=1e-12, gt=0)


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    omega: float = Field(gt=0)
    radii: List[float] = Field(min_length=1)
    tol: float = Field(default=1e-12, gt=0)

    @model_validator(mode="after")
    def _check_radii(self):
        if any(r <= 0.0 for r in self.radii):
            raise ValueError("radii must be positive")
        if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError("radii must be sorted strictly ascending")
        return self


class BoundRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    contour: ContourSpec
    omega: float = Field(gt=0)
    T: Optional[float] = Field(default=None, gt=0)
    n: int = Field(default=1024, ge=64, le=16384)


class FemRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    contour: ContourSpec
    omega: float = Field(gt=0)
    h: List[float] = Field(default=[0.04], min_length=1)
    R_out: List[float] = Field(default=[6.0], min_length=1)
    tol: float = Field(default=1e-8, gt=0)


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    contours: Optional[List[ContourSpec]] = None
    omega: float = Field(default=1.0, gt=0)
    h: float = Field(default=0.02, gt=0)
    R_out: float = Field(default=5.0, gt=0)
    tol: float = Field(default=1e-4, gt=0)
    fem_slack: float = Field(default=5e-3, gt=0)


class _Report(BaseModel):
    """Base for responses; serializes the version as ``schema``."""

    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schema")


class CircleReport(_Report):
    command: Literal["circle"] = "circle"
    R: float
    omega: float
    k_star: float
    lambda1: float
    residual: float
    k_lower: float
    k_upper: float
    bracket_strict: bool
    defect_value: float
    defect_derivative: float


class SweepRow(BaseModel):
    R: float
    omega: float
    k_star: float
    lambda1: float
    residual: float


class SweepReport(_Report):
    command: Literal["sweep"] = "sweep"
    omega: float
    lambda_monotone: bool
    rows: List[SweepRow]


class QuotientTerms(BaseModel):
    numerator_gradient: float
    numerator_jump: float
    denominator: float
    quotient: float


class Certificate(BaseModel):
    lambda1_circle: float
    domain_bound: float
    margin: float
    certified: bool
    tolerance: float
    k_star: float
    horizon: float
    length: float
    omega: float
    circle_quotient: QuotientTerms
    domain_quotient: QuotientTerms


class BoundReport(_Report):
    command: Literal["bound"] = "bound"
    omega: float
    contour: ContourSpec
    circle_quotient: float
    domain_quotient: float
    vacuous: bool
    ordered: Optional[bool]
    certificate: Certificate


class FemRow(BaseModel):
    h: float
    R_out: float
    lambda1: float
    n_dofs: int
    residual: float
    error: Optional[float] = None
    order: Optional[float] = None


class FemReport(_Report):
    command: Literal["fem"] = "fem"
    omega: float
    contour: ContourSpec
    rows: List[FemRow]


class VerifyRow(BaseModel):
    contour: ContourSpec
    lambda1_fem: float
    domain_bound: float
    lambda1_circle: float
    margin: float
    fem_below_bound: bool
    bound_below_circle: bool
    passed: bool


class VerifyReport(_Report):
    command: Literal["verify-theorem"] = "verify-theorem"
    omega: float
    h: float
    R_out: float
    tol: float
    fem_slack: float
    passed: bool
    rows: List[VerifyRow]


class HealthReport(_Report):
    status: Literal["ok"] = "ok"
