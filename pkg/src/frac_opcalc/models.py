"""Pydantic models for the numerical domain types."""

import math
import sys
from enum import Enum
from typing import Any

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_validator,
)

from frac_opcalc.exceptions import OrderWindowError

# Series control


class SeriesPolicy(BaseModel):
    """Truncation and convergence control for an infinite series."""

    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default=1e-14, gt=0)
    abs_tol: float = Field(default=1e-300, ge=0)
    consecutive_small: int = Field(default=3, ge=1)
    max_terms: int = Field(default=10_000, ge=1)


class SeriesResult(BaseModel):
    """Value of a truncated series with its convergence diagnostics.

    A result that is not converged used ``max_terms`` terms unless a flag says
    otherwise: ``diverged`` when its terms started to grow again, ``exhausted``
    when it ran out of available terms before meeting the tolerance.
    """

    model_config = ConfigDict(frozen=True)

    value: float
    terms_used: int = Field(ge=0)
    converged: bool
    est_error: float = Field(ge=0)
    diverged: bool = False
    extended_precision: bool = False
    exhausted: bool = False


class ProbabilityResult(SeriesResult):
    """A probability together with its non-negative companion."""

    clamped: float
    diagnostic: str | None = None


# Fractional operators


class FractionalOrder(BaseModel):
    """Order ν of a fractional operator together with m = ceil(ν)."""

    model_config = ConfigDict(frozen=True)

    nu: float = Field(gt=0)

    @property
    def m(self) -> int:
        """Smallest integer not below ν."""
        return math.ceil(self.nu)

    def require(
        self,
        lower: float,
        upper: float,
        *,
        operation: str,
        upper_closed: bool = True,
    ) -> None:
        """Raise OrderWindowError unless ν lies in (lower, upper] or (lower, upper)."""
        inside = self.nu > lower and (
            self.nu <= upper if upper_closed else self.nu < upper
        )
        if not inside:
            bracket = "]" if upper_closed else ")"
            raise OrderWindowError(
                f"{operation} requires nu in ({lower}, {upper}{bracket}, "
                f"got {self.nu}"
            )


class PowerTerm(BaseModel):
    """Monomial coeff * t**exponent; a zero coefficient is the zero function."""

    model_config = ConfigDict(frozen=True)

    coeff: float
    exponent: float

    @model_validator(mode="after")
    def _integrable_at_zero(self) -> Self:
        if self.coeff != 0.0 and self.exponent <= -1.0:
            raise ValueError(f"exponent must exceed -1, got {self.exponent}")
        return self

    @classmethod
    def zero(cls) -> "PowerTerm":
        """The zero function."""
        return cls(coeff=0.0, exponent=0.0)

    @property
    def is_zero(self) -> bool:
        return self.coeff == 0.0

    def __call__(self, t: float) -> float:
        if self.is_zero:
            return 0.0
        if t == 0.0 and self.exponent < 0:
            return math.copysign(math.inf, self.coeff)
        return self.coeff * t**self.exponent


def _frozen_array(values: Any) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


class SampledFunction(BaseModel):
    """Samples of f on a mesh starting at 0, plus derivatives of f at 0."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t_grid: np.ndarray
    values: np.ndarray
    deriv0: tuple[float, ...] = ()

    @field_validator("t_grid", "values", mode="before")
    @classmethod
    def _to_array(cls, value: Any) -> np.ndarray:
        array = _frozen_array(value)
        if array.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        return array

    @model_validator(mode="after")
    def _check_mesh(self) -> Self:
        if self.t_grid.size != self.values.size:
            raise ValueError("t_grid and values must have the same length")
        if self.t_grid.size < 2:
            raise ValueError("at least two samples are required")
        if self.t_grid[0] != 0.0:
            raise ValueError("t_grid must start at 0")
        if np.any(np.diff(self.t_grid) <= 0):
            raise ValueError("t_grid must be strictly increasing")
        return self

    @classmethod
    def from_callable(
        cls, f: Any, t_max: float, steps: int, deriv0: tuple[float, ...] = ()
    ) -> "SampledFunction":
        """Sample a vectorised callable on a uniform mesh of [0, t_max]."""
        t = np.linspace(0.0, t_max, steps + 1)
        return cls(t_grid=t, values=np.asarray(f(t), dtype=float), deriv0=deriv0)


class FractionalWeight(BaseModel):
    """Node weights of the measure ds_nu on a mesh ending at the evaluation time."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nu: FractionalOrder
    mesh: np.ndarray
    node_weights: np.ndarray

    @field_validator("mesh", "node_weights", mode="before")
    @classmethod
    def _to_array(cls, value: Any) -> np.ndarray:
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_weights(self) -> Self:
        if self.mesh.size != self.node_weights.size:
            raise ValueError("mesh and node_weights must have the same length")
        if np.any(self.node_weights < 0):
            raise ValueError("node weights must be non-negative")
        return self


# Special functions


class MittagLefflerParams(BaseModel):
    """Parameters of E_{gamma, zeta}; zeta = 1 gives the one-parameter form."""

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(gt=0)
    zeta: float = Field(default=1.0, gt=0)


class WrightParams(BaseModel):
    """Parameters of the Wright function phi(gamma, zeta; x)."""

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(gt=-1)
    zeta: float


# Operational solver


class AnalyticFunction(BaseModel):
    """Power series g(x) = sum_k coeffs[k] * x**(offset + k).

    ``truncated`` marks a finite section of an infinite Taylor series.
    """

    model_config = ConfigDict(frozen=True)

    coeffs: tuple[float, ...]
    offset: float = 0.0
    truncated: bool = False

    @classmethod
    def monomial(cls, beta: float, coeff: float = 1.0) -> "AnalyticFunction":
        return cls(coeffs=(coeff,), offset=beta)

    @classmethod
    def constant(cls, value: float = 1.0) -> "AnalyticFunction":
        return cls(coeffs=(value,))

    @classmethod
    def sine(cls, terms: int) -> "AnalyticFunction":
        """Taylor section of sin x with ``terms`` coefficients."""
        coeffs = tuple(
            0.0 if k % 2 == 0 else (-1.0) ** (k // 2) / math.factorial(k)
            for k in range(terms)
        )
        return cls(coeffs=coeffs, truncated=True)

    @classmethod
    def exponential(cls, rate: float, terms: int) -> "AnalyticFunction":
        """Taylor section of exp(rate * x) with ``terms`` coefficients."""
        coeffs = tuple(rate**k / math.factorial(k) for k in range(terms))
        return cls(coeffs=coeffs, truncated=True)

    @classmethod
    def delta(cls, sequence: "DeltaSequence") -> "AnalyticFunction":
        """Generating function u**k0 of a Kronecker sequence."""
        return cls(coeffs=(1.0,), offset=float(sequence.offset))

    @property
    def is_zero(self) -> bool:
        return not self.truncated and all(c == 0.0 for c in self.coeffs)

    @property
    def is_exhausted(self) -> bool:
        """A truncated section with no coefficient left carries no information."""
        return self.truncated and not self.coeffs

    def exponents(self) -> np.ndarray:
        return self.offset + np.arange(len(self.coeffs), dtype=float)

    def sequence(self, length: int) -> np.ndarray:
        """Coefficient of u**k for k < length (integer offsets only)."""
        if self.offset != math.floor(self.offset):
            raise ValueError("sequence view needs an integer offset")
        out = np.zeros(length)
        start = int(self.offset)
        for k, c in enumerate(self.coeffs):
            if 0 <= start + k < length:
                out[start + k] = c
        return out


class OperatorKind(str, Enum):
    """Closed set of constant-coefficient operators with an exact action."""

    SECOND_DERIVATIVE = "second_derivative"
    NEGATED_FOURTH_DERIVATIVE = "negated_fourth_derivative"
    SCALAR = "scalar"
    BACKWARD_SHIFT = "backward_shift"


class OperatorDescriptor(BaseModel):
    """Linear operator Theta = scale * (K + identity_weight * I) for a kind K.

    ``identity_weight`` is only meaningful for the backward shift, where
    ``scale=rate, identity_weight=-1`` gives -rate * (1 - B).
    """

    model_config = ConfigDict(frozen=True)

    kind: OperatorKind
    scale: float = 1.0
    identity_weight: float = 0.0

    @model_validator(mode="after")
    def _identity_only_for_shift(self) -> Self:
        if self.identity_weight != 0.0 and self.kind != OperatorKind.BACKWARD_SHIFT:
            raise ValueError("identity_weight applies to backward_shift only")
        return self

    @classmethod
    def second_derivative(cls, scale: float = 1.0) -> "OperatorDescriptor":
        return cls(kind=OperatorKind.SECOND_DERIVATIVE, scale=scale)

    @classmethod
    def negated_fourth_derivative(cls, scale: float = 1.0) -> "OperatorDescriptor":
        return cls(kind=OperatorKind.NEGATED_FOURTH_DERIVATIVE, scale=scale)

    @classmethod
    def scalar(cls, c: float) -> "OperatorDescriptor":
        return cls(kind=OperatorKind.SCALAR, scale=c)

    @classmethod
    def backward_shift(
        cls, scale: float = 1.0, identity_weight: float = 0.0
    ) -> "OperatorDescriptor":
        return cls(
            kind=OperatorKind.BACKWARD_SHIFT,
            scale=scale,
            identity_weight=identity_weight,
        )

    @classmethod
    def poisson_generator(cls, rate: float) -> "OperatorDescriptor":
        """-rate * (1 - B), the generator of the Poisson state equations."""
        return cls.backward_shift(scale=rate, identity_weight=-1.0)


class VariableRole(str, Enum):
    """Which variable carries the fractional derivative."""

    TIME = "time"
    SPACE = "space"


# Worked models


def _not_negative_integer(beta: float) -> float:
    if beta < 0 and beta == math.floor(beta):
        raise ValueError(f"beta must not be a negative integer, got {beta}")
    return beta


class HeatPolyParams(BaseModel):
    """Initial datum x**beta and order of the time-fractional heat equation."""

    model_config = ConfigDict(frozen=True)

    beta: float
    nu: FractionalOrder

    @field_validator("beta")
    @classmethod
    def _check_beta(cls, value: float) -> float:
        return _not_negative_integer(value)

    @field_validator("nu")
    @classmethod
    def _check_nu(cls, value: FractionalOrder) -> FractionalOrder:
        value.require(0.0, 1.0, operation="heat polynomial")
        return value

    @property
    def terminates(self) -> bool:
        """Non-negative integer beta gives a finite sum."""
        return self.beta >= 0 and self.beta == math.floor(self.beta)


class FppParams(BaseModel):
    """Rate and order of a fractional Poisson process."""

    model_config = ConfigDict(frozen=True)

    rate: float = Field(gt=0)
    nu: FractionalOrder

    @field_validator("nu")
    @classmethod
    def _check_nu(cls, value: FractionalOrder) -> FractionalOrder:
        value.require(0.0, 1.0, operation="fractional Poisson process")
        return value


class DeltaSequence(BaseModel):
    """Kronecker sequence delta_{k - offset, 0}."""

    model_config = ConfigDict(frozen=True)

    offset: int = Field(default=0, ge=0)

    def values(self, length: int) -> np.ndarray:
        out = np.zeros(length)
        if self.offset < length:
            out[self.offset] = 1.0
        return out


class SubordinationSpec(BaseModel):
    """Quadrature setup for E exp(-alpha * Xi * t**nu) over the Wright density."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(gt=0)
    nu: FractionalOrder
    t: float = Field(gt=0)
    quad_upper: float = Field(gt=0)
    quad_nodes: int = Field(ge=16)

    @field_validator("nu")
    @classmethod
    def _check_nu(cls, value: FractionalOrder) -> FractionalOrder:
        value.require(0.0, 1.0, operation="subordination", upper_closed=False)
        return value


# Grid output


class GridSpec(BaseModel):
    """Rectangular evaluation lattice; a count of 1 collapses an axis."""

    model_config = ConfigDict(frozen=True)

    x_min: float
    x_max: float
    x_count: int = Field(ge=1)
    t_min: float
    t_max: float
    t_count: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_bounds(self) -> Self:
        if self.x_max < self.x_min or self.t_max < self.t_min:
            raise ValueError("grid maximum must not be below its minimum")
        return self

    @staticmethod
    def _axis(lo: float, hi: float, count: int) -> np.ndarray:
        if count == 1:
            return np.array([lo])
        return np.linspace(lo, hi, count)

    def x_values(self) -> np.ndarray:
        return self._axis(self.x_min, self.x_max, self.x_count)

    def t_values(self) -> np.ndarray:
        return self._axis(self.t_min, self.t_max, self.t_count)

    def points(self) -> list[tuple[float, float]]:
        """Lattice points in row-major order (x outer, t inner)."""
        return [
            (float(x), float(t)) for x in self.x_values() for t in self.t_values()
        ]


class GridField(BaseModel):
    """Sampled values on a GridSpec lattice with per-point convergence flags."""

    spec: GridSpec
    values: list[float]
    convergence_flags: list[bool]
    metadata: dict[str, Any] = Field(default_factory=dict)
    axis_names: tuple[str, str] = ("x", "t")

    @model_validator(mode="after")
    def _check_lengths(self) -> Self:
        expected = self.spec.x_count * self.spec.t_count
        if len(self.values) != expected or len(self.convergence_flags) != expected:
            raise ValueError(f"expected {expected} values and flags")
        return self
