"""Dimensionless model parameters.

All quantities are measured in units of the bare coupling rate kappa
(kappa = 1): frequencies in kappa, times in 1/kappa.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class DomainError(ValueError):
    """Input outside the model's domain of validity."""


class ConvergenceError(RuntimeError):
    """A numerical routine failed to reach its requested tolerance."""


class GuardError(RuntimeError):
    """A numerical guard (recurrence time, step size, norm drift) tripped."""


class Direction(enum.Enum):
    UPWARD = "up"
    DOWNWARD = "down"

    @classmethod
    def parse(cls, value: "str | Direction") -> "Direction":
        if isinstance(value, Direction):
            return value
        v = str(value).strip().lower()
        for d in cls:
            if v in (d.value, d.name.lower(), d.name.lower() + "s"):
                return d
        raise DomainError(f"unknown emission direction {value!r}")

    @property
    def sign(self) -> int:
        return 1 if self is Direction.UPWARD else -1


@dataclass(frozen=True)
class PhysicsConfig:
    """Two-position, two-level atom coupled to a one-dimensional field.

    ``lambda1``/``lambda2`` are the dilation factors 1 + g x_i / c^2 of the
    two branches, ``w0`` the bare transition frequency and ``kappa_tau`` the
    light travel time between the positions, all in units of kappa.
    """

    lambda1: float
    lambda2: float
    w0: float
    kappa_tau: float
    direction: Direction = Direction.UPWARD

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction.parse(self.direction))
        for name in ("lambda1", "lambda2", "w0", "kappa_tau"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
        if self.lambda1 <= 0 or self.lambda2 <= 0:
            raise DomainError(
                f"dilation factors must be positive (lambda1={self.lambda1}, lambda2={self.lambda2})"
            )
        if self.w0 <= 0:
            raise DomainError(f"w0 must be positive, got {self.w0}")
        if self.kappa_tau < 0:
            raise DomainError(f"kappa_tau must be non-negative, got {self.kappa_tau}")

    @property
    def delta(self) -> float:
        return self.lambda2 - self.lambda1

    @property
    def tau(self) -> float:
        return self.kappa_tau

    @property
    def lambdas(self) -> tuple[float, float]:
        return (self.lambda1, self.lambda2)

    def decay_rate(self, branch: int) -> float:
        """Amplitude decay rate lambda_i^2 kappa of the excited state."""
        lam = self.lambdas[_branch_index(branch)]
        return lam * lam

    @classmethod
    def from_delta(cls, lambda1: float, delta: float, w0: float, kappa_tau: float,
                   direction: "Direction | str" = Direction.UPWARD) -> "PhysicsConfig":
        return cls(lambda1, lambda1 + delta, w0, kappa_tau, Direction.parse(direction))

    @classmethod
    def centered(cls, delta: float, w0: float, kappa_tau: float,
                 direction: "Direction | str" = Direction.UPWARD) -> "PhysicsConfig":
        """Zero of potential at the midpoint of the two positions."""
        if abs(delta) >= 2:
            raise DomainError(f"|delta| must be < 2 for a centred frame, got {delta}")
        return cls(1 - delta / 2, 1 + delta / 2, w0, kappa_tau, Direction.parse(direction))

    @classmethod
    def from_physical(cls, g: float, c: float, x1: float, x2: float, kappa: float,
                      w0: float, direction: "Direction | str" = Direction.UPWARD) -> "PhysicsConfig":
        """Build from SI-like quantities; requires x2 >= x1."""
        if kappa <= 0 or c <= 0:
            raise DomainError("kappa and c must be positive")
        if x2 < x1:
            raise DomainError("positions must satisfy x2 >= x1")
        lam1 = 1 + g * x1 / c**2
        lam2 = 1 + g * x2 / c**2
        tau = (x2 - x1) / c
        return cls(lam1, lam2, w0 / kappa, kappa * tau, Direction.parse(direction))

    def with_(self, **changes) -> "PhysicsConfig":
        from dataclasses import replace
        return replace(self, **changes)


def _branch_index(branch: int) -> int:
    if branch not in (1, 2):
        raise DomainError(f"branch must be 1 or 2, got {branch!r}")
    return branch - 1
