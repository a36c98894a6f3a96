"""Shared value types: instances, context distributions, configuration, round logs."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class OsomError(ValueError):
    """Base class for invalid inputs rejected by this package."""


class BiasOutOfRange(OsomError):
    pass


class ThetaNormExceeded(OsomError):
    pass


class SimpleModelNonzeroTheta(OsomError):
    pass


class InvalidContextDist(OsomError):
    pass


class InvalidConfig(OsomError):
    pass


class RoundBeforeWarmup(OsomError):
    pass


class ModelKind(str, enum.Enum):
    SIMPLE = "simple"
    COMPLEX = "complex"


class ContextKind(str, enum.Enum):
    UNIT_SPHERE = "sphere"
    HYPERCUBE = "hypercube"
    CUSTOM = "custom"


class RadiusMode(str, enum.Enum):
    THEORETICAL = "theoretical"
    EMPIRICAL = "empirical"


class PolicyKind(str, enum.Enum):
    UCB = "ucb"
    OFUL = "oful"
    OSOM = "osom"


# ||theta*|| and ||alpha|| checks allow this much float slack
NORM_SLACK = 1e-12


def _frozen_array(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise OsomError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ContextDistSpec:
    """How per-arm contexts are generated.

    ``rho_min`` lower-bounds the covariance spectrum of a single context and
    ``rho_max`` is its sub-Gaussian parameter. ``sampler`` is only used for
    ``ContextKind.CUSTOM`` and must map ``(rng, K, d)`` to a ``(K, d)`` array
    of vectors with norm at most one.
    """

    kind: ContextKind
    rho_min: float
    rho_max: float
    sampler: Optional[Callable[[np.random.Generator, int, int], np.ndarray]] = field(
        default=None, compare=False
    )

    def __post_init__(self):
        object.__setattr__(self, "kind", ContextKind(self.kind))
        if not (0.0 < self.rho_min <= self.rho_max <= 1.0):
            raise InvalidContextDist(
                f"need 0 < rho_min <= rho_max <= 1, got {self.rho_min}, {self.rho_max}"
            )
        if self.kind is ContextKind.CUSTOM and self.sampler is None:
            raise InvalidContextDist("custom context distribution needs a sampler")

    @classmethod
    def default(cls, kind: ContextKind | str, d: int) -> "ContextDistSpec":
        """Sphere and hypercube contexts both have covariance I/d; use 1/d for both rhos."""
        return cls(ContextKind(kind), 1.0 / d, 1.0 / d)


@dataclass(frozen=True)
class InstanceSpec:
    """Hidden generative model. Construction validates every bound."""

    model_kind: ModelKind
    biases: np.ndarray
    theta_star: np.ndarray
    sigma: float
    context_dist: ContextDistSpec

    def __post_init__(self):
        object.__setattr__(self, "model_kind", ModelKind(self.model_kind))
        object.__setattr__(self, "biases", _frozen_array(self.biases, 1))
        object.__setattr__(self, "theta_star", _frozen_array(self.theta_star, 1))
        validate_instance(self)

    @property
    def K(self) -> int:
        return len(self.biases)

    @property
    def d(self) -> int:
        return len(self.theta_star)


def validate_instance(spec: InstanceSpec) -> None:
    """Raise if ``spec`` breaks any boundedness constraint of the reward model."""
    if spec.K < 1 or spec.d < 1:
        raise OsomError(f"need K >= 1 and d >= 1, got K={spec.K}, d={spec.d}")
    if not np.all(np.isfinite(spec.biases)) or np.any(np.abs(spec.biases) > 1.0):
        raise BiasOutOfRange(f"biases must lie in [-1, 1]: {spec.biases}")
    norm = float(np.linalg.norm(spec.theta_star))
    if not math.isfinite(norm) or norm > 1.0 + NORM_SLACK:
        raise ThetaNormExceeded(f"||theta_star|| = {norm} > 1")
    if spec.model_kind is ModelKind.SIMPLE and np.any(spec.theta_star != 0.0):
        raise SimpleModelNonzeroTheta("simple model requires theta_star = 0")
    # sigma = 0 is accepted so noiseless instances can be replayed exactly
    if not (spec.sigma >= 0.0 and math.isfinite(spec.sigma)):
        raise OsomError(f"sigma must be nonnegative, got {spec.sigma}")
    if spec.context_dist.rho_min > 1.0 / spec.d + NORM_SLACK:
        raise InvalidContextDist(
            f"bounded contexts force rho_min <= 1/d = {1.0 / spec.d}, got {spec.context_dist.rho_min}"
        )


@dataclass(frozen=True)
class ContextSlate:
    """The K context vectors revealed at round ``round`` (shape ``(K, d)``)."""

    round: int
    vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vectors", _frozen_array(self.vectors, 2))
        if self.round < 1:
            raise OsomError(f"rounds start at 1, got {self.round}")
        norms = np.linalg.norm(self.vectors, axis=1)
        if np.any(norms > 1.0 + 1e-9):
            raise OsomError(f"context norms must be <= 1, max is {norms.max()}")


@dataclass(frozen=True)
class AlgoConfig:
    """Algorithm-level knobs. ``delta`` is the global failure probability."""

    delta: float
    n: int
    radius_mode: RadiusMode = RadiusMode.EMPIRICAL
    maximizer_tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "radius_mode", RadiusMode(self.radius_mode))
        if not (0.0 < self.delta < 1.0):
            raise InvalidConfig(f"delta must be in (0, 1), got {self.delta}")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidConfig(f"horizon must be a positive integer, got {self.n}")
        if not self.maximizer_tol > 0.0:
            raise InvalidConfig(f"maximizer_tol must be positive, got {self.maximizer_tol}")

    @property
    def delta_prime(self) -> float:
        """Per-round failure level delta / n."""
        return self.delta / self.n

    def check_arms(self, K: int) -> None:
        if not self.n > K:
            raise InvalidConfig(f"horizon n={self.n} must exceed the arm count K={K}")


@dataclass(frozen=True)
class RoundLog:
    round: int
    arm: int
    reward: float
    mode: ModelKind
    optimistic_value: float
    inst_regret: float
