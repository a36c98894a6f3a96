"""Deterministic threshold envelopes for the confidence set and the switching test.

All logarithms are natural. ``t`` is the round index and ``p.n`` the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .core import AlgoConfig, InstanceSpec, OsomError, RoundBeforeWarmup


class LengthMismatch(OsomError):
    pass


@dataclass(frozen=True)
class EnvelopeParams:
    """Constants shared by every envelope.

    Construction only rejects values the formulas cannot evaluate. Use
    :meth:`from_instance` for the strict checks a real run needs
    (``0 < delta_prime < 1``, ``sigma > 0``).
    """

    delta_prime: float
    sigma: float
    K: int
    d: int
    n: int
    rho_min: float
    rho_max: float

    def __post_init__(self):
        if self.delta_prime <= 0.0 or self.sigma < 0.0:
            raise OsomError(f"need delta_prime > 0 and sigma >= 0: {self}")
        if self.K < 1 or self.d < 0 or self.n < 1:
            raise OsomError(f"need K >= 1, d >= 0, n >= 1: {self}")
        if self.rho_min <= 0.0 or self.rho_max <= 0.0:
            raise OsomError(f"rho parameters must be positive: {self}")

    @classmethod
    def from_instance(cls, instance: InstanceSpec, cfg: AlgoConfig) -> "EnvelopeParams":
        cfg.check_arms(instance.K)
        return cls(
            delta_prime=cfg.delta_prime,
            sigma=instance.sigma,
            K=instance.K,
            d=instance.d,
            n=cfg.n,
            rho_min=instance.context_dist.rho_min,
            rho_max=instance.context_dist.rho_max,
        )

    @property
    def log_dn(self) -> float:
        return math.log(2 * self.d * self.n / self.delta_prime)


@lru_cache(maxsize=4096)
def tau_min(p: EnvelopeParams) -> float:
    """Rounds after warm-up needed before the design matrix is well conditioned."""
    r = p.rho_min
    return (16.0 / r**2 + 8.0 / (3.0 * r)) * p.log_dn


@lru_cache(maxsize=1 << 16)
def upsilon(p: EnvelopeParams, t: int) -> float:
    if t < 1:
        raise OsomError(f"upsilon needs t >= 1, got {t}")
    ldn = p.log_dn
    scale = 2.0 + p.sigma * math.sqrt(1.0 + 2.0 * math.log(2 * p.K * p.n / p.delta_prime))
    return (10.0 / 3.0) * scale * (ldn + math.sqrt(t * ldn + ldn**2))


@lru_cache(maxsize=1 << 16)
def m_one(p: EnvelopeParams, t: int) -> float:
    """Self-normalized radius term: sqrt(2 s^2 (d/2 ln(1+t/d) + ln(1/delta'))) + 1."""
    if t < 0:
        raise OsomError(f"m_one needs t >= 0, got {t}")
    growth = 0.5 * p.d * math.log1p(t / p.d) if p.d > 0 else 0.0
    return math.sqrt(2.0 * p.sigma**2 * (growth + math.log(1.0 / p.delta_prime))) + 1.0


@lru_cache(maxsize=1 << 16)
def kappa_envelope(p: EnvelopeParams, t: int) -> float:
    """Theoretical Euclidean radius of the ridge confidence ball after round ``t``.

    Piecewise in ``t - K`` against ``tau_min`` (used unrounded); the first
    branch includes the breakpoint.
    """
    if t <= p.K:
        raise RoundBeforeWarmup(f"radius defined only for t > K={p.K}, got {t}")
    if t <= p.K + tau_min(p):
        return m_one(p, t) + upsilon(p, t)
    shrink = 1.0 + p.rho_min * (t - p.K) / 2.0
    return m_one(p, t) / math.sqrt(shrink) + upsilon(p, t) / shrink


def _q_from_sums(p: EnvelopeParams, total: float, total_sq: float) -> float:
    log_inv = math.log(1.0 / p.delta_prime)
    lead = 16.0 * math.sqrt(math.log(p.K) * p.rho_max)
    return lead * (math.sqrt(total_sq * log_inv) + total) + 3.0 * log_inv


def q_envelope(p: EnvelopeParams, t: int, kappa_series: Sequence[float]) -> float:
    """``kappa_series`` holds the radii used at rounds K+1..t, one per round."""
    if len(kappa_series) != t - p.K:
        raise LengthMismatch(
            f"need t - K = {t - p.K} radii, got {len(kappa_series)}"
        )
    total = 0.0
    total_sq = 0.0
    for k in kappa_series:
        total += k
        total_sq += k * k
    return _q_from_sums(p, total, total_sq)


def w_envelope(p: EnvelopeParams, t: int, q_value: float) -> float:
    if t < 1:
        raise OsomError(f"w_envelope needs t >= 1, got {t}")
    log_inv = math.log(1.0 / p.delta_prime)
    noise = p.sigma * math.sqrt((1.0 + t) / 2.0 * log_inv)
    bias = (2.0 * p.sigma + 3.0) * math.sqrt(
        1.0 + 2.0 * math.log(p.K * math.sqrt(t) / p.delta_prime)
    )
    return 2.0 * q_value + noise + bias * math.sqrt(p.K * t)


class KappaAccumulator:
    """Running sums of the per-round radii, so Q costs O(1) per round.

    Sums are accumulated left to right, matching :func:`q_envelope` bit for bit.
    """

    def __init__(self, p: EnvelopeParams):
        self.p = p
        self.count = 0
        self.total = 0.0
        self.total_sq = 0.0

    def push(self, kappa: float) -> None:
        self.count += 1
        self.total += kappa
        self.total_sq += kappa * kappa

    def q(self, t: int) -> float:
        if self.count != t - self.p.K:
            raise LengthMismatch(
                f"accumulator holds {self.count} radii, Q at t={t} needs {t - self.p.K}"
            )
        return _q_from_sums(self.p, self.total, self.total_sq)

    def w(self, t: int) -> float:
        return w_envelope(self.p, t, self.q(t))
