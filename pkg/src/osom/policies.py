"""Sequential policies: UCB on arm means, an OFUL variant on joint (arm, context)
features, and OSOM, which plays UCB until a cumulative test says the linear
model would have earned noticeably more, then switches to it for good.

Every policy alternates ``select(t, slate)`` and ``observe(t, arm, reward, slate)``.
Arms are 0-based; the first K rounds play arms 0..K-1 in order. Argmax ties
go to the lowest arm index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ContextSlate, ModelKind, OsomError, PolicyKind, RadiusMode
from .envelopes import EnvelopeParams, KappaAccumulator
from .estimation import (
    ArmStats,
    RidgeState,
    confidence_radius,
    constrained_max,
    self_normalized_beta,
)


class HorizonExceeded(OsomError):
    pass


class ArmMismatch(OsomError):
    pass


@dataclass
class Decision:
    arm: int
    mode: ModelKind
    # OSOM only: simple and complex recommendations, optimistic value of the
    # complex one, and whether the switching test fired this round
    simple_arm: int = -1
    complex_arm: int = -1
    optimistic_value: float = math.nan
    radius: float = math.nan
    switched: bool = False


class Policy:
    kind: PolicyKind

    def __init__(self, p: EnvelopeParams):
        self.p = p
        self.K = p.K
        self.arms = ArmStats(p.K, p.sigma, p.delta_prime)
        self._pending: int | None = None

    def select(self, t: int, slate: ContextSlate) -> Decision:
        if t > self.p.n:
            raise HorizonExceeded(f"round {t} is past the horizon n={self.p.n}")
        if slate.round != t:
            raise OsomError(f"slate is for round {slate.round}, not {t}")
        if self._pending is not None:
            raise OsomError("select called twice without observe")
        if t <= self.K:
            decision = Decision(arm=t - 1, mode=self._warmup_mode())
        else:
            decision = self._choose(t, slate)
        self._pending = decision.arm
        return decision

    def observe(self, t: int, arm: int, reward: float, slate: ContextSlate) -> None:
        if arm != self._pending:
            raise ArmMismatch(f"observed arm {arm}, but arm {self._pending} was selected")
        self._pending = None
        self._update(t, arm, reward, slate)

    def _warmup_mode(self) -> ModelKind:
        return ModelKind.SIMPLE

    def _choose(self, t: int, slate: ContextSlate) -> Decision:
        raise NotImplementedError

    def _update(self, t: int, arm: int, reward: float, slate: ContextSlate) -> None:
        self.arms.update(arm, reward)


class UCBPolicy(Policy):
    kind = PolicyKind.UCB

    def _choose(self, t, slate):
        return Decision(arm=int(np.argmax(self.arms.ucb)), mode=ModelKind.SIMPLE)


def joint_features(K: int, contexts: np.ndarray) -> np.ndarray:
    """Rows ``(e_i, alpha_i)``: arm indicator followed by that arm's context."""
    return np.hstack([np.eye(K), np.asarray(contexts, dtype=float).reshape(K, -1)])


def oful_beta(ridge: RidgeState, sigma: float, delta_prime: float, K: int) -> float:
    # parameter norm bound: K biases in [-1, 1] plus ||theta*|| <= 1
    return self_normalized_beta(ridge.logdet(), sigma, delta_prime, math.sqrt(K + 1))


def oful_values(ridge: RidgeState, features: np.ndarray, beta: float) -> np.ndarray:
    """Optimistic value ``<x, phi_hat> + beta ||x||_{V^-1}`` for each feature row."""
    x = np.atleast_2d(features)
    widths = np.sqrt(np.einsum("ij,ji->i", x, ridge.solve(x.T)))
    return x @ ridge.theta_hat + beta * widths


def oful_value(joint_ridge: RidgeState, arm: int, context, beta: float) -> float:
    K = joint_ridge.dim - np.size(context)
    x = np.zeros(joint_ridge.dim)
    x[arm] = 1.0
    x[K:] = np.ravel(context)
    return float(oful_values(joint_ridge, x, beta)[0])


class OFULPolicy(Policy):
    """Optimism over a self-normalized ellipsoid for the joint parameter
    (biases, theta), rebuilt every round."""

    kind = PolicyKind.OFUL

    def __init__(self, p: EnvelopeParams):
        super().__init__(p)
        self.ridge = RidgeState(p.K + p.d)

    def _warmup_mode(self):
        return ModelKind.COMPLEX

    def _choose(self, t, slate):
        beta = oful_beta(self.ridge, self.p.sigma, self.p.delta_prime, self.K)
        values = oful_values(self.ridge, joint_features(self.K, slate.vectors), beta)
        arm = int(np.argmax(values))
        return Decision(arm=arm, mode=ModelKind.COMPLEX, optimistic_value=float(values[arm]))

    def _update(self, t, arm, reward, slate):
        super()._update(t, arm, reward, slate)
        if t > self.K:
            self.ridge.update(joint_features(self.K, slate.vectors)[arm], reward)


class OSOMPolicy(Policy):
    """Optimistic selection between the simple and the linear reward model.

    The ridge regresses ``reward - ucb`` of the played arm (its upper value
    from the previous round) on that arm's context. The switching test
    compares the running sum of complex-model optimistic values with the
    running sum of received rewards against ``w_envelope``.
    """

    kind = PolicyKind.OSOM

    def __init__(self, p: EnvelopeParams, radius_mode: RadiusMode = RadiusMode.EMPIRICAL, tol: float = 1e-9):
        super().__init__(p)
        self.radius_mode = RadiusMode(radius_mode)
        self.tol = tol
        self.ridge = RidgeState(p.d)
        self.mode = ModelKind.SIMPLE
        self.kappas = KappaAccumulator(p)
        self.sum_optimistic = 0.0
        self.sum_received = 0.0
        self.switch_round: int | None = None
        # rounds whose ridge center was projected because the ball missed the unit ball
        self.projected_rounds = 0
        self._value = math.nan

    def threshold(self, t: int) -> float:
        """Switching threshold checked at round ``t`` (covers rounds K+1..t-1)."""
        return self.kappas.w(t - 1)

    def _choose(self, t, slate):
        K = self.K
        ucb = self.arms.ucb
        simple_arm = int(np.argmax(ucb))

        # ball built at the end of round t-1; the end of warm-up borrows the K+1 radius
        radius = confidence_radius(self.ridge, self.p, max(t - 1, K + 1), self.radius_mode)
        center = self.ridge.theta_hat
        values = np.empty(K)
        for i in range(K):
            value, _, projected = constrained_max(slate.vectors[i], center, radius, self.tol)
            values[i] = ucb[i] + value
        if projected:
            self.projected_rounds += 1
        complex_arm = int(np.argmax(values))

        switched = False
        if self.mode is ModelKind.SIMPLE and t > K + 1:
            if self.sum_optimistic - self.sum_received > self.threshold(t):
                self.mode = ModelKind.COMPLEX
                self.switch_round = t
                switched = True
        self.kappas.push(radius)

        self._value = float(values[complex_arm])
        arm = simple_arm if self.mode is ModelKind.SIMPLE else complex_arm
        return Decision(
            arm=arm,
            mode=self.mode,
            simple_arm=simple_arm,
            complex_arm=complex_arm,
            optimistic_value=self._value,
            radius=radius,
            switched=switched,
        )

    def _update(self, t, arm, reward, slate):
        target = reward - self.arms.ucb[arm]
        super()._update(t, arm, reward, slate)
        if t > self.K:
            self.ridge.update(slate.vectors[arm], target)
            if self.mode is ModelKind.SIMPLE:
                self.sum_optimistic += self._value
                self.sum_received += reward


def make_policy(
    kind: PolicyKind | str,
    p: EnvelopeParams,
    radius_mode: RadiusMode = RadiusMode.EMPIRICAL,
    tol: float = 1e-9,
) -> Policy:
    kind = PolicyKind(kind)
    if kind is PolicyKind.UCB:
        return UCBPolicy(p)
    if kind is PolicyKind.OFUL:
        return OFULPolicy(p)
    return OSOMPolicy(p, radius_mode, tol)
