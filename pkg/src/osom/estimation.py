"""Online estimators: per-arm upper confidence values, the bias-corrected ridge
estimate of the shared linear parameter, its confidence ball, and the
optimistic maximizer over that ball intersected with the unit ball.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigvalsh

from .core import OsomError, RadiusMode, RoundBeforeWarmup
from .envelopes import EnvelopeParams, kappa_envelope


class ZeroPulls(OsomError):
    pass


class InfeasibleBall(UserWarning):
    """The confidence ball misses the unit ball; its center was projected first."""


def arm_ucb_width(pulls, sigma: float, K: int, delta_prime: float):
    """Confidence width of an arm pulled ``pulls`` times (scalar or array)."""
    T = np.asarray(pulls, dtype=float)
    if np.any(T < 1):
        raise ZeroPulls("width is undefined for an arm that was never pulled")
    inner = (1.0 + T) / T**2 * (1.0 + 2.0 * np.log(K * np.sqrt(1.0 + T) / delta_prime))
    width = sigma * np.sqrt(inner)
    return float(width) if width.ndim == 0 else width


class ArmStats:
    """Pull counts, reward sums and upper confidence values for K arms.

    ``ucb`` is ``+inf`` for arms that were never pulled.
    """

    def __init__(self, K: int, sigma: float, delta_prime: float):
        self.K = K
        self.sigma = sigma
        self.delta_prime = delta_prime
        self.pulls = np.zeros(K, dtype=np.int64)
        self.reward_sum = np.zeros(K)
        self.ucb = np.full(K, np.inf)

    @property
    def mean(self) -> np.ndarray:
        out = np.zeros(self.K)
        seen = self.pulls > 0
        out[seen] = self.reward_sum[seen] / self.pulls[seen]
        return out

    def width(self, arm: int) -> float:
        return arm_ucb_width(self.pulls[arm], self.sigma, self.K, self.delta_prime)

    def update(self, arm: int, reward: float) -> None:
        self.pulls[arm] += 1
        self.reward_sum[arm] += reward
        self.ucb[arm] = self.reward_sum[arm] / self.pulls[arm] + self.width(arm)


class RidgeState:
    """Ridge regression with unit regularizer, fed one row at a time.

    ``gram`` is ``I + sum x x^T`` and ``moment`` is ``sum x y``; ``theta_hat``
    solves ``gram @ theta_hat = moment`` after every update.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.gram = np.eye(dim)
        self.moment = np.zeros(dim)
        self.theta_hat = np.zeros(dim)
        self.rows_seen = 0
        self._chol = None

    def update(self, context, target: float) -> "RidgeState":
        x = np.asarray(context, dtype=float)
        self.gram += np.outer(x, x)
        self.moment += target * x
        self.rows_seen += 1
        self._chol = None
        if self.dim:
            self.theta_hat = cho_solve(self.factor(), self.moment)
        return self

    def factor(self):
        if self._chol is None:
            self._chol = cho_factor(self.gram, lower=True)
        return self._chol

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """``gram^{-1} @ rhs`` through the cached Cholesky factor."""
        return cho_solve(self.factor(), rhs)

    def logdet(self) -> float:
        if not self.dim:
            return 0.0
        return 2.0 * float(np.sum(np.log(np.diag(self.factor()[0]))))

    def min_eig(self) -> float:
        if not self.dim:
            return 1.0
        return float(eigvalsh(self.gram, subset_by_index=[0, 0])[0])


@dataclass(frozen=True)
class ConfidenceBall:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise OsomError(f"ball radius must be positive, got {self.radius}")


def self_normalized_beta(logdet: float, sigma: float, delta_prime: float, bound: float) -> float:
    """Ellipsoid radius sqrt(2 sigma^2 ln(det(V)^{1/2} / delta')) + bound."""
    return math.sqrt(2.0 * sigma**2 * (0.5 * logdet + math.log(1.0 / delta_prime))) + bound


def confidence_radius(state: RidgeState, p: EnvelopeParams, t: int, mode: RadiusMode) -> float:
    """Euclidean radius of the ball around ``state.theta_hat`` after round ``t``."""
    if t <= p.K:
        raise RoundBeforeWarmup(f"confidence radius defined only for t > K={p.K}, got {t}")
    if RadiusMode(mode) is RadiusMode.THEORETICAL:
        return kappa_envelope(p, t)
    beta = self_normalized_beta(state.logdet(), p.sigma, p.delta_prime, 1.0)
    return beta / math.sqrt(state.min_eig())


def optimistic_max(alpha, ball: ConfidenceBall, tol: float = 1e-9) -> Tuple[float, np.ndarray]:
    """Maximize ``<alpha, theta>`` over ``ball`` intersected with the unit ball.

    Returns ``(value, theta)``. If the two balls are disjoint, the center is
    first projected onto the unit sphere and :class:`InfeasibleBall` is warned.
    """
    value, theta, projected = constrained_max(alpha, ball.center, ball.radius, tol)
    if projected:
        warnings.warn(
            f"confidence ball (|center|={np.linalg.norm(ball.center):.6g}, radius={ball.radius:.6g}) "
            "misses the unit ball",
            InfeasibleBall,
            stacklevel=2,
        )
    return value, theta


def constrained_max(alpha, center, radius: float, tol: float = 1e-9) -> Tuple[float, np.ndarray, bool]:
    """Silent core of :func:`optimistic_max`; the flag reports a projected center.

    The optimum is the ball's own maximizer if that lies in the unit ball,
    the unit ball's maximizer if that lies in the ball, and otherwise sits on
    the circle where both spheres meet, at the point of that circle furthest
    along the component of ``alpha`` orthogonal to the center.
    """
    a = np.asarray(alpha, dtype=float)
    c = np.asarray(center, dtype=float)
    r = float(radius)
    c_norm = float(np.linalg.norm(c))
    projected = c_norm > 1.0 + r
    if projected:
        c = c / c_norm
        c_norm = 1.0

    a_norm = float(np.linalg.norm(a))
    if not np.any(a):
        return 0.0, (c / c_norm if c_norm > 1.0 else c.copy()), projected

    # rescale before normalizing so tiny alphas do not underflow
    u = a / np.abs(a).max()
    u /= np.linalg.norm(u)
    theta = c + r * u
    if np.linalg.norm(theta) <= 1.0 + tol:
        return float(a @ theta), theta, projected
    if np.linalg.norm(u - c) <= r + tol:
        return float(a @ u), u, projected

    if c_norm == 0.0:
        return float(a @ u), u, projected

    # both constraints active: <theta, c> = h on the intersection circle
    h = 0.5 * (1.0 + c_norm**2 - r**2)
    c_unit = c / c_norm
    base = (h / c_norm) * c_unit
    spread = math.sqrt(max(1.0 - (h / c_norm) ** 2, 0.0))
    a_perp = a - (a @ c_unit) * c_unit
    perp_norm = float(np.linalg.norm(a_perp))
    if perp_norm > 0.0:
        theta = base + spread * (a_perp / perp_norm)
    else:
        theta = base
    return float(a @ theta), theta, projected
