"""Reward environments for the simple and complex models, plus the regret oracle.

Randomness comes from two independent generators: one for contexts and one
for noise. Each round consumes exactly K context vectors from the first and
K standard normals from the second, in arm order, whatever the policy does.
Only the chosen arm's noise is ever used, but drawing all K keeps the noise
of a given (round, arm) identical across policies that share a seed.
"""

from __future__ import annotations

import numpy as np

from .core import (
    ContextDistSpec,
    ContextKind,
    ContextSlate,
    InstanceSpec,
    ModelKind,
    OsomError,
)


def sample_contexts(dist: ContextDistSpec, rng: np.random.Generator, K: int, d: int) -> np.ndarray:
    if dist.kind is ContextKind.UNIT_SPHERE:
        g = rng.standard_normal((K, d))
        return g / np.linalg.norm(g, axis=1, keepdims=True)
    if dist.kind is ContextKind.HYPERCUBE:
        signs = rng.integers(0, 2, size=(K, d)) * 2 - 1
        return signs / np.sqrt(d)
    return np.asarray(dist.sampler(rng, K, d), dtype=float)


def draw_instance(
    model_kind: ModelKind | str,
    K: int,
    d: int,
    sigma: float,
    rng: np.random.Generator,
    context_dist: ContextDistSpec | None = None,
) -> InstanceSpec:
    """Biases i.i.d. uniform on (-1, 1); theta* uniform on the unit sphere (complex) or zero."""
    model_kind = ModelKind(model_kind)
    if context_dist is None:
        context_dist = ContextDistSpec.default(ContextKind.UNIT_SPHERE, d)
    biases = rng.uniform(-1.0, 1.0, size=K)
    theta = np.zeros(d)
    if model_kind is ModelKind.COMPLEX:
        g = rng.standard_normal(d)
        theta = g / np.linalg.norm(g)
    return InstanceSpec(model_kind, biases, theta, sigma, context_dist)


class Environment:
    """Stochastic environment for one run.

    Call :meth:`sample_slate` once per round, in order, before
    :meth:`draw_reward` or :meth:`inst_regret` for that round.
    """

    def __init__(self, spec: InstanceSpec, context_rng: np.random.Generator, noise_rng: np.random.Generator):
        self.spec = spec
        self.context_rng = context_rng
        self.noise_rng = noise_rng
        self.current_slate: ContextSlate | None = None
        self._noise = None
        self._means = None

    def sample_slate(self, t: int) -> ContextSlate:
        if self.current_slate is not None and t != self.current_slate.round + 1:
            raise OsomError(f"slates are drawn in order; expected round {self.current_slate.round + 1}, got {t}")
        spec = self.spec
        vectors = sample_contexts(spec.context_dist, self.context_rng, spec.K, spec.d)
        self.current_slate = ContextSlate(t, vectors)
        self._noise = self.noise_rng.standard_normal(spec.K)
        self._means = spec.biases + self.current_slate.vectors @ spec.theta_star
        return self.current_slate

    def _check_round(self, t: int) -> None:
        if self.current_slate is None or self.current_slate.round != t:
            raise OsomError(f"no slate sampled for round {t}")

    def mean_rewards(self, t: int) -> np.ndarray:
        """Per-arm mean reward at round ``t`` under the true model."""
        self._check_round(t)
        return self._means

    def draw_reward(self, t: int, arm: int) -> float:
        self._check_round(t)
        return float(self._means[arm] + self.spec.sigma * self._noise[arm])

    def inst_regret(self, t: int, arm: int) -> float:
        means = self.mean_rewards(t)
        return float(means.max() - means[arm])


INSTANCE_FIELDS = ("model_kind", "K", "d", "sigma", "context_kind", "rho_min", "rho_max", "biases", "theta_star")


def dump_instance(spec: InstanceSpec) -> str:
    """Flat ``key=value`` text, one key per line, in ``INSTANCE_FIELDS`` order.

    Vectors are comma separated; floats use ``repr`` so loading is exact.
    Custom context samplers cannot be serialized.
    """
    if spec.context_dist.kind is ContextKind.CUSTOM:
        raise OsomError("instances with a custom context sampler cannot be serialized")
    values = {
        "model_kind": spec.model_kind.value,
        "K": str(spec.K),
        "d": str(spec.d),
        "sigma": repr(float(spec.sigma)),
        "context_kind": spec.context_dist.kind.value,
        "rho_min": repr(float(spec.context_dist.rho_min)),
        "rho_max": repr(float(spec.context_dist.rho_max)),
        "biases": ",".join(repr(float(b)) for b in spec.biases),
        "theta_star": ",".join(repr(float(v)) for v in spec.theta_star),
    }
    return "".join(f"{key}={values[key]}\n" for key in INSTANCE_FIELDS)


def load_instance(text: str) -> InstanceSpec:
    values = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep or key not in INSTANCE_FIELDS:
            raise OsomError(f"bad instance line: {line!r}")
        values[key] = value
    missing = [k for k in INSTANCE_FIELDS if k not in values]
    if missing:
        raise OsomError(f"instance text is missing {missing}")
    biases = [float(v) for v in values["biases"].split(",")]
    theta = [float(v) for v in values["theta_star"].split(",")]
    if len(biases) != int(values["K"]) or len(theta) != int(values["d"]):
        raise OsomError("vector lengths disagree with K and d")
    dist = ContextDistSpec(ContextKind(values["context_kind"]), float(values["rho_min"]), float(values["rho_max"]))
    return InstanceSpec(ModelKind(values["model_kind"]), biases, theta, float(values["sigma"]), dist)
