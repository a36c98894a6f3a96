"""Experiment orchestration: seeded runs, coupled policy comparisons, regret curves.

Seed derivation (documented so runs can be replayed elsewhere): run ``r`` of
an experiment uses ``seed = base_seed + r``. Its three streams are
``numpy.random.SeedSequence(seed, spawn_key=(stream,))`` for stream 0
(instance), 1 (contexts) and 2 (noise). With independent coupling the
spawn key becomes ``(policy_slot + 1, stream)`` so every policy sees its own
realization; ``policy_slot`` is the policy's index in ``PolicyKind``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .core import (
    AlgoConfig,
    ContextDistSpec,
    ContextKind,
    InstanceSpec,
    ModelKind,
    OsomError,
    PolicyKind,
    RoundLog,
)
from .envelopes import EnvelopeParams
from .environments import Environment, draw_instance
from .policies import make_policy

INSTANCE_STREAM, CONTEXT_STREAM, NOISE_STREAM = 0, 1, 2
POLICY_SLOTS = {kind: i for i, kind in enumerate(PolicyKind)}


def stream_rng(seed: int, stream: int, policy: PolicyKind | None = None) -> np.random.Generator:
    key = (stream,) if policy is None else (POLICY_SLOTS[PolicyKind(policy)] + 1, stream)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def run_single(
    policy_kind: PolicyKind | str,
    instance: InstanceSpec,
    cfg: AlgoConfig,
    seed: int,
    independent: bool = False,
    rounds: int | None = None,
) -> List[RoundLog]:
    """Play one policy; contexts and noise come from ``seed``.

    ``rounds`` defaults to the horizon ``cfg.n`` and may stop the run earlier
    (``rounds = K`` plays only the warm-up). Envelopes always use ``cfg.n``.
    """
    kind = PolicyKind(policy_kind)
    rounds = cfg.n if rounds is None else rounds
    if not 0 <= rounds <= cfg.n:
        raise OsomError(f"rounds must lie in [0, n={cfg.n}], got {rounds}")
    p = EnvelopeParams.from_instance(instance, cfg)
    policy = make_policy(kind, p, cfg.radius_mode, cfg.maximizer_tol)
    owner = kind if independent else None
    env = Environment(instance, stream_rng(seed, CONTEXT_STREAM, owner), stream_rng(seed, NOISE_STREAM, owner))
    logs = []
    for t in range(1, rounds + 1):
        slate = env.sample_slate(t)
        decision = policy.select(t, slate)
        reward = env.draw_reward(t, decision.arm)
        policy.observe(t, decision.arm, reward, slate)
        logs.append(
            RoundLog(t, decision.arm, reward, decision.mode, decision.optimistic_value, env.inst_regret(t, decision.arm))
        )
    return logs


def cumulative_regret(logs: Sequence[RoundLog]) -> np.ndarray:
    return np.cumsum([log.inst_regret for log in logs])


def switch_round(logs: Sequence[RoundLog]) -> int | None:
    """First round played in complex mode by a policy that started simple."""
    if not logs or logs[0].mode is not ModelKind.SIMPLE:
        return None
    for log in logs:
        if log.mode is ModelKind.COMPLEX:
            return log.round
    return None


@dataclass(frozen=True)
class ExperimentSpec:
    model_kind: ModelKind
    K: int
    d: int
    sigma: float
    policies: Tuple[PolicyKind, ...]
    runs: int
    base_seed: int
    algo_config: AlgoConfig
    context_kind: ContextKind = ContextKind.UNIT_SPHERE
    rho_min: float | None = None
    rho_max: float | None = None
    coupled: bool = True

    def __post_init__(self):
        object.__setattr__(self, "model_kind", ModelKind(self.model_kind))
        object.__setattr__(self, "context_kind", ContextKind(self.context_kind))
        object.__setattr__(self, "policies", tuple(PolicyKind(k) for k in self.policies))
        if self.runs < 1:
            raise OsomError(f"runs must be >= 1, got {self.runs}")
        if self.context_kind is ContextKind.CUSTOM:
            raise OsomError("experiments support sphere and hypercube contexts only")
        if len(set(self.policies)) != len(self.policies):
            raise OsomError(f"duplicate policies: {self.policies}")
        self.algo_config.check_arms(self.K)
        self.context_dist()  # validate rho bounds early

    @property
    def n(self) -> int:
        return self.algo_config.n

    def context_dist(self) -> ContextDistSpec:
        base = ContextDistSpec.default(self.context_kind, self.d)
        rho_min = base.rho_min if self.rho_min is None else self.rho_min
        rho_max = base.rho_max if self.rho_max is None else self.rho_max
        return ContextDistSpec(self.context_kind, rho_min, rho_max)

    @property
    def seeds(self) -> List[int]:
        return [self.base_seed + r for r in range(self.runs)]

    def instance_for(self, seed: int, policy: PolicyKind | None = None) -> InstanceSpec:
        owner = None if self.coupled else policy
        rng = stream_rng(seed, INSTANCE_STREAM, owner)
        return draw_instance(self.model_kind, self.K, self.d, self.sigma, rng, self.context_dist())


@dataclass
class AggregateCurve:
    policy: PolicyKind
    t_grid: np.ndarray
    mean_regret: np.ndarray
    stderr: np.ndarray
    switch_rounds: List[int] = field(default_factory=list)
    runs: int = 0

    @property
    def final_mean(self) -> float:
        return float(self.mean_regret[-1])

    @property
    def final_stderr(self) -> float:
        return float(self.stderr[-1])


def aggregate(policy: PolicyKind, runs: Sequence[Tuple[int, List[RoundLog]]]) -> AggregateCurve:
    """Mean and standard error of cumulative regret over runs, taken in seed order."""
    runs = sorted(runs, key=lambda item: item[0])
    curves = np.array([cumulative_regret(logs) for _, logs in runs])
    n_runs, n = curves.shape
    mean = curves.mean(axis=0)
    if n_runs > 1:
        stderr = curves.std(axis=0, ddof=1) / math.sqrt(n_runs)
    else:
        stderr = np.zeros(n)
    switches = [s for s in (switch_round(logs) for _, logs in runs) if s is not None]
    return AggregateCurve(PolicyKind(policy), np.arange(1, n + 1), mean, stderr, switches, n_runs)


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    curves: List[AggregateCurve]
    # policy -> [(seed, logs)] in seed order
    runs: Dict[PolicyKind, List[Tuple[int, List[RoundLog]]]]


def _run_task(args) -> List[RoundLog]:
    spec, kind, seed = args
    instance = spec.instance_for(seed, kind)
    return run_single(kind, instance, spec.algo_config, seed, independent=not spec.coupled)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Run every (policy, seed) pair and aggregate per policy.

    Results are laid out by (policy, seed) before aggregation, so ``workers > 1``
    gives results identical to a serial run.
    """
    tasks = [(spec, kind, seed) for kind in spec.policies for seed in spec.seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        outputs = [_run_task(task) for task in tasks]

    runs: Dict[PolicyKind, List[Tuple[int, List[RoundLog]]]] = {kind: [] for kind in spec.policies}
    for (_, kind, seed), logs in zip(tasks, outputs):
        runs[kind].append((seed, logs))
    curves = [aggregate(kind, runs[kind]) for kind in spec.policies]
    return ExperimentResult(spec, curves, runs)
