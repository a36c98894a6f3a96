import numpy as np
import pytest

from osom.core import AlgoConfig, ContextDistSpec, ContextKind, InstanceSpec, ModelKind, OsomError
from osom.environments import (
    INSTANCE_FIELDS,
    Environment,
    draw_instance,
    dump_instance,
    load_instance,
    sample_contexts,
)
from osom.harness import run_single, stream_rng

from conftest import sphere_instance


def _env(spec, seed=0):
    return Environment(spec, np.random.default_rng([seed, 1]), np.random.default_rng([seed, 2]))


@pytest.mark.parametrize("kind", [ContextKind.UNIT_SPHERE, ContextKind.HYPERCUBE])
def test_unit_norm_contexts(kind, rng):
    for d in (1, 3, 50):
        vectors = sample_contexts(ContextDistSpec.default(kind, d), rng, 7, d)
        assert vectors.shape == (7, d)
        np.testing.assert_allclose(np.linalg.norm(vectors, axis=1), 1.0, atol=1e-12)


def test_hypercube_support(rng):
    vectors = sample_contexts(ContextDistSpec.default(ContextKind.HYPERCUBE, 4), rng, 1000, 4)
    np.testing.assert_array_equal(np.unique(vectors), [-0.5, 0.5])


def test_sphere_moments(rng):
    d = 10
    samples = sample_contexts(ContextDistSpec.default(ContextKind.UNIT_SPHERE, d), rng, 10**5, d)
    assert np.linalg.norm(samples.mean(axis=0)) <= 0.02
    lam = np.linalg.eigvalsh(np.cov(samples.T))
    assert 0.9 / d <= lam.min() and lam.max() <= 1.1 / d


def test_custom_sampler(rng):
    fixed = np.array([[0.6, 0.8], [1.0, 0.0]])
    dist = ContextDistSpec(ContextKind.CUSTOM, 0.5, 0.5, sampler=lambda g, K, d: fixed)
    np.testing.assert_array_equal(sample_contexts(dist, rng, 2, 2), fixed)


def test_noiseless_simple_reward():
    env = _env(sphere_instance([0.4, -0.2], sigma=0.0, d=3))
    env.sample_slate(1)
    assert env.draw_reward(1, 0) == 0.4


def test_noiseless_complex_reward():
    dist = ContextDistSpec(ContextKind.CUSTOM, 0.5, 0.5, sampler=lambda g, K, d: np.eye(2))
    spec = InstanceSpec(ModelKind.COMPLEX, [0.0, 0.3], [1.0, 0.0], 0.0, dist)
    env = _env(spec)
    env.sample_slate(1)
    assert env.draw_reward(1, 0) == 1.0
    assert env.draw_reward(1, 1) == 0.3


def test_reward_clt():
    spec = sphere_instance([0.25, -0.5], theta=[0.0, 0.0, 0.0], sigma=1.0)
    env = _env(spec, seed=5)
    n = 10**5
    draws = np.empty(n)
    for t in range(1, n + 1):
        env.sample_slate(t)
        draws[t - 1] = env.draw_reward(t, 1)
    assert abs(draws.mean() + 0.5) <= 3 / np.sqrt(n)


def test_simple_regret_is_gap():
    env = _env(sphere_instance([0.5, 0.1], d=2))
    env.sample_slate(1)
    assert env.inst_regret(1, 1) == pytest.approx(0.4)
    assert env.inst_regret(1, 0) == 0.0


def test_complex_regret_uses_slate_argmax(rng):
    spec = draw_instance("complex", 4, 3, 2.0, rng)
    env = _env(spec)
    for t in range(1, 50):
        env.sample_slate(t)
        means = env.mean_rewards(t)
        regrets = [env.inst_regret(t, a) for a in range(4)]
        assert min(regrets) == 0.0 and all(r >= 0 for r in regrets)
        assert regrets[int(np.argmax(means))] == 0.0


def test_regret_ignores_noise():
    spec = sphere_instance([0.1, 0.7, -0.3], theta=[0.0, 0.6, 0.8], sigma=1.0)
    quiet = InstanceSpec(spec.model_kind, spec.biases, spec.theta_star, 0.0, spec.context_dist)
    a = Environment(spec, np.random.default_rng(1), np.random.default_rng(2))
    b = Environment(quiet, np.random.default_rng(1), np.random.default_rng(99))
    for t in range(1, 30):
        a.sample_slate(t)
        b.sample_slate(t)
        for arm in range(3):
            assert a.inst_regret(t, arm) == b.inst_regret(t, arm)


def test_slates_in_order():
    env = _env(sphere_instance([0.0, 0.0], d=2))
    env.sample_slate(1)
    with pytest.raises(OsomError):
        env.sample_slate(3)
    with pytest.raises(OsomError):
        env.draw_reward(2, 0)


def test_draw_instance_ranges(rng):
    for _ in range(50):
        spec = draw_instance("complex", 5, 7, 1.0, rng)
        assert np.all(np.abs(spec.biases) < 1)
        assert np.linalg.norm(spec.theta_star) == pytest.approx(1.0)
    assert not draw_instance("simple", 5, 7, 1.0, rng).theta_star.any()


def test_contexts_exogenous():
    """The context stream does not depend on which arms a policy plays."""
    spec = draw_instance("complex", 3, 4, 1.0, np.random.default_rng(0))
    seen = {}
    for kind in ("ucb", "oful", "osom"):
        env = Environment(spec, stream_rng(8, 1), stream_rng(8, 2))
        slates = []
        for t in range(1, 40):
            slates.append(env.sample_slate(t).vectors.copy())
            env.draw_reward(t, t % 3 if kind == "ucb" else 0)
        seen[kind] = np.array(slates)
    np.testing.assert_array_equal(seen["ucb"], seen["oful"])
    np.testing.assert_array_equal(seen["ucb"], seen["osom"])


def test_cumulative_regret_nondecreasing():
    spec = draw_instance("complex", 3, 4, 1.0, np.random.default_rng(4))
    logs = run_single("ucb", spec, AlgoConfig(0.05, 100), 3)
    assert np.all(np.diff(np.cumsum([log.inst_regret for log in logs])) >= 0)


def test_dump_load_round_trip(rng):
    spec = draw_instance("complex", 4, 6, 0.7, rng)
    text = dump_instance(spec)
    assert [line.split("=")[0] for line in text.splitlines()] == list(INSTANCE_FIELDS)
    back = load_instance(text)
    np.testing.assert_array_equal(back.biases, spec.biases)
    np.testing.assert_array_equal(back.theta_star, spec.theta_star)
    assert back.sigma == spec.sigma and back.context_dist == spec.context_dist
    assert dump_instance(back) == text


def test_dump_rejects_custom():
    dist = ContextDistSpec(ContextKind.CUSTOM, 0.5, 0.5, sampler=lambda g, K, d: np.eye(2))
    with pytest.raises(OsomError):
        dump_instance(InstanceSpec(ModelKind.SIMPLE, [0.0, 0.0], [0.0, 0.0], 1.0, dist))


def test_load_rejects_garbage():
    with pytest.raises(OsomError):
        load_instance("model_kind=simple\nbogus=1\n")
