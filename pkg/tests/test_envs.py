import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cicrl.envs import EnvSpec, PendulumSwingup, env_names, make_env


class TestContract:
    @pytest.mark.parametrize("name", env_names())
    def test_reset_determinism(self, name):
        env = make_env(name)
        s1 = env.reset(seed=42)
        s2 = make_env(name).reset(seed=42)
        np.testing.assert_array_equal(s1, s2)
        assert s1.shape == (env.spec.state_dim,)

    @pytest.mark.parametrize("name", env_names())
    def test_rollout_determinism_bit_exact(self, name):
        rng = np.random.default_rng(7)
        actions = rng.uniform(-1, 1, size=(50, make_env(name).spec.action_dim))
        traces = []
        for _ in range(2):
            env = make_env(name)
            env.reset(seed=3)
            trace = []
            for a in actions:
                r = env.step(a)
                trace.append((r.next_state.copy(), r.reward, r.terminated, r.truncated))
                if r.terminated or r.truncated:
                    break
            traces.append(trace)
        for (s1, r1, t1, c1), (s2, r2, t2, c2) in zip(*traces):
            assert np.array_equal(s1, s2) and r1 == r2 and t1 == t2 and c1 == c2

    @pytest.mark.parametrize("name", env_names())
    def test_truncates_exactly_at_step_cap(self, name):
        env = make_env(name)
        env.reset(seed=0)
        zero = np.zeros(env.spec.action_dim)
        for k in range(1, env.spec.max_episode_steps + 1):
            res = env.step(zero)
            if res.terminated:
                break
            assert res.truncated == (k == env.spec.max_episode_steps)
        assert res.terminated or res.truncated

    @pytest.mark.parametrize("name", env_names())
    def test_step_after_done_raises(self, name):
        env = make_env(name)
        env.reset(seed=0)
        zero = np.zeros(env.spec.action_dim)
        while True:
            res = env.step(zero)
            if res.terminated or res.truncated:
                break
        with pytest.raises(RuntimeError):
            env.step(zero)

    def test_step_before_reset_raises(self):
        env = make_env("pendulum")
        with pytest.raises(RuntimeError):
            env.step([0.0])

    def test_action_dim_checked(self):
        env = make_env("pendulum")
        env.reset(seed=0)
        with pytest.raises(ValueError):
            env.step([0.0, 1.0])

    def test_unknown_name_raises(self):
        with pytest.raises(ValueError, match="unknown environment"):
            make_env("cartpole")

    @given(seed=st.integers(0, 2**32 - 1), name=st.sampled_from(env_names()))
    @settings(max_examples=30, deadline=None)
    def test_states_and_rewards_stay_finite(self, seed, name):
        env = make_env(name)
        state = env.reset(seed=seed)
        rng = np.random.default_rng(seed + 1)
        for _ in range(200):
            a = rng.uniform(-10, 10, size=env.spec.action_dim)  # out-of-bound on purpose
            res = env.step(a)
            assert np.all(np.isfinite(res.next_state)) and np.isfinite(res.reward)
            if res.terminated or res.truncated:
                break

    def test_env_spec_validation(self):
        with pytest.raises(ValueError):
            EnvSpec(state_dim=0, action_dim=1, action_bound=1.0, max_episode_steps=10)


class TestPendulum:
    def test_initial_ranges(self):
        for seed in range(200):
            env = PendulumSwingup()
            env.reset(seed=seed)
            assert -np.pi <= env._theta <= np.pi
            assert -1.0 <= env._theta_dot <= 1.0

    def test_upright_rest_is_fixed_point_with_zero_reward(self):
        env = PendulumSwingup()
        env.reset(seed=0)
        env._theta, env._theta_dot = 0.0, 0.0
        res = env.step([0.0])
        assert res.reward == 0.0
        np.testing.assert_array_equal(res.next_state, [1.0, 0.0, 0.0])

    def test_reward_formula_at_hanging_rest(self):
        # reward uses the pre-step state: theta=pi, theta_dot=0, u=0 -> -pi^2
        env = PendulumSwingup()
        env.reset(seed=0)
        env._theta, env._theta_dot = np.pi, 0.0
        res = env.step([0.0])
        assert res.reward == pytest.approx(-np.pi**2, rel=1e-12)

    def test_reward_formula_general_point(self):
        env = PendulumSwingup()
        env.reset(seed=0)
        th, thd, u = 2.0, -3.0, 1.5
        env._theta, env._theta_dot = th, thd
        res = env.step([u])
        assert res.reward == pytest.approx(-(th**2 + 0.1 * thd**2 + 0.001 * u**2), rel=1e-12)

    def test_action_clip_before_dynamics(self):
        env1 = PendulumSwingup()
        env2 = PendulumSwingup()
        s1 = env1.reset(seed=5)
        s2 = env2.reset(seed=5)
        np.testing.assert_array_equal(s1, s2)
        r1 = env1.step([100.0])
        r2 = env2.step([2.0])
        np.testing.assert_array_equal(r1.next_state, r2.next_state)
        # reward differs: the cost term uses the clipped torque
        assert r1.reward == r2.reward

    def test_speed_clipped_to_eight(self):
        env = PendulumSwingup()
        env.reset(seed=0)
        env._theta, env._theta_dot = np.pi / 2, 7.9
        for _ in range(20):
            env.step([2.0])
        assert abs(env._theta_dot) <= 8.0


class TestMountainCar:
    def test_initial_range(self):
        for seed in range(100):
            env = make_env("mountaincar")
            env.reset(seed=seed)
            assert -0.6 <= env._position <= -0.4
            assert env._velocity == 0.0

    def test_goal_terminates_with_bonus(self):
        env = make_env("mountaincar")
        env.reset(seed=0)
        env._position, env._velocity = 0.449, 0.05
        res = env.step([1.0])
        assert res.terminated
        assert res.reward == pytest.approx(100.0 - 0.1)

    def test_idle_step_costs_nothing(self):
        env = make_env("mountaincar")
        env.reset(seed=0)
        res = env.step([0.0])
        assert res.reward == 0.0


class TestReacher:
    def test_initial_position_within_box(self):
        for seed in range(100):
            env = make_env("reacher")
            s = env.reset(seed=seed)
            assert np.all(np.abs(s[:2]) <= 1.0)
            assert np.all(s[2:4] == 0.0)
            assert np.all(np.abs(s[4:]) <= 1.0)

    def test_reward_is_negative_distance(self):
        env = make_env("reacher")
        env.reset(seed=1)
        env._pos = np.array([0.5, 0.0])
        env._vel = np.zeros(2)
        env._goal = np.array([0.5, 0.4])
        res = env.step([0.0, 0.0])
        assert res.reward == pytest.approx(-0.4, rel=1e-12)
