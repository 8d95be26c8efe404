import numpy as np
import pytest

from cicrl.replay import ReplayBuffer, Transition

# chi-square critical value, 9 degrees of freedom, alpha = 0.001
CHI2_CRIT_9DF = 27.877164871256568


def _t(v, state_dim=2, action_dim=1):
    return Transition(np.full(state_dim, v), np.full(action_dim, v), float(v), np.full(state_dim, v), False)


class TestRing:
    def test_overwrites_oldest_when_full(self):
        buf = ReplayBuffer(2, 2, 1)
        for v in (1, 2, 3):
            buf.push(_t(v))
        assert len(buf) == 2
        held = sorted(buf._rewards.tolist())
        assert held == [2.0, 3.0]

    def test_size_caps_at_capacity(self):
        buf = ReplayBuffer(5, 2, 1)
        for v in range(12):
            buf.push(_t(v))
        assert len(buf) == 5

    def test_single_item_always_sampled(self):
        buf = ReplayBuffer(4, 2, 1)
        buf.push(_t(9))
        batch = buf.sample(3, np.random.default_rng(0))
        assert np.all(batch.rewards == 9.0)
        assert len(batch) == 3

    def test_dim_mismatch_raises(self):
        buf = ReplayBuffer(4, 2, 1)
        with pytest.raises(ValueError):
            buf.push(Transition(np.zeros(3), np.zeros(1), 0.0, np.zeros(2), False))
        with pytest.raises(ValueError):
            buf.push(Transition(np.zeros(2), np.zeros(2), 0.0, np.zeros(2), False))

    def test_nonfinite_reward_rejected(self):
        buf = ReplayBuffer(4, 2, 1)
        with pytest.raises(ValueError):
            buf.push(Transition(np.zeros(2), np.zeros(1), np.inf, np.zeros(2), False))

    def test_empty_sample_raises(self):
        with pytest.raises(ValueError):
            ReplayBuffer(4, 2, 1).sample(1, np.random.default_rng(0))


class TestSampling:
    def test_seeded_determinism(self):
        buf = ReplayBuffer(16, 2, 1)
        for v in range(16):
            buf.push(_t(v))
        a = buf.sample(8, np.random.default_rng(5)).rewards
        b = buf.sample(8, np.random.default_rng(5)).rewards
        np.testing.assert_array_equal(a, b)

    def test_draw_order_preserved(self):
        buf = ReplayBuffer(16, 2, 1)
        for v in range(16):
            buf.push(_t(v))
        rng = np.random.default_rng(3)
        idx = np.random.default_rng(3).integers(0, 16, size=10)
        batch = buf.sample(10, rng)
        np.testing.assert_array_equal(batch.rewards, idx.astype(float))

    def test_uniformity_chi_square(self):
        buf = ReplayBuffer(10, 2, 1)
        for v in range(10):
            buf.push(_t(v))
        rng = np.random.default_rng(2024)
        draws = buf.sample(100_000, rng).rewards.astype(int)
        counts = np.bincount(draws, minlength=10)
        expected = 10_000.0
        chi2 = float(np.sum((counts - expected) ** 2 / expected))
        assert chi2 < CHI2_CRIT_9DF, f"chi2={chi2:.2f} exceeds the 0.001-level critical value"
