"""Baseline actor-critic algorithms: TD3, QMD3, SAC, and REDQ.

Target computations take the batch's next-actions as an argument, so any
caller can choose the action source: the baseline loop feeds its own actor
(or actor target), while the dual-actor wrapper injects a mix of two
policies. Targets are always computed with gradients blocked.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import metrics
from .envs import EnvSpec, env_factory
from .errors import ConfigError, NumericsError
from .numkit import (
    AdamState,
    MlpParams,
    MlpSpec,
    adam_step,
    adam_update_flat,
    init_params,
    mlp_backward,
    mlp_forward,
    mlp_forward_batch,
    mlp_forward_cached,
    soft_update,
    squash,
)
from .replay import Batch, ReplayBuffer, Transition
from .seeding import COLLECT_STREAM, INIT_STREAM, UPDATE_STREAM, eval_seed, stream_rng

ALGOS = ("td3", "qmd3", "sac", "redq")

FINAL_EVAL_ORDINAL = 2**31 - 1


@dataclass
class AlgoHyper:
    """Per-algorithm hyperparameters; fields that do not apply stay None."""

    algo: str
    num_critics: int = 2
    gamma: float = 0.99
    tau: float = 5e-3
    batch_size: int = 256
    learning_rate: float = 3e-4
    delay_frequency: int | None = None
    exploration_noise_std: float | None = None
    target_policy_noise_std: float | None = None
    policy_noise_clip: tuple[float, float] | None = None
    target_entropy: float | None = None
    ensemble_subset_size: int | None = None
    warmup_steps: int = 25000
    utd_ratio: int = 1
    log_std_clip: tuple[float, float] = (-20.0, 2.0)
    hidden_sizes: tuple[int, ...] = (64, 64)
    hidden_activation: str = "relu"

    @property
    def deterministic(self) -> bool:
        return self.algo in ("td3", "qmd3")

    @classmethod
    def defaults(cls, algo: str, action_dim: int) -> "AlgoHyper":
        if algo == "td3":
            return cls("td3", num_critics=2, delay_frequency=2, exploration_noise_std=0.1,
                       target_policy_noise_std=0.2, policy_noise_clip=(-0.5, 0.5), warmup_steps=25000)
        if algo == "qmd3":
            return cls("qmd3", num_critics=4, delay_frequency=2, exploration_noise_std=0.1,
                       target_policy_noise_std=0.2, policy_noise_clip=(-0.5, 0.5), warmup_steps=25000)
        if algo == "sac":
            return cls("sac", num_critics=2, target_entropy=-float(action_dim), warmup_steps=10000)
        if algo == "redq":
            return cls("redq", num_critics=10, target_entropy=-float(action_dim),
                       ensemble_subset_size=2, warmup_steps=5000)
        raise ConfigError(f"unknown algorithm {algo!r}; available: {ALGOS}")

    def override(self, **kw) -> "AlgoHyper":
        return replace(self, **kw)

    def validate(self) -> None:
        if self.algo not in ALGOS:
            raise ConfigError(f"unknown algorithm {self.algo!r}; available: {ALGOS}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must lie in [0, 1], got {self.gamma}")
        if not 0.0 <= self.tau <= 1.0:
            raise ConfigError(f"tau must lie in [0, 1], got {self.tau}")
        if self.batch_size < 1 or self.learning_rate <= 0 or self.warmup_steps < 0 or self.utd_ratio < 1:
            raise ConfigError("batch_size/learning_rate/warmup_steps/utd_ratio out of range")
        if self.deterministic:
            needed = (self.delay_frequency, self.exploration_noise_std,
                      self.target_policy_noise_std, self.policy_noise_clip)
            if any(v is None for v in needed):
                raise ConfigError(f"{self.algo} needs delay_frequency and the three noise settings")
            if self.target_entropy is not None or self.ensemble_subset_size is not None:
                raise ConfigError(f"{self.algo} takes no temperature or ensemble-subset settings")
            if self.algo == "td3" and self.num_critics != 2:
                raise ConfigError("td3 uses exactly 2 critics")
            if self.num_critics < 2:
                raise ConfigError("qmd3 needs at least 2 critics")
        else:
            noisy = (self.delay_frequency, self.exploration_noise_std,
                     self.target_policy_noise_std, self.policy_noise_clip)
            if any(v is not None for v in noisy):
                raise ConfigError(f"{self.algo} takes no action-noise or delay settings")
            if self.target_entropy is None:
                raise ConfigError(f"{self.algo} needs a target_entropy")
            if self.algo == "sac":
                if self.num_critics != 2:
                    raise ConfigError("sac uses exactly 2 critics")
                if self.ensemble_subset_size is not None:
                    raise ConfigError("sac takes no ensemble-subset setting")
            else:
                if self.ensemble_subset_size is None:
                    raise ConfigError("redq needs an ensemble_subset_size")
                if self.ensemble_subset_size > self.num_critics:
                    raise ConfigError("ensemble_subset_size cannot exceed the number of critics")


class CriticEnsemble:
    """Online critics with slow-moving target copies and per-critic Adam state."""

    def __init__(self, spec: MlpSpec, online, target, adam):
        self.spec = spec
        self.online = online
        self.target = target
        self.adam = adam

    @classmethod
    def create(cls, state_dim: int, action_dim: int, hyper: AlgoHyper, rng) -> "CriticEnsemble":
        spec = MlpSpec((state_dim + action_dim, *hyper.hidden_sizes, 1), hyper.hidden_activation)
        online = [init_params(spec, rng) for _ in range(hyper.num_critics)]
        target = [p.copy() for p in online]
        adam = [AdamState.for_params(p, lr=hyper.learning_rate) for p in online]
        return cls(spec, online, target, adam)

    def __len__(self):
        return len(self.online)

    def target_q(self, x: np.ndarray, indices=None) -> np.ndarray:
        """Stacked target-critic values, shape (n_selected, batch)."""
        sel = self.target if indices is None else [self.target[i] for i in indices]
        return np.stack([mlp_forward_batch(p, x)[:, 0] for p in sel])

    def soft_update_targets(self, tau: float) -> None:
        for tgt, onl in zip(self.target, self.online):
            soft_update(tgt, onl, tau)


class TemperatureState:
    """Entropy temperature alpha = exp(log_alpha) with its own Adam state."""

    __slots__ = ("log_alpha", "adam", "target_entropy")

    def __init__(self, target_entropy: float, lr: float):
        self.log_alpha = np.zeros(1)
        self.adam = AdamState(1, lr=lr)
        self.target_entropy = float(target_entropy)

    @property
    def alpha(self) -> float:
        return float(np.exp(self.log_alpha[0]))


class DeterministicPolicy:
    """Bounded deterministic actor, optionally with Gaussian exploration noise."""

    def __init__(self, params: MlpParams, exploration_noise_std: float | None = None):
        self.params = params
        self.noise_std = exploration_noise_std
        self.bound = params.spec.action_bound

    def act(self, state, rng=None, explore: bool = False) -> np.ndarray:
        a = mlp_forward(self.params, state)
        if explore and self.noise_std:
            a = a + rng.normal(0.0, self.noise_std, size=a.shape)
        return np.clip(a, -self.bound, self.bound)


class SquashedGaussianPolicy:
    """Stochastic tanh-squashed Gaussian actor; mean action when not exploring."""

    def __init__(self, params: MlpParams, action_bound: float):
        self.params = params
        self.bound = float(action_bound)

    def act(self, state, rng=None, explore: bool = False) -> np.ndarray:
        out = mlp_forward(self.params, state)
        if not explore:
            return squash.mean_action(out, self.bound)
        eps = rng.standard_normal(out.size // 2)
        action, _, _ = squash.sample(out[None, :], eps[None, :], self.bound)
        return action[0]


def _critic_input(states: np.ndarray, actions: np.ndarray) -> np.ndarray:
    return np.concatenate([states, actions], axis=1)


def _smoothed(next_actions: np.ndarray, hyper: AlgoHyper, action_bound: float, rng) -> np.ndarray:
    noise = rng.normal(0.0, hyper.target_policy_noise_std, size=next_actions.shape)
    lo, hi = hyper.policy_noise_clip
    return np.clip(next_actions + np.clip(noise, lo, hi), -action_bound, action_bound)


def _bootstrap(batch: Batch, gamma: float, tail: np.ndarray) -> np.ndarray:
    return batch.rewards + gamma * (1.0 - batch.terminals) * tail


def td3_target(batch: Batch, next_actions, ensemble: CriticEnsemble, hyper: AlgoHyper,
               action_bound: float, rng) -> np.ndarray:
    """Twin-min bootstrap with clipped smoothing noise on the next-actions."""
    if len(ensemble) != 2:
        raise ConfigError(f"td3 target needs exactly 2 critics, ensemble has {len(ensemble)}")
    a = _smoothed(next_actions, hyper, action_bound, rng)
    q = ensemble.target_q(_critic_input(batch.next_states, a))
    return _bootstrap(batch, hyper.gamma, np.minimum(q[0], q[1]))


def qmd3_target(batch: Batch, next_actions, ensemble: CriticEnsemble, hyper: AlgoHyper,
                action_bound: float, rng) -> np.ndarray:
    """Lower-median bootstrap: ascending sort, pick the floor(q/2)-th value (1-based)."""
    if len(ensemble) < 2:
        raise ConfigError(f"qmd3 target needs at least 2 critics, ensemble has {len(ensemble)}")
    a = _smoothed(next_actions, hyper, action_bound, rng)
    q = ensemble.target_q(_critic_input(batch.next_states, a))
    pick = np.sort(q, axis=0)[len(ensemble) // 2 - 1]
    return _bootstrap(batch, hyper.gamma, pick)


def sac_target(batch: Batch, next_actions, next_log_probs, ensemble: CriticEnsemble,
               temperature: TemperatureState, hyper: AlgoHyper) -> np.ndarray:
    """Twin-min soft bootstrap: entropy bonus subtracted from the critic value."""
    if next_log_probs is None:
        raise ValueError("sac target needs the log-probabilities of the sampled next-actions")
    q = ensemble.target_q(_critic_input(batch.next_states, next_actions))
    soft = np.min(q, axis=0) - temperature.alpha * next_log_probs
    return _bootstrap(batch, hyper.gamma, soft)


def redq_target(batch: Batch, next_actions, next_log_probs, ensemble: CriticEnsemble,
                temperature: TemperatureState, hyper: AlgoHyper, rng) -> np.ndarray:
    """Soft bootstrap over one random critic subset, drawn per minibatch."""
    if next_log_probs is None:
        raise ValueError("redq target needs the log-probabilities of the sampled next-actions")
    m = hyper.ensemble_subset_size
    if m > len(ensemble):
        raise ConfigError(f"subset size {m} exceeds ensemble size {len(ensemble)}")
    subset = rng.choice(len(ensemble), size=m, replace=False)
    q = ensemble.target_q(_critic_input(batch.next_states, next_actions), indices=subset)
    soft = np.min(q, axis=0) - temperature.alpha * next_log_probs
    return _bootstrap(batch, hyper.gamma, soft)


def critic_update(ensemble: CriticEnsemble, batch: Batch, targets: np.ndarray,
                  hyper: AlgoHyper) -> float:
    """One Adam step per online critic on the MSE against fixed targets."""
    if len(batch) != targets.shape[0]:
        raise ValueError("batch size and target vector length differ")
    x = _critic_input(batch.states, batch.actions)
    n = len(batch)
    losses = []
    for i, (critic, state) in enumerate(zip(ensemble.online, ensemble.adam)):
        q, cache = mlp_forward_cached(critic, x)
        err = q[:, 0] - targets
        loss = float(np.mean(err * err))
        if not np.isfinite(loss):
            raise NumericsError(
                f"critic {i} loss is {loss!r} (|q| max {np.max(np.abs(q)):.3g}, "
                f"|target| max {np.max(np.abs(targets)):.3g})"
            )
        d_y = (2.0 / n) * err[:, None]
        grads, _ = mlp_backward(critic, cache, d_y, want_input=False)
        adam_step(critic, grads, state)
        losses.append(loss)
    return float(np.mean(losses))


def actor_update_deterministic(actor: MlpParams, actor_adam: AdamState,
                               ensemble: CriticEnsemble, batch: Batch) -> float:
    """Ascend the first critic's value at the actor's own actions (one Adam step)."""
    n = len(batch)
    actions, actor_cache = mlp_forward_cached(actor, batch.states)
    x = _critic_input(batch.states, actions)
    q, critic_cache = mlp_forward_cached(ensemble.online[0], x)
    d_q = np.full((n, 1), -1.0 / n)
    _, d_x = mlp_backward(ensemble.online[0], critic_cache, d_q, want_param=False)
    d_actions = d_x[:, batch.states.shape[1]:]
    grads, _ = mlp_backward(actor, actor_cache, d_actions, want_input=False)
    adam_step(actor, grads, actor_adam)
    return float(-np.mean(q))


def actor_update_stochastic(actor: MlpParams, actor_adam: AdamState, ensemble: CriticEnsemble,
                            temperature: TemperatureState, batch: Batch, hyper: AlgoHyper,
                            action_bound: float, rng) -> float:
    """Reparameterized policy step plus the temperature step (log-probs held fixed).

    The critic term is the per-row minimum of both critics for sac and the
    mean over the whole ensemble for redq.
    """
    n = len(batch)
    out, actor_cache = mlp_forward_cached(actor, batch.states)
    eps = rng.standard_normal((n, out.shape[1] // 2))
    actions, log_probs, squashed = squash.sample(out, eps, action_bound)
    x = _critic_input(batch.states, actions)
    state_dim = batch.states.shape[1]
    alpha = temperature.alpha

    if hyper.algo == "sac":
        q0, c0 = mlp_forward_cached(ensemble.online[0], x)
        q1, c1 = mlp_forward_cached(ensemble.online[1], x)
        take0 = q0[:, 0] <= q1[:, 0]
        q_bar = np.where(take0, q0[:, 0], q1[:, 0])
        d0 = np.where(take0, -1.0 / n, 0.0)[:, None]
        d1 = np.where(take0, 0.0, -1.0 / n)[:, None]
        _, dx0 = mlp_backward(ensemble.online[0], c0, d0, want_param=False)
        _, dx1 = mlp_backward(ensemble.online[1], c1, d1, want_param=False)
        d_actions = dx0[:, state_dim:] + dx1[:, state_dim:]
    else:
        k = len(ensemble)
        q_sum = np.zeros(n)
        d_actions = np.zeros_like(actions)
        d_q = np.full((n, 1), -1.0 / (n * k))
        for critic in ensemble.online:
            q, cache = mlp_forward_cached(critic, x)
            q_sum += q[:, 0]
            _, d_x = mlp_backward(critic, cache, d_q, want_param=False)
            d_actions += d_x[:, state_dim:]
        q_bar = q_sum / k

    d_logp = np.full(n, alpha / n)
    d_out = squash.backward(out, eps, squashed, d_actions, d_logp, action_bound)
    grads, _ = mlp_backward(actor, actor_cache, d_out, want_input=False)
    adam_step(actor, grads, actor_adam)

    temp_grad = np.array([-np.mean(log_probs + temperature.target_entropy)])
    adam_update_flat(temperature.log_alpha, temp_grad, temperature.adam)
    return float(np.mean(alpha * log_probs - q_bar))


class Agent:
    """Networks and optimizer state for one training run of a given algorithm."""

    def __init__(self, env_spec: EnvSpec, hyper: AlgoHyper, rng, use_actor_target: bool = False):
        hyper.validate()
        self.hyper = hyper
        self.env_spec = env_spec
        s, a = env_spec.state_dim, env_spec.action_dim
        if hyper.deterministic:
            actor_spec = MlpSpec((s, *hyper.hidden_sizes, a), hyper.hidden_activation,
                                 head="tanh_scaled", action_bound=env_spec.action_bound)
        else:
            actor_spec = MlpSpec((s, *hyper.hidden_sizes, a), hyper.hidden_activation,
                                 head="gaussian", log_std_clip=hyper.log_std_clip)
        self.actor = init_params(actor_spec, rng)
        self.actor_adam = AdamState.for_params(self.actor, lr=hyper.learning_rate)
        self.actor_target = self.actor.copy() if (use_actor_target and hyper.deterministic) else None
        self.ensemble = CriticEnsemble.create(s, a, hyper, rng)
        self.temperature = None if hyper.deterministic else TemperatureState(
            hyper.target_entropy, hyper.learning_rate)

    @property
    def deterministic(self) -> bool:
        return self.hyper.deterministic

    def collect_policy(self):
        if self.deterministic:
            return DeterministicPolicy(self.actor, self.hyper.exploration_noise_std)
        return SquashedGaussianPolicy(self.actor, self.env_spec.action_bound)

    def greedy_policy(self, params: MlpParams | None = None):
        params = self.actor if params is None else params
        if self.deterministic:
            return DeterministicPolicy(params)
        return SquashedGaussianPolicy(params, self.env_spec.action_bound)

    def next_actions(self, next_states: np.ndarray, rng, source: MlpParams | None = None):
        """Next-actions (and log-probs for stochastic actors) for target computation."""
        if source is None:
            source = self.actor_target if self.actor_target is not None else self.actor
        if self.deterministic:
            return mlp_forward_batch(source, next_states), None
        out = mlp_forward_batch(source, next_states)
        eps = rng.standard_normal((next_states.shape[0], out.shape[1] // 2))
        actions, log_probs, _ = squash.sample(out, eps, self.env_spec.action_bound)
        return actions, log_probs

    def compute_targets(self, batch: Batch, next_actions, next_log_probs, rng) -> np.ndarray:
        bound = self.env_spec.action_bound
        if self.hyper.algo == "td3":
            return td3_target(batch, next_actions, self.ensemble, self.hyper, bound, rng)
        if self.hyper.algo == "qmd3":
            return qmd3_target(batch, next_actions, self.ensemble, self.hyper, bound, rng)
        if self.hyper.algo == "sac":
            return sac_target(batch, next_actions, next_log_probs, self.ensemble,
                              self.temperature, self.hyper)
        return redq_target(batch, next_actions, next_log_probs, self.ensemble,
                           self.temperature, self.hyper, rng)

    def update_critics(self, batch: Batch, targets: np.ndarray) -> float:
        return critic_update(self.ensemble, batch, targets, self.hyper)

    def update_actor(self, batch: Batch, rng) -> float:
        if self.deterministic:
            loss = actor_update_deterministic(self.actor, self.actor_adam, self.ensemble, batch)
            if self.actor_target is not None:
                soft_update(self.actor_target, self.actor, self.hyper.tau)
            return loss
        return actor_update_stochastic(self.actor, self.actor_adam, self.ensemble,
                                       self.temperature, batch, self.hyper,
                                       self.env_spec.action_bound, rng)

    def soft_update_critic_targets(self) -> None:
        self.ensemble.soft_update_targets(self.hyper.tau)


def _collect_episode(env, policy, buffer: ReplayBuffer, rng, explore: bool):
    """One full episode; every transition is pushed. Returns (return, steps)."""
    state = env.reset(seed=int(rng.integers(0, 2**63 - 1)))
    total, steps = 0.0, 0
    while True:
        action = policy.act(state, rng, explore=explore)
        res = env.step(action)
        buffer.push(Transition(state, action, res.reward, res.next_state, res.terminated))
        total += res.reward
        steps += 1
        state = res.next_state
        if res.terminated or res.truncated:
            return total, steps


class _UniformPolicy:
    def __init__(self, action_dim, bound):
        self.action_dim = action_dim
        self.bound = bound

    def act(self, state, rng=None, explore=False):
        return rng.uniform(-self.bound, self.bound, size=self.action_dim)


def train_baseline(env, hyper: AlgoHyper, total_steps: int, seed: int,
                   eval_interval: int = 5000, eval_episodes: int = 20,
                   use_actor_target: bool | None = None,
                   buffer_capacity: int = 1_000_000,
                   round_callback=None) -> metrics.RunResult:
    """Episode-wise training: collect one exploratory episode, then run one
    gradient iteration per collected step (times the UTD ratio).

    Warmup steps use uniform random actions with no updates. The critic
    targets soft-update every iteration; deterministic actors (and their
    target, when enabled) update every delay_frequency-th iteration.
    """
    factory = env_factory(env) if isinstance(env, str) else env
    env_name = env if isinstance(env, str) else getattr(factory, "__name__", "custom")
    hyper.validate()
    if use_actor_target is None:
        use_actor_target = hyper.deterministic

    init_rng = stream_rng(seed, INIT_STREAM)
    collect_rng = stream_rng(seed, COLLECT_STREAM)
    update_rng = stream_rng(seed, UPDATE_STREAM)

    env_inst = factory()
    spec = env_inst.spec
    agent = Agent(spec, hyper, init_rng, use_actor_target=use_actor_target)
    buffer = ReplayBuffer(buffer_capacity, spec.state_dim, spec.action_dim)

    curve_steps: list[int] = []
    curve_scores: list[float] = []

    def run_evals(t_prev, t_now):
        for grid_point in metrics.eval_grid_points(t_prev, t_now, eval_interval):
            score = metrics.eval_policy(agent.greedy_policy(), factory, eval_episodes,
                                        eval_seed(seed, grid_point // eval_interval))
            curve_steps.append(grid_point)
            curve_scores.append(score)

    t = 0
    uniform = _UniformPolicy(spec.action_dim, spec.action_bound)
    while t < hyper.warmup_steps:
        _, steps = _collect_episode(env_inst, uniform, buffer, collect_rng, explore=True)
        run_evals(t, t + steps)
        t += steps
    warmup_end = t

    policy = agent.collect_policy()
    updates = 0
    rounds = 0
    while t < total_steps:
        score, steps = _collect_episode(env_inst, policy, buffer, collect_rng, explore=True)
        for _ in range(steps * hyper.utd_ratio):
            batch = buffer.sample(hyper.batch_size, update_rng)
            a_next, logp_next = agent.next_actions(batch.next_states, update_rng)
            y = agent.compute_targets(batch, a_next, logp_next, update_rng)
            agent.update_critics(batch, y)
            updates += 1
            if not agent.deterministic or updates % hyper.delay_frequency == 0:
                agent.update_actor(batch, update_rng)
            agent.soft_update_critic_targets()
        run_evals(t, t + steps)
        t += steps
        rounds += 1
        if round_callback is not None:
            round_callback({"round": rounds, "t": t, "score": score,
                            "actor_digest": agent.actor.digest(), "updates": updates})

    final_score = metrics.eval_policy(agent.greedy_policy(), factory, eval_episodes,
                                      eval_seed(seed, FINAL_EVAL_ORDINAL))
    curve = metrics.LearningCurve(np.array(curve_steps), np.array(curve_scores),
                                  eval_episodes, eval_interval)
    return metrics.RunResult(
        label=hyper.algo, env_name=env_name, seed=seed, curve=curve,
        final_score=final_score, final_params=agent.actor, env_steps=t,
        warmup_env_steps=warmup_end, updates=updates, rounds=rounds,
    )
