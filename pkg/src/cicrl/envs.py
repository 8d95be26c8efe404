"""Native, seedable continuous-control environments.

Three desk-scale tasks behind one contract: pendulum swing-up, continuous
mountain-car, and a 2-D point-mass reacher. Dynamics are deterministic
given the state and the clipped action; the only randomness is the initial
state drawn at reset from the environment's own generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EnvSpec:
    state_dim: int
    action_dim: int
    action_bound: float
    max_episode_steps: int

    def __post_init__(self):
        if min(self.state_dim, self.action_dim, self.max_episode_steps) < 1 or self.action_bound <= 0:
            raise ValueError(f"all EnvSpec fields must be strictly positive: {self}")


@dataclass
class StepResult:
    next_state: np.ndarray
    reward: float
    terminated: bool  # environment-defined failure/goal
    truncated: bool  # step-limit reached


class Env:
    """Base contract: reset(seed) then step(action) until terminated/truncated."""

    spec: EnvSpec

    def __init__(self):
        self._rng: np.random.Generator | None = None
        self._steps = 0
        self._needs_reset = True

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        elif self._rng is None:
            raise RuntimeError("first reset() must provide a seed")
        self._steps = 0
        self._needs_reset = False
        self._init_state(self._rng)
        return self._observe()

    def step(self, action) -> StepResult:
        if self._needs_reset:
            raise RuntimeError("step() called on a finished or unseeded episode; call reset()")
        a = np.asarray(action, dtype=np.float64).ravel()
        if a.size != self.spec.action_dim:
            raise ValueError(f"action must have length {self.spec.action_dim}, got {a.size}")
        a = np.clip(a, -self.spec.action_bound, self.spec.action_bound)
        reward, terminated = self._dynamics(a)
        self._steps += 1
        truncated = self._steps >= self.spec.max_episode_steps
        if terminated or truncated:
            self._needs_reset = True
        return StepResult(self._observe(), float(reward), terminated, truncated)

    # subclass hooks
    def _init_state(self, rng: np.random.Generator) -> None:
        raise NotImplementedError

    def _dynamics(self, action: np.ndarray) -> tuple[float, bool]:
        raise NotImplementedError

    def _observe(self) -> np.ndarray:
        raise NotImplementedError


def _wrap_angle(theta: float) -> float:
    return ((theta + np.pi) % (2.0 * np.pi)) - np.pi


class PendulumSwingup(Env):
    """Torque-limited pendulum swing-up, classic-control dynamics.

    State (theta, theta_dot) observed as (cos, sin, theta_dot). Reward is
    -(wrap(theta)^2 + 0.1 theta_dot^2 + 0.001 u^2) on the pre-step state.
    Never terminates early; 200-step episodes.
    """

    spec = EnvSpec(state_dim=3, action_dim=1, action_bound=2.0, max_episode_steps=200)

    G, M, L, DT = 10.0, 1.0, 1.0, 0.05
    MAX_SPEED = 8.0

    def _init_state(self, rng):
        self._theta = rng.uniform(-np.pi, np.pi)
        self._theta_dot = rng.uniform(-1.0, 1.0)

    def _dynamics(self, action):
        u = action[0]
        th, thd = self._theta, self._theta_dot
        cost = _wrap_angle(th) ** 2 + 0.1 * thd**2 + 0.001 * u**2
        thd_new = thd + (1.5 * self.G / self.L * np.sin(th) + 3.0 / (self.M * self.L**2) * u) * self.DT
        thd_new = min(max(thd_new, -self.MAX_SPEED), self.MAX_SPEED)
        self._theta = th + thd_new * self.DT
        self._theta_dot = thd_new
        return -cost, False

    def _observe(self):
        return np.array([np.cos(self._theta), np.sin(self._theta), self._theta_dot])


class ContinuousMountainCar(Env):
    """Under-powered car in a valley; sparse +100 at the goal, -0.1 u^2 per step.

    Position in [-1.2, 0.6], velocity in [-0.07, 0.07]; terminates when
    position >= 0.45 with non-negative velocity; 999-step cap.
    """

    spec = EnvSpec(state_dim=2, action_dim=1, action_bound=1.0, max_episode_steps=999)

    POWER = 0.0015
    GOAL_POSITION = 0.45

    def _init_state(self, rng):
        self._position = rng.uniform(-0.6, -0.4)
        self._velocity = 0.0

    def _dynamics(self, action):
        u = action[0]
        vel = self._velocity + u * self.POWER - 0.0025 * np.cos(3.0 * self._position)
        vel = min(max(vel, -0.07), 0.07)
        pos = self._position + vel
        pos = min(max(pos, -1.2), 0.6)
        if pos <= -1.2 and vel < 0.0:
            vel = 0.0
        self._position, self._velocity = pos, vel
        terminated = pos >= self.GOAL_POSITION and vel >= 0.0
        reward = (100.0 if terminated else 0.0) - 0.1 * u**2
        return reward, terminated

    def _observe(self):
        return np.array([self._position, self._velocity])


class PointReacher(Env):
    """2-D double integrator steering toward a random goal.

    Observation (pos, vel, goal); acceleration actions in [-1, 1]^2 with
    dt = 0.1. Position starts in [-1, 1]^2 and stays clipped to [-2, 2]^2,
    velocity to [-1, 1]^2; goal drawn from [-1, 1]^2. Dense reward is the
    negative Euclidean distance to the goal; 100-step episodes.
    """

    spec = EnvSpec(state_dim=6, action_dim=2, action_bound=1.0, max_episode_steps=100)

    DT = 0.1

    def _init_state(self, rng):
        self._pos = rng.uniform(-1.0, 1.0, size=2)
        self._vel = np.zeros(2)
        self._goal = rng.uniform(-1.0, 1.0, size=2)

    def _dynamics(self, action):
        self._vel = np.clip(self._vel + action * self.DT, -1.0, 1.0)
        self._pos = np.clip(self._pos + self._vel * self.DT, -2.0, 2.0)
        return -float(np.linalg.norm(self._pos - self._goal)), False

    def _observe(self):
        return np.concatenate([self._pos, self._vel, self._goal])


_REGISTRY = {
    "pendulum": PendulumSwingup,
    "mountaincar": ContinuousMountainCar,
    "reacher": PointReacher,
}


def env_names() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def make_env(name: str) -> Env:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ValueError(f"unknown environment {name!r}; available: {sorted(_REGISTRY)}") from None


def env_factory(name):
    """Callable returning fresh instances; validates the name eagerly."""
    if name not in _REGISTRY:
        raise ValueError(f"unknown environment {name!r}; available: {sorted(_REGISTRY)}")
    cls = _REGISTRY[name]
    return cls
