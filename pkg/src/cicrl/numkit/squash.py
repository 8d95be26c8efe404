"""Reparameterized tanh-squashed Gaussian policy head.

The network's raw output is [mean, log_std] per action dimension (log_std
already clipped by the gaussian head). Sampling draws u = mean + std * eps,
squashes a = tanh(u) and scales by the action bound. Log-probabilities are
measured on the squashed variable in [-1, 1] (the bound scaling is a
constant offset and is left out), with the change-of-variables correction
log(1 - tanh(u)^2) evaluated in the softplus form for stability.
"""

from __future__ import annotations

import numpy as np

_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_2 = np.log(2.0)


def split_mean_logstd(out: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    half = out.shape[-1] // 2
    return out[..., :half], out[..., half:]


def mean_action(out: np.ndarray, bound: float) -> np.ndarray:
    mean, _ = split_mean_logstd(out)
    return bound * np.tanh(mean)


def sample(out: np.ndarray, eps: np.ndarray, bound: float):
    """Draw actions for a batch of head outputs with fixed noise eps.

    Returns (action, logp, squashed) where action = bound * squashed and
    logp has shape (B,). squashed = tanh(u) is kept for the backward pass.
    """
    mean, log_std = split_mean_logstd(out)
    std = np.exp(log_std)
    u = mean + std * eps
    squashed = np.tanh(u)
    # log N(u; mean, std) with u = mean + std*eps collapses to -(eps^2/2 + log_std + log sqrt(2pi))
    log_normal = -(0.5 * eps * eps + log_std + _HALF_LOG_2PI)
    # log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u))
    log_jac = 2.0 * (_LOG_2 - u - np.logaddexp(0.0, -2.0 * u))
    logp = np.sum(log_normal - log_jac, axis=-1)
    return bound * squashed, logp, squashed


def backward(out: np.ndarray, eps: np.ndarray, squashed: np.ndarray,
             d_action: np.ndarray, d_logp: np.ndarray, bound: float) -> np.ndarray:
    """Gradients w.r.t. the raw head output [mean, log_std] for fixed eps.

    d_action is the upstream gradient on the scaled action, d_logp (shape
    (B,)) the upstream gradient on the per-row log-probability.
    """
    _, log_std = split_mean_logstd(out)
    std = np.exp(log_std)
    d_lp = d_logp[:, None]
    # d logp / du = 2 tanh(u) from the jacobian term; the normal term has no u path
    d_u = d_action * (bound * (1.0 - squashed * squashed)) + d_lp * (2.0 * squashed)
    d_mean = d_u
    d_log_std = d_u * (std * eps) - d_lp
    return np.concatenate([d_mean, d_log_std], axis=1)
