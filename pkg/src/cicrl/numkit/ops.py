"""Public numeric operations: forward/backward passes, Adam, soft updates.

Single-vector wrappers follow the batched kernels. Updates mutate their
parameter/state arguments in place and also return them; each training
run must own its instances (no cross-run sharing).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import NumericsError
from . import backend
from .specs import ACT_CODES, HEAD_CODES, AdamState, MlpParams, MlpSpec, describe_index, layout_for


@lru_cache(maxsize=None)
def _kernel_args(spec: MlpSpec):
    lay = layout_for(spec)
    act = ACT_CODES[spec.hidden_activation]
    head = HEAD_CODES[spec.head]
    if spec.head == "tanh_scaled":
        ha, hb = float(spec.action_bound), 0.0
    elif spec.head == "gaussian":
        ha, hb = spec.log_std_clip
    else:
        ha, hb = 0.0, 0.0
    return lay.w_off, lay.b_off, lay.n_in, lay.n_out, act, head, ha, hb


def _as_batch(spec: MlpSpec, x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != spec.in_dim:
        raise ValueError(f"input batch must have shape (B, {spec.in_dim}), got {x.shape}")
    return x


def mlp_forward_batch(params: MlpParams, x: np.ndarray) -> np.ndarray:
    x = _as_batch(params.spec, x)
    if x.shape[0] == 0:
        return np.zeros((0, params.spec.out_dim))
    return backend.active.forward(params.flat, *_kernel_args(params.spec), x)


def mlp_forward(params: MlpParams, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != params.spec.in_dim:
        raise ValueError(f"input must have length {params.spec.in_dim}, got {x.size}")
    return mlp_forward_batch(params, x[None, :])[0]


def mlp_forward_cached(params: MlpParams, x: np.ndarray):
    """Forward pass keeping per-layer activations for a later backward pass."""
    x = _as_batch(params.spec, x)
    return backend.active.forward_cached(params.flat, *_kernel_args(params.spec), x)


def mlp_backward(params: MlpParams, cache, d_y: np.ndarray, want_param: bool = True, want_input: bool = True):
    """Reverse-mode gradients of sum(d_y * output) for a cached forward pass.

    Returns (param_grads, input_grads); either is None when not requested.
    """
    spec = params.spec
    d_y = np.ascontiguousarray(d_y, dtype=np.float64)
    if d_y.ndim != 2 or d_y.shape[1] != spec.out_dim:
        raise ValueError(f"upstream batch must have shape (B, {spec.out_dim}), got {d_y.shape}")
    if d_y.shape[0] != cache[0].shape[0]:
        raise ValueError("upstream batch size does not match the cached forward pass")
    d_flat, d_x = backend.active.backward(
        params.flat, *_kernel_args(spec), cache, d_y, want_param, want_input
    )
    grads = MlpParams(spec, d_flat) if want_param else None
    return grads, d_x


def mlp_gradient(params: MlpParams, x: np.ndarray, upstream: np.ndarray):
    """Exact gradients of upstream . output w.r.t. parameters and the input vector."""
    spec = params.spec
    x = np.asarray(x, dtype=np.float64).ravel()
    upstream = np.asarray(upstream, dtype=np.float64).ravel()
    if x.size != spec.in_dim:
        raise ValueError(f"input must have length {spec.in_dim}, got {x.size}")
    if upstream.size != spec.out_dim:
        raise ValueError(f"upstream must have length {spec.out_dim}, got {upstream.size}")
    _, cache = mlp_forward_cached(params, x[None, :])
    grads, d_x = mlp_backward(params, cache, upstream[None, :])
    return grads, d_x[0]


def adam_update_flat(p: np.ndarray, g: np.ndarray, state: AdamState) -> None:
    """Adam step on a raw flat vector; increments state.step."""
    if g.shape != p.shape:
        raise ValueError(f"gradient shape {g.shape} does not match parameter shape {p.shape}")
    state.step += 1
    backend.active.adam_update(p, g, state.m, state.v, state.step, state.lr, state.beta1, state.beta2, state.eps)


def adam_step(params: MlpParams, grads: MlpParams, state: AdamState) -> tuple[MlpParams, AdamState]:
    """One Adam update in place; raises on any non-finite gradient component."""
    if grads.spec != params.spec:
        raise ValueError("gradient spec does not match parameter spec")
    g = grads.flat
    if not np.all(np.isfinite(g)):
        bad = int(np.flatnonzero(~np.isfinite(g))[0])
        raise NumericsError(
            f"non-finite gradient ({g[bad]!r}) at {describe_index(params.spec, bad)}"
        )
    adam_update_flat(params.flat, g, state)
    return params, state


def soft_update(target: MlpParams, online: MlpParams, tau: float) -> MlpParams:
    """target <- tau * online + (1 - tau) * target, componentwise, in place."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    if target.spec != online.spec:
        raise ValueError("target and online parameter specs differ")
    backend.active.polyak(target.flat, online.flat, float(tau))
    return target
