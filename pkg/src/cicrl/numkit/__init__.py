"""Minimal dense numeric core: MLPs, exact reverse-mode gradients, Adam,
and target-network soft updates, over a compiled or NumPy kernel backend."""

from . import squash
from .backend import available_backends, backend_name, get_backend
from .ops import (
    adam_step,
    adam_update_flat,
    mlp_backward,
    mlp_forward,
    mlp_forward_batch,
    mlp_forward_cached,
    mlp_gradient,
    soft_update,
)
from .specs import AdamState, MlpParams, MlpSpec, init_params

__all__ = [
    "AdamState",
    "MlpParams",
    "MlpSpec",
    "adam_step",
    "adam_update_flat",
    "available_backends",
    "backend_name",
    "get_backend",
    "init_params",
    "mlp_backward",
    "mlp_forward",
    "mlp_forward_batch",
    "mlp_forward_cached",
    "mlp_gradient",
    "soft_update",
    "squash",
]
