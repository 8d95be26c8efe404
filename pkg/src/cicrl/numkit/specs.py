"""Dense-network parameter containers and shape bookkeeping.

Parameters live in a single flat float64 vector; per-layer weight/bias
views are derived from the architecture spec. The flat representation is
what the compute kernels (NumPy or compiled) operate on.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

HIDDEN_ACTIVATIONS = ("relu", "tanh")
HEADS = ("linear", "tanh_scaled", "gaussian")

ACT_CODES = {"relu": 0, "tanh": 1}
HEAD_CODES = {"linear": 0, "tanh_scaled": 1, "gaussian": 2}


@dataclass(frozen=True)
class MlpSpec:
    """Architecture of a dense feed-forward network.

    layer_sizes runs input dim first, output dim last. A gaussian head
    doubles the width of the final affine layer (a mean and a log-std per
    output dimension); the log-std half is clipped to log_std_clip.
    A tanh_scaled head bounds outputs to [-action_bound, action_bound].
    """

    layer_sizes: tuple[int, ...]
    hidden_activation: str = "relu"
    head: str = "linear"
    action_bound: float = 1.0
    log_std_clip: tuple[float, float] = (-20.0, 2.0)

    def __post_init__(self):
        object.__setattr__(self, "layer_sizes", tuple(int(n) for n in self.layer_sizes))
        object.__setattr__(self, "log_std_clip", tuple(float(v) for v in self.log_std_clip))
        if len(self.layer_sizes) < 2:
            raise ValueError("layer_sizes needs at least an input and an output entry")
        if any(n < 1 for n in self.layer_sizes):
            raise ValueError(f"layer sizes must be positive, got {self.layer_sizes}")
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ValueError(f"unknown hidden activation {self.hidden_activation!r}")
        if self.head not in HEADS:
            raise ValueError(f"unknown output head {self.head!r}")
        if self.head == "tanh_scaled" and not self.action_bound > 0:
            raise ValueError("tanh_scaled head needs a positive action_bound")
        if self.head == "gaussian":
            lo, hi = self.log_std_clip
            if not lo < hi:
                raise ValueError(f"log_std_clip lower bound must be below upper, got {self.log_std_clip}")

    @property
    def in_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def out_dim(self) -> int:
        """Width of the forward output (2x the last layer size for a gaussian head)."""
        last = self.layer_sizes[-1]
        return 2 * last if self.head == "gaussian" else last

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes) - 1

    def layer_shapes(self) -> list[tuple[int, int]]:
        shapes = []
        for k in range(self.n_layers):
            n_in = self.layer_sizes[k]
            n_out = self.layer_sizes[k + 1]
            if self.head == "gaussian" and k == self.n_layers - 1:
                n_out *= 2
            shapes.append((n_in, n_out))
        return shapes


@dataclass(frozen=True)
class Layout:
    """Offsets of each layer's weights and biases inside the flat vector."""

    w_off: np.ndarray
    b_off: np.ndarray
    n_in: np.ndarray
    n_out: np.ndarray
    size: int


@lru_cache(maxsize=None)
def layout_for(spec: MlpSpec) -> Layout:
    w_off, b_off, n_in, n_out = [], [], [], []
    pos = 0
    for ni, no in spec.layer_shapes():
        w_off.append(pos)
        pos += ni * no
        b_off.append(pos)
        pos += no
        n_in.append(ni)
        n_out.append(no)
    as_i64 = lambda xs: np.asarray(xs, dtype=np.int64)
    return Layout(as_i64(w_off), as_i64(b_off), as_i64(n_in), as_i64(n_out), pos)


class MlpParams:
    """Flat float64 parameter vector plus per-layer weight/bias views."""

    __slots__ = ("spec", "flat")

    def __init__(self, spec: MlpSpec, flat: np.ndarray | None = None):
        layout = layout_for(spec)
        if flat is None:
            flat = np.zeros(layout.size, dtype=np.float64)
        else:
            flat = np.asarray(flat, dtype=np.float64)
            if flat.shape != (layout.size,):
                raise ValueError(f"flat vector has shape {flat.shape}, spec needs ({layout.size},)")
        self.spec = spec
        self.flat = flat

    @property
    def layout(self) -> Layout:
        return layout_for(self.spec)

    def weight(self, k: int) -> np.ndarray:
        lay = self.layout
        ni, no = int(lay.n_in[k]), int(lay.n_out[k])
        off = int(lay.w_off[k])
        return self.flat[off : off + ni * no].reshape(ni, no)

    def bias(self, k: int) -> np.ndarray:
        lay = self.layout
        off, no = int(lay.b_off[k]), int(lay.n_out[k])
        return self.flat[off : off + no]

    def copy(self) -> "MlpParams":
        return MlpParams(self.spec, self.flat.copy())

    def copy_from(self, other: "MlpParams") -> None:
        """Overwrite in place, keeping views held elsewhere valid."""
        if other.spec != self.spec:
            raise ValueError("cannot copy parameters across different specs")
        self.flat[:] = other.flat

    def all_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.flat)))

    def digest(self) -> str:
        """Hash of the raw bytes; changes iff any parameter bit changes."""
        return hashlib.sha256(self.flat.tobytes()).hexdigest()

    def __eq__(self, other):
        return (
            isinstance(other, MlpParams)
            and self.spec == other.spec
            and np.array_equal(self.flat, other.flat)
        )

    def __repr__(self):
        return f"MlpParams(layers={self.spec.layer_sizes}, head={self.spec.head}, size={self.flat.size})"


def describe_index(spec: MlpSpec, flat_index: int) -> str:
    """Human-readable location of a flat-vector entry, e.g. 'layer 1 weight [2, 3]'."""
    lay = layout_for(spec)
    for k in range(len(lay.w_off)):
        w0, ni, no = int(lay.w_off[k]), int(lay.n_in[k]), int(lay.n_out[k])
        b0 = int(lay.b_off[k])
        if w0 <= flat_index < w0 + ni * no:
            r, c = divmod(flat_index - w0, no)
            return f"layer {k} weight [{r}, {c}]"
        if b0 <= flat_index < b0 + no:
            return f"layer {k} bias [{flat_index - b0}]"
    return f"flat index {flat_index}"


def init_params(spec: MlpSpec, rng: np.random.Generator) -> MlpParams:
    """Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer, weights then bias."""
    params = MlpParams(spec)
    for k, (ni, no) in enumerate(spec.layer_shapes()):
        bound = 1.0 / np.sqrt(ni)
        params.weight(k)[:] = rng.uniform(-bound, bound, size=(ni, no))
        params.bias(k)[:] = rng.uniform(-bound, bound, size=no)
    return params


class AdamState:
    """First/second-moment accumulators plus step counter for one flat vector."""

    __slots__ = ("m", "v", "step", "lr", "beta1", "beta2", "eps")

    def __init__(self, size: int, lr: float = 3e-4, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.m = np.zeros(size, dtype=np.float64)
        self.v = np.zeros(size, dtype=np.float64)
        self.step = 0
        self.lr = float(lr)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)

    @classmethod
    def for_params(cls, params: MlpParams, lr: float = 3e-4, **kw) -> "AdamState":
        return cls(params.flat.size, lr=lr, **kw)

    def copy(self) -> "AdamState":
        out = AdamState(self.m.size, self.lr, self.beta1, self.beta2, self.eps)
        out.m[:] = self.m
        out.v[:] = self.v
        out.step = self.step
        return out
