import numpy as np
import pytest

from cicrl.numkit import MlpParams, MlpSpec, init_params


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_spec(rng, head="linear", max_width=6, n_hidden=None):
    if n_hidden is None:
        n_hidden = int(rng.integers(1, 3))
    sizes = [int(rng.integers(1, max_width + 1)) for _ in range(n_hidden + 2)]
    act = "relu" if rng.integers(2) == 0 else "tanh"
    if head == "tanh_scaled":
        return MlpSpec(tuple(sizes), act, head="tanh_scaled", action_bound=float(rng.uniform(0.5, 3.0)))
    if head == "gaussian":
        return MlpSpec(tuple(sizes), act, head="gaussian", log_std_clip=(-2.0, 1.0))
    return MlpSpec(tuple(sizes), act)


def constant_net(in_dim: int, value: float) -> MlpParams:
    """Single linear layer with zero weights whose output is always `value`."""
    spec = MlpSpec((in_dim, 1))
    params = MlpParams(spec)
    params.bias(0)[:] = value
    return params


def identity_net(dim: int, head="linear", **kw) -> MlpParams:
    spec = MlpSpec((dim, dim), head=head, **kw)
    params = MlpParams(spec)
    np.fill_diagonal(params.weight(0), 1.0)
    return params
