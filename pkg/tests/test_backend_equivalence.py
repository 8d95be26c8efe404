"""The compiled core and the NumPy fallback must agree on every kernel."""

import numpy as np
import pytest

from cicrl.numkit import AdamState, MlpParams, MlpSpec, init_params
from cicrl.numkit import backend as bk
from cicrl.numkit.ops import _kernel_args
from conftest import random_spec

pytestmark = pytest.mark.skipif(
    "c" not in bk.available_backends(), reason="compiled core not built"
)


def _kernels():
    return bk.get_backend("py"), bk.get_backend("c")


@pytest.mark.parametrize("head", ["linear", "tanh_scaled", "gaussian"])
def test_forward_agreement(head, rng):
    py, cc = _kernels()
    for _ in range(10):
        spec = random_spec(rng, head=head, max_width=9)
        params = init_params(spec, rng)
        x = np.ascontiguousarray(rng.normal(size=(5, spec.in_dim)))
        a = py.forward(params.flat, *_kernel_args(spec), x)
        b = cc.forward(params.flat, *_kernel_args(spec), x)
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("head", ["linear", "tanh_scaled", "gaussian"])
@pytest.mark.parametrize("want_param,want_input", [(True, True), (True, False), (False, True)])
def test_backward_agreement(head, want_param, want_input, rng):
    py, cc = _kernels()
    for _ in range(10):
        spec = random_spec(rng, head=head, max_width=9)
        params = init_params(spec, rng)
        x = np.ascontiguousarray(rng.normal(size=(6, spec.in_dim)))
        d_y = np.ascontiguousarray(rng.normal(size=(6, spec.out_dim)))
        ya, ca = py.forward_cached(params.flat, *_kernel_args(spec), x)
        yb, cb = cc.forward_cached(params.flat, *_kernel_args(spec), x)
        np.testing.assert_allclose(ya, yb, rtol=1e-13, atol=1e-15)
        ga, dxa = py.backward(params.flat, *_kernel_args(spec), ca, d_y, want_param, want_input)
        gb, dxb = cc.backward(params.flat, *_kernel_args(spec), cb, d_y, want_param, want_input)
        if want_param:
            np.testing.assert_allclose(ga, gb, rtol=1e-12, atol=1e-14)
        else:
            assert ga is None and gb is None
        if want_input:
            np.testing.assert_allclose(dxa, dxb, rtol=1e-12, atol=1e-14)
        else:
            assert dxa is None and dxb is None


def test_adam_agreement(rng):
    py, cc = _kernels()
    n = 257
    p0 = rng.normal(size=n)
    pa, pb = p0.copy(), p0.copy()
    sa, sb = AdamState(n, lr=1e-2), AdamState(n, lr=1e-2)
    for t in range(1, 6):
        g = rng.normal(size=n)
        py.adam_update(pa, g, sa.m, sa.v, t, sa.lr, sa.beta1, sa.beta2, sa.eps)
        cc.adam_update(pb, g, sb.m, sb.v, t, sb.lr, sb.beta1, sb.beta2, sb.eps)
    np.testing.assert_array_equal(pa, pb)
    np.testing.assert_array_equal(sa.m, sb.m)
    np.testing.assert_array_equal(sa.v, sb.v)


def test_polyak_agreement(rng):
    py, cc = _kernels()
    t0 = rng.normal(size=100)
    o = rng.normal(size=100)
    ta, tb = t0.copy(), t0.copy()
    for _ in range(10):
        py.polyak(ta, o, 5e-3)
        cc.polyak(tb, o, 5e-3)
    np.testing.assert_array_equal(ta, tb)
