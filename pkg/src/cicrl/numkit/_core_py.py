"""NumPy fallback kernels.

All functions take the flat parameter vector plus the layout arrays from
specs.layout_for and operate on C-contiguous float64 data. The compiled
core (_core_c) implements the identical call signatures.
"""

from __future__ import annotations

import numpy as np

NAME = "py"


def _apply_head(z, head_code, ha, hb):
    if head_code == 0:  # linear
        return z
    if head_code == 1:  # tanh_scaled, ha = action bound
        return ha * np.tanh(z)
    # gaussian: first half mean untouched, second half log-std clipped to [ha, hb]
    y = z.copy()
    half = z.shape[1] // 2
    np.clip(y[:, half:], ha, hb, out=y[:, half:])
    return y


def _head_backward(z_last, d_y, head_code, ha, hb):
    if head_code == 0:
        return d_y
    if head_code == 1:
        t = np.tanh(z_last)
        return d_y * (ha * (1.0 - t * t))
    d_z = d_y.copy()
    half = z_last.shape[1] // 2
    inside = (z_last[:, half:] >= ha) & (z_last[:, half:] <= hb)
    d_z[:, half:] *= inside
    return d_z


def _hidden_act(z, act_code):
    return np.maximum(z, 0.0) if act_code == 0 else np.tanh(z)


def _hidden_act_grad_from_output(h, act_code):
    # relu: h > 0 (h == act(z) here); tanh: 1 - h^2
    return (h > 0.0).astype(np.float64) if act_code == 0 else 1.0 - h * h


def forward(flat, w_off, b_off, n_in, n_out, act_code, head_code, ha, hb, x):
    n_layers = w_off.shape[0]
    h = x
    for k in range(n_layers):
        ni, no = int(n_in[k]), int(n_out[k])
        w = flat[w_off[k] : w_off[k] + ni * no].reshape(ni, no)
        b = flat[b_off[k] : b_off[k] + no]
        z = h @ w + b
        h = _hidden_act(z, act_code) if k < n_layers - 1 else _apply_head(z, head_code, ha, hb)
    return h


def forward_cached(flat, w_off, b_off, n_in, n_out, act_code, head_code, ha, hb, x):
    """Returns (y, cache) with cache = [h_0 .. h_{L-1}, z_L] for backward."""
    n_layers = w_off.shape[0]
    cache = [x]
    h = x
    for k in range(n_layers):
        ni, no = int(n_in[k]), int(n_out[k])
        w = flat[w_off[k] : w_off[k] + ni * no].reshape(ni, no)
        b = flat[b_off[k] : b_off[k] + no]
        z = h @ w + b
        if k < n_layers - 1:
            h = _hidden_act(z, act_code)
            cache.append(h)
        else:
            cache.append(z)
            h = _apply_head(z, head_code, ha, hb)
    return h, cache


def backward(flat, w_off, b_off, n_in, n_out, act_code, head_code, ha, hb, cache, d_y,
             want_param=True, want_input=True):
    """Gradients of sum(d_y * y) w.r.t. the flat parameters and the input batch."""
    n_layers = w_off.shape[0]
    d_z = _head_backward(cache[n_layers], d_y, head_code, ha, hb)
    d_flat = np.zeros_like(flat) if want_param else None
    d_x = None
    for k in range(n_layers - 1, -1, -1):
        ni, no = int(n_in[k]), int(n_out[k])
        w = flat[w_off[k] : w_off[k] + ni * no].reshape(ni, no)
        h_prev = cache[k]
        if want_param:
            d_w = d_flat[w_off[k] : w_off[k] + ni * no].reshape(ni, no)
            np.matmul(h_prev.T, d_z, out=d_w)
            d_flat[b_off[k] : b_off[k] + no] = d_z.sum(axis=0)
        if k > 0:
            d_h = d_z @ w.T
            d_z = d_h * _hidden_act_grad_from_output(h_prev, act_code)
        elif want_input:
            d_x = d_z @ w.T
    return d_flat, d_x


def adam_update(p, g, m, v, t, lr, beta1, beta2, eps):
    """One bias-corrected Adam step, in place on p, m, v. t is the post-increment step count."""
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * (g * g)
    c1 = 1.0 - beta1 ** t
    c2 = 1.0 - beta2 ** t
    p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)


def polyak(target, online, tau):
    """target <- tau * online + (1 - tau) * target, in place."""
    target *= 1.0 - tau
    target += tau * online
