# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: BLAS-backed dense layers plus fused elementwise loops.

Call signatures mirror _core_py exactly; ops.py dispatches between them.
"""

from libc.math cimport pow, sqrt, tanh
from libc.stdint cimport int64_t
from libc.string cimport memcpy
from scipy.linalg.cython_blas cimport dgemm

import numpy as np

NAME = "c"


cdef inline void _gemm_rm(bint ta, bint tb, int m, int n, int k, double alpha,
                          double* a, int lda, double* b, int ldb,
                          double beta, double* c, int ldc) noexcept nogil:
    # Row-major C(m,n) = alpha*op(A)(m,k) @ op(B)(k,n) + beta*C, via Fortran dgemm
    # with operands swapped; ld* are the row-major leading dims (stored columns).
    cdef char fa = b'T' if tb else b'N'
    cdef char fb = b'T' if ta else b'N'
    dgemm(&fa, &fb, &n, &m, &k, &alpha, b, &ldb, a, &lda, &beta, c, &ldc)


cdef void _affine(const double[::1] flat, int64_t w0, int64_t b0, int ni, int no,
                  double[:, ::1] h, double[:, ::1] z) noexcept nogil:
    # z = h @ W + bias
    cdef int B = h.shape[0]
    cdef int i, j
    _gemm_rm(False, False, B, no, ni, 1.0,
             &h[0, 0], ni, <double*>&flat[w0], no, 0.0, &z[0, 0], no)
    for i in range(B):
        for j in range(no):
            z[i, j] += flat[b0 + j]


cdef void _activate(double[:, ::1] z, int act_code) noexcept nogil:
    cdef int i, j
    for i in range(z.shape[0]):
        for j in range(z.shape[1]):
            if act_code == 0:
                if z[i, j] < 0.0:
                    z[i, j] = 0.0
            else:
                z[i, j] = tanh(z[i, j])


cdef void _head_forward(double[:, ::1] z, double[:, ::1] y, int head_code,
                        double ha, double hb) noexcept nogil:
    cdef int i, j
    cdef int half = z.shape[1] // 2
    for i in range(z.shape[0]):
        for j in range(z.shape[1]):
            if head_code == 0:
                y[i, j] = z[i, j]
            elif head_code == 1:
                y[i, j] = ha * tanh(z[i, j])
            else:
                if j < half:
                    y[i, j] = z[i, j]
                elif z[i, j] < ha:
                    y[i, j] = ha
                elif z[i, j] > hb:
                    y[i, j] = hb
                else:
                    y[i, j] = z[i, j]


def forward(const double[::1] flat, const int64_t[::1] w_off, const int64_t[::1] b_off,
            const int64_t[::1] n_in, const int64_t[::1] n_out,
            int act_code, int head_code, double ha, double hb,
            double[:, ::1] x):
    cdef int n_layers = w_off.shape[0]
    cdef int B = x.shape[0]
    cdef int k
    cdef double[:, ::1] h = x
    cdef double[:, ::1] z
    arr = None
    for k in range(n_layers):
        arr = np.empty((B, <int>n_out[k]), dtype=np.float64)
        z = arr
        with nogil:
            _affine(flat, w_off[k], b_off[k], <int>n_in[k], <int>n_out[k], h, z)
            if k < n_layers - 1:
                _activate(z, act_code)
            else:
                _head_forward(z, z, head_code, ha, hb)
        h = z
    return arr


def forward_cached(const double[::1] flat, const int64_t[::1] w_off, const int64_t[::1] b_off,
                   const int64_t[::1] n_in, const int64_t[::1] n_out,
                   int act_code, int head_code, double ha, double hb,
                   double[:, ::1] x):
    cdef int n_layers = w_off.shape[0]
    cdef int B = x.shape[0]
    cdef int k
    cdef double[:, ::1] h = x
    cdef double[:, ::1] z, y
    cache = [np.asarray(x)]
    arr = None
    y_arr = None
    for k in range(n_layers):
        arr = np.empty((B, <int>n_out[k]), dtype=np.float64)
        z = arr
        with nogil:
            _affine(flat, w_off[k], b_off[k], <int>n_in[k], <int>n_out[k], h, z)
            if k < n_layers - 1:
                _activate(z, act_code)
        cache.append(arr)
        if k == n_layers - 1:
            y_arr = np.empty((B, <int>n_out[k]), dtype=np.float64)
            y = y_arr
            with nogil:
                _head_forward(z, y, head_code, ha, hb)
        h = z
    return y_arr, cache


def backward(const double[::1] flat, const int64_t[::1] w_off, const int64_t[::1] b_off,
             const int64_t[::1] n_in, const int64_t[::1] n_out,
             int act_code, int head_code, double ha, double hb,
             cache, double[:, ::1] d_y, bint want_param, bint want_input):
    cdef int n_layers = w_off.shape[0]
    cdef int B = d_y.shape[0]
    cdef int k, i, j, ni, no, half
    cdef double acc, hv

    cdef double[:, ::1] z_last = cache[n_layers]
    cdef int no_last = <int>n_out[n_layers - 1]
    dz_arr = np.empty((B, no_last), dtype=np.float64)
    cdef double[:, ::1] dz = dz_arr
    cdef double[:, ::1] dh
    cdef double[:, ::1] h_prev
    cdef double[::1] d_flat_mv
    cdef double t

    with nogil:
        half = no_last // 2
        for i in range(B):
            for j in range(no_last):
                if head_code == 0:
                    dz[i, j] = d_y[i, j]
                elif head_code == 1:
                    t = tanh(z_last[i, j])
                    dz[i, j] = d_y[i, j] * (ha * (1.0 - t * t))
                else:
                    if j < half or (z_last[i, j] >= ha and z_last[i, j] <= hb):
                        dz[i, j] = d_y[i, j]
                    else:
                        dz[i, j] = 0.0

    d_flat = np.empty(flat.shape[0], dtype=np.float64) if want_param else None
    if want_param:
        d_flat_mv = d_flat
    d_x = None
    dh_arr = None

    for k in range(n_layers - 1, -1, -1):
        ni = <int>n_in[k]
        no = <int>n_out[k]
        h_prev = cache[k]
        if want_param:
            with nogil:
                _gemm_rm(True, False, ni, no, B, 1.0,
                         &h_prev[0, 0], ni, &dz[0, 0], no, 0.0,
                         &d_flat_mv[w_off[k]], no)
                for j in range(no):
                    acc = 0.0
                    for i in range(B):
                        acc += dz[i, j]
                    d_flat_mv[b_off[k] + j] = acc
        if k > 0 or want_input:
            dh_arr = np.empty((B, ni), dtype=np.float64)
            dh = dh_arr
            with nogil:
                _gemm_rm(False, True, B, ni, no, 1.0,
                         &dz[0, 0], no, <double*>&flat[w_off[k]], no, 0.0, &dh[0, 0], ni)
                if k > 0:
                    for i in range(B):
                        for j in range(ni):
                            hv = h_prev[i, j]
                            if act_code == 0:
                                if hv <= 0.0:
                                    dh[i, j] = 0.0
                            else:
                                dh[i, j] *= 1.0 - hv * hv
            if k > 0:
                dz_arr = dh_arr
                dz = dh
            else:
                d_x = dh_arr
    return d_flat, d_x


def adam_update(double[::1] p, const double[::1] g, double[::1] m, double[::1] v,
                long t, double lr, double beta1, double beta2, double eps):
    cdef Py_ssize_t i, n = p.shape[0]
    cdef double c1 = 1.0 - pow(beta1, <double>t)
    cdef double c2 = 1.0 - pow(beta2, <double>t)
    cdef double mi, vi
    with nogil:
        for i in range(n):
            mi = beta1 * m[i] + (1.0 - beta1) * g[i]
            m[i] = mi
            vi = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i])
            v[i] = vi
            p[i] -= lr * (mi / c1) / (sqrt(vi / c2) + eps)


def polyak(double[::1] target, const double[::1] online, double tau):
    cdef Py_ssize_t i, n = target.shape[0]
    with nogil:
        for i in range(n):
            target[i] = (1.0 - tau) * target[i] + tau * online[i]
