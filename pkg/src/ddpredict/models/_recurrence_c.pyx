# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled recurrence kernels, contract-identical to ``_recurrence_np``.

The per-step hidden-state matmuls go through BLAS dgemm; the gate
nonlinearities are tight C loops.  See the numpy twin for shape and
gate-order documentation.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, tanh
from libc.string cimport memcpy
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()


cdef inline double _sigmoid(double x) nogil:
    cdef double e
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


cdef void _rm_gemm(bint ta, bint tb, int m, int n, int k,
                   double alpha, double* a, int lda, double* b, int ldb,
                   double beta, double* c, int ldc) nogil:
    """Row-major C(m,n) = alpha*opA(A)@opB(B) + beta*C.

    lda/ldb are the row-major column counts of the stored arrays.  Fortran
    dgemm sees the transposed views, so operands and flags are swapped.
    """
    cdef char cta = b'T' if ta else b'N'
    cdef char ctb = b'T' if tb else b'N'
    dgemm(&ctb, &cta, &n, &m, &k, &alpha, b, &ldb, a, &lda, &beta, c, &ldc)


def lstm_recurrence(xw, wh, h0, c0):
    xw = np.ascontiguousarray(xw, dtype=np.float64)
    wh = np.ascontiguousarray(wh, dtype=np.float64)
    cdef double[:, :, ::1] xw_v = xw
    cdef double[:, ::1] wh_v = wh
    cdef int b = xw_v.shape[0]
    cdef int t_steps = xw_v.shape[1]
    cdef int four_h = xw_v.shape[2]
    cdef int h = four_h // 4

    h_seq = np.empty((b, t_steps, h))
    c_seq = np.empty((b, t_steps, h))
    gates = np.empty((b, t_steps, four_h))
    hcur = np.ascontiguousarray(h0, dtype=np.float64).copy()
    ccur = np.ascontiguousarray(c0, dtype=np.float64).copy()
    a = np.empty((b, four_h))
    cdef double[:, :, ::1] h_seq_v = h_seq
    cdef double[:, :, ::1] c_seq_v = c_seq
    cdef double[:, :, ::1] gates_v = gates
    cdef double[:, ::1] hcur_v = hcur
    cdef double[:, ::1] ccur_v = ccur
    cdef double[:, ::1] a_v = a

    cdef int t, i, j
    cdef double gi, gf, gg, go, cnew
    with nogil:
        for t in range(t_steps):
            for i in range(b):
                memcpy(&a_v[i, 0], &xw_v[i, t, 0], four_h * sizeof(double))
            _rm_gemm(False, False, b, four_h, h, 1.0,
                     &hcur_v[0, 0], h, &wh_v[0, 0], four_h, 1.0, &a_v[0, 0], four_h)
            for i in range(b):
                for j in range(h):
                    gi = _sigmoid(a_v[i, j])
                    gf = _sigmoid(a_v[i, h + j])
                    gg = tanh(a_v[i, 2 * h + j])
                    go = _sigmoid(a_v[i, 3 * h + j])
                    cnew = gf * ccur_v[i, j] + gi * gg
                    ccur_v[i, j] = cnew
                    hcur_v[i, j] = go * tanh(cnew)
                    gates_v[i, t, j] = gi
                    gates_v[i, t, h + j] = gf
                    gates_v[i, t, 2 * h + j] = gg
                    gates_v[i, t, 3 * h + j] = go
                    h_seq_v[i, t, j] = hcur_v[i, j]
                    c_seq_v[i, t, j] = cnew
    return h_seq, c_seq, gates


def lstm_recurrence_backward(dh_seq, h_seq, c_seq, gates, wh, h0, c0):
    dh_seq = np.ascontiguousarray(dh_seq, dtype=np.float64)
    h_seq = np.ascontiguousarray(h_seq, dtype=np.float64)
    c_seq = np.ascontiguousarray(c_seq, dtype=np.float64)
    gates = np.ascontiguousarray(gates, dtype=np.float64)
    wh = np.ascontiguousarray(wh, dtype=np.float64)
    h0 = np.ascontiguousarray(h0, dtype=np.float64)
    c0 = np.ascontiguousarray(c0, dtype=np.float64)
    cdef double[:, :, ::1] dh_seq_v = dh_seq
    cdef double[:, :, ::1] h_seq_v = h_seq
    cdef double[:, :, ::1] c_seq_v = c_seq
    cdef double[:, :, ::1] gates_v = gates
    cdef double[:, ::1] wh_v = wh
    cdef double[:, ::1] h0_v = h0
    cdef double[:, ::1] c0_v = c0
    cdef int b = h_seq_v.shape[0]
    cdef int t_steps = h_seq_v.shape[1]
    cdef int h = h_seq_v.shape[2]
    cdef int four_h = 4 * h

    dxw = np.empty((b, t_steps, four_h))
    dwh = np.zeros((h, four_h))
    dh_next = np.zeros((b, h))
    dc_next = np.zeros((b, h))
    cdef double[:, :, ::1] dxw_v = dxw
    cdef double[:, ::1] dwh_v = dwh
    cdef double[:, ::1] dh_next_v = dh_next
    cdef double[:, ::1] dc_next_v = dc_next

    cdef int t, i, j
    cdef double gi, gf, gg, go, tc, dh, dc, cprev
    cdef double* hprev_ptr
    with nogil:
        for t in range(t_steps - 1, -1, -1):
            for i in range(b):
                for j in range(h):
                    gi = gates_v[i, t, j]
                    gf = gates_v[i, t, h + j]
                    gg = gates_v[i, t, 2 * h + j]
                    go = gates_v[i, t, 3 * h + j]
                    tc = tanh(c_seq_v[i, t, j])
                    cprev = c_seq_v[i, t - 1, j] if t > 0 else c0_v[i, j]
                    dh = dh_seq_v[i, t, j] + dh_next_v[i, j]
                    dc = dc_next_v[i, j] + dh * go * (1.0 - tc * tc)
                    dxw_v[i, t, j] = dc * gg * gi * (1.0 - gi)
                    dxw_v[i, t, h + j] = dc * cprev * gf * (1.0 - gf)
                    dxw_v[i, t, 2 * h + j] = dc * gi * (1.0 - gg * gg)
                    dxw_v[i, t, 3 * h + j] = dh * tc * go * (1.0 - go)
                    dc_next_v[i, j] = dc * gf
            if t > 0:
                hprev_ptr = &h_seq_v[0, t - 1, 0]
            else:
                hprev_ptr = &h0_v[0, 0]
            # dwh += h_prev^T @ da; batch rows at fixed t are strided by the
            # time extent, which dgemm absorbs through the leading dimension
            _rm_gemm_strided_hprev(t, b, t_steps, h, four_h,
                                   hprev_ptr, &dxw_v[0, t, 0], &dwh_v[0, 0])
            # dh_next = da @ wh^T
            _rm_gemm_strided_dh(b, t_steps, h, four_h,
                                &dxw_v[0, t, 0], &wh_v[0, 0], &dh_next_v[0, 0])
    return dxw, dwh, dh_next, dc_next


cdef void _rm_gemm_strided_hprev(int t, int b, int t_steps, int h, int gh,
                                 double* hprev, double* da, double* dwh) nogil:
    """dwh(h,gh) += hprev^T @ da with time-strided batch rows."""
    cdef int lda
    if t > 0:
        lda = t_steps * h
    else:
        lda = h  # h0 is contiguous
    cdef int ldb = t_steps * gh
    _rm_gemm(True, False, h, gh, b, 1.0, hprev, lda, da, ldb, 1.0, dwh, gh)


cdef void _rm_gemm_strided_dh(int b, int t_steps, int h, int gh,
                              double* da, double* wh, double* dh_next) nogil:
    """dh_next(b,h) = da @ wh^T with da rows strided by the time extent."""
    cdef int lda = t_steps * gh
    _rm_gemm(False, True, b, h, gh, 1.0, da, lda, wh, gh, 0.0, dh_next, h)


def gru_recurrence(xw, wh, h0):
    xw = np.ascontiguousarray(xw, dtype=np.float64)
    wh = np.ascontiguousarray(wh, dtype=np.float64)
    cdef double[:, :, ::1] xw_v = xw
    cdef double[:, ::1] wh_v = wh
    cdef int b = xw_v.shape[0]
    cdef int t_steps = xw_v.shape[1]
    cdef int three_h = xw_v.shape[2]
    cdef int h = three_h // 3

    h_seq = np.empty((b, t_steps, h))
    gates = np.empty((b, t_steps, three_h))
    hh_n_cache = np.empty((b, t_steps, h))
    hcur = np.ascontiguousarray(h0, dtype=np.float64).copy()
    hw = np.empty((b, three_h))
    cdef double[:, :, ::1] h_seq_v = h_seq
    cdef double[:, :, ::1] gates_v = gates
    cdef double[:, :, ::1] hh_v = hh_n_cache
    cdef double[:, ::1] hcur_v = hcur
    cdef double[:, ::1] hw_v = hw

    cdef int t, i, j
    cdef double r, z, n, hh
    with nogil:
        for t in range(t_steps):
            _rm_gemm(False, False, b, three_h, h, 1.0,
                     &hcur_v[0, 0], h, &wh_v[0, 0], three_h, 0.0, &hw_v[0, 0], three_h)
            for i in range(b):
                for j in range(h):
                    r = _sigmoid(xw_v[i, t, j] + hw_v[i, j])
                    z = _sigmoid(xw_v[i, t, h + j] + hw_v[i, h + j])
                    hh = hw_v[i, 2 * h + j]
                    n = tanh(xw_v[i, t, 2 * h + j] + r * hh)
                    hcur_v[i, j] = (1.0 - z) * n + z * hcur_v[i, j]
                    gates_v[i, t, j] = r
                    gates_v[i, t, h + j] = z
                    gates_v[i, t, 2 * h + j] = n
                    hh_v[i, t, j] = hh
                    h_seq_v[i, t, j] = hcur_v[i, j]
    return h_seq, gates, hh_n_cache


def gru_recurrence_backward(dh_seq, h_seq, gates, hh_n_cache, wh, h0):
    dh_seq = np.ascontiguousarray(dh_seq, dtype=np.float64)
    h_seq = np.ascontiguousarray(h_seq, dtype=np.float64)
    gates = np.ascontiguousarray(gates, dtype=np.float64)
    hh_n_cache = np.ascontiguousarray(hh_n_cache, dtype=np.float64)
    wh = np.ascontiguousarray(wh, dtype=np.float64)
    h0 = np.ascontiguousarray(h0, dtype=np.float64)
    cdef double[:, :, ::1] dh_seq_v = dh_seq
    cdef double[:, :, ::1] h_seq_v = h_seq
    cdef double[:, :, ::1] gates_v = gates
    cdef double[:, :, ::1] hh_v = hh_n_cache
    cdef double[:, ::1] wh_v = wh
    cdef double[:, ::1] h0_v = h0
    cdef int b = h_seq_v.shape[0]
    cdef int t_steps = h_seq_v.shape[1]
    cdef int h = h_seq_v.shape[2]
    cdef int three_h = 3 * h

    dxw = np.empty((b, t_steps, three_h))
    dwh = np.zeros((h, three_h))
    dh_next = np.zeros((b, h))
    dhw = np.empty((b, three_h))
    dh_buf = np.empty((b, h))
    cdef double[:, :, ::1] dxw_v = dxw
    cdef double[:, ::1] dwh_v = dwh
    cdef double[:, ::1] dh_next_v = dh_next
    cdef double[:, ::1] dhw_v = dhw
    cdef double[:, ::1] dh_buf_v = dh_buf

    cdef int t, i, j
    cdef double r, z, n, hh, hprev, dh, dz, dn, da_n
    cdef double* hprev_ptr
    cdef int lda
    with nogil:
        for t in range(t_steps - 1, -1, -1):
            for i in range(b):
                for j in range(h):
                    r = gates_v[i, t, j]
                    z = gates_v[i, t, h + j]
                    n = gates_v[i, t, 2 * h + j]
                    hh = hh_v[i, t, j]
                    hprev = h_seq_v[i, t - 1, j] if t > 0 else h0_v[i, j]
                    dh = dh_seq_v[i, t, j] + dh_next_v[i, j]
                    dz = dh * (hprev - n)
                    dn = dh * (1.0 - z)
                    da_n = dn * (1.0 - n * n)
                    dhw_v[i, j] = da_n * hh * r * (1.0 - r)
                    dhw_v[i, h + j] = dz * z * (1.0 - z)
                    dhw_v[i, 2 * h + j] = da_n * r
                    dxw_v[i, t, j] = dhw_v[i, j]
                    dxw_v[i, t, h + j] = dhw_v[i, h + j]
                    dxw_v[i, t, 2 * h + j] = da_n
                    dh_buf_v[i, j] = dh * z
            if t > 0:
                hprev_ptr = &h_seq_v[0, t - 1, 0]
                lda = t_steps * h
            else:
                hprev_ptr = &h0_v[0, 0]
                lda = h
            _rm_gemm(True, False, h, three_h, b, 1.0,
                     hprev_ptr, lda, &dhw_v[0, 0], three_h, 1.0, &dwh_v[0, 0], three_h)
            # dh_next = dh*z + dhw @ wh^T
            for i in range(b):
                for j in range(h):
                    dh_next_v[i, j] = dh_buf_v[i, j]
            _rm_gemm(False, True, b, h, three_h, 1.0,
                     &dhw_v[0, 0], three_h, &wh_v[0, 0], three_h, 1.0, &dh_next_v[0, 0], h)
    return dxw, dwh, dh_next
