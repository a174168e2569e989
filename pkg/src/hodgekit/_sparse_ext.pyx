# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled CSR kernels over Gaussian integers (int64 numerators).

The Python wrapper only dispatches here after bounding every partial sum
below 2**62, so the arithmetic below cannot overflow.  Operands are read
through raw data pointers; typed memoryviews cost more to acquire than the
products of the small blocks this package multiplies.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport free, malloc, qsort
from libc.string cimport memcpy

ctypedef cnp.int64_t i64

cnp.import_array()


cdef inline cnp.ndarray _c(object a):
    if (isinstance(a, cnp.ndarray) and cnp.PyArray_TYPE(<cnp.ndarray>a) == cnp.NPY_INT64
            and cnp.PyArray_IS_C_CONTIGUOUS(<cnp.ndarray>a)):
        return <cnp.ndarray>a
    return np.ascontiguousarray(a, dtype=np.int64)


cdef inline i64* _p(cnp.ndarray a) noexcept:
    return <i64*>cnp.PyArray_DATA(a)


cdef inline cnp.ndarray _empty(Py_ssize_t n):
    cdef cnp.npy_intp dims = n
    return cnp.PyArray_EMPTY(1, &dims, cnp.NPY_INT64, 0)


cdef tuple _finish(Py_ssize_t nrows, i64* indptr, i64* idx, i64* re, i64* im, Py_ssize_t nnz):
    out_p = _empty(nrows + 1)
    out_i = _empty(nnz)
    out_r = _empty(nnz)
    out_m = _empty(nnz)
    memcpy(_p(out_p), indptr, (nrows + 1) * sizeof(i64))
    if nnz:
        memcpy(_p(out_i), idx, nnz * sizeof(i64))
        memcpy(_p(out_r), re, nnz * sizeof(i64))
        memcpy(_p(out_m), im, nnz * sizeof(i64))
    return out_p, out_i, out_r, out_m


cdef int _cmp_i64(const void* a, const void* b) noexcept nogil:
    cdef i64 x = (<i64*>a)[0]
    cdef i64 y = (<i64*>b)[0]
    return (x > y) - (x < y)


def matmul(a_p, a_i, a_r, a_m, b_p, b_i, b_r, b_m, Py_ssize_t nrows, Py_ssize_t ncols):
    cdef cnp.ndarray Ap = _c(a_p), Ai = _c(a_i), Ar = _c(a_r), Am = _c(a_m)
    cdef cnp.ndarray Bp = _c(b_p), Bi = _c(b_i), Br = _c(b_r), Bm = _c(b_m)
    cdef i64* ap = _p(Ap)
    cdef i64* ai = _p(Ai)
    cdef i64* ar = _p(Ar)
    cdef i64* aim = _p(Am)
    cdef i64* bp = _p(Bp)
    cdef i64* bi = _p(Bi)
    cdef i64* br = _p(Br)
    cdef i64* bim = _p(Bm)
    cdef Py_ssize_t r, t, s, k, c, j, ntouch
    cdef Py_ssize_t bound = 0, rowbound
    for r in range(nrows):
        rowbound = 0
        for t in range(ap[r], ap[r + 1]):
            k = ai[t]
            rowbound += bp[k + 1] - bp[k]
        bound += rowbound if rowbound < ncols else ncols

    # scratch: output (3 * bound), indptr, two accumulators, marks, touched columns
    cdef Py_ssize_t width = ncols if ncols > 0 else 1
    cdef i64* buf = <i64*>malloc((3 * bound + nrows + 1 + 4 * width + 1) * sizeof(i64))
    if buf == NULL:
        raise MemoryError()
    cdef i64* oi = buf
    cdef i64* orr = oi + bound
    cdef i64* om = orr + bound
    cdef i64* op = om + bound
    cdef i64* acc_r = op + nrows + 1
    cdef i64* acc_m = acc_r + width
    cdef i64* mark = acc_m + width
    cdef i64* touch = mark + width
    cdef i64 xr, xi, yr, yi
    cdef Py_ssize_t nnz = 0
    try:
        with nogil:
            for c in range(width):
                mark[c] = -1
            op[0] = 0
            for r in range(nrows):
                ntouch = 0
                for t in range(ap[r], ap[r + 1]):
                    k = ai[t]
                    xr = ar[t]
                    xi = aim[t]
                    for s in range(bp[k], bp[k + 1]):
                        c = bi[s]
                        yr = br[s]
                        yi = bim[s]
                        if mark[c] != r:
                            mark[c] = r
                            acc_r[c] = 0
                            acc_m[c] = 0
                            touch[ntouch] = c
                            ntouch += 1
                        acc_r[c] += xr * yr - xi * yi
                        acc_m[c] += xr * yi + xi * yr
                if ntouch > 1:
                    qsort(touch, ntouch, sizeof(i64), _cmp_i64)
                for j in range(ntouch):
                    c = touch[j]
                    if acc_r[c] != 0 or acc_m[c] != 0:
                        oi[nnz] = c
                        orr[nnz] = acc_r[c]
                        om[nnz] = acc_m[c]
                        nnz += 1
                op[r + 1] = nnz
        return _finish(nrows, op, oi, orr, om, nnz)
    finally:
        free(buf)


def lincomb(a_p, a_i, a_r, a_m, i64 sa_re, i64 sa_im,
            b_p, b_i, b_r, b_m, i64 sb_re, i64 sb_im, Py_ssize_t nrows):
    cdef cnp.ndarray Ap = _c(a_p), Ai = _c(a_i), Ar = _c(a_r), Am = _c(a_m)
    cdef cnp.ndarray Bp = _c(b_p), Bi = _c(b_i), Br = _c(b_r), Bm = _c(b_m)
    cdef i64* ap = _p(Ap)
    cdef i64* ai = _p(Ai)
    cdef i64* ar = _p(Ar)
    cdef i64* aim = _p(Am)
    cdef i64* bp = _p(Bp)
    cdef i64* bi = _p(Bi)
    cdef i64* br = _p(Br)
    cdef i64* bim = _p(Bm)
    cdef Py_ssize_t bound = (ap[nrows] - ap[0]) + (bp[nrows] - bp[0])
    cdef i64* buf = <i64*>malloc((3 * bound + nrows + 1) * sizeof(i64))
    if buf == NULL:
        raise MemoryError()
    cdef i64* oi = buf
    cdef i64* orr = oi + bound
    cdef i64* om = orr + bound
    cdef i64* op = om + bound
    cdef Py_ssize_t r, t, s, tend, send, nnz = 0
    cdef i64 ca, cb, vr, vi, c_out
    try:
        with nogil:
            op[0] = 0
            for r in range(nrows):
                t = ap[r]
                tend = ap[r + 1]
                s = bp[r]
                send = bp[r + 1]
                while t < tend or s < send:
                    ca = ai[t] if t < tend else -1
                    cb = bi[s] if s < send else -1
                    if s >= send or (t < tend and ca < cb):
                        vr = sa_re * ar[t] - sa_im * aim[t]
                        vi = sa_re * aim[t] + sa_im * ar[t]
                        t += 1
                        c_out = ca
                    elif t >= tend or cb < ca:
                        vr = sb_re * br[s] - sb_im * bim[s]
                        vi = sb_re * bim[s] + sb_im * br[s]
                        s += 1
                        c_out = cb
                    else:
                        vr = sa_re * ar[t] - sa_im * aim[t] + sb_re * br[s] - sb_im * bim[s]
                        vi = sa_re * aim[t] + sa_im * ar[t] + sb_re * bim[s] + sb_im * br[s]
                        t += 1
                        s += 1
                        c_out = ca
                    if vr != 0 or vi != 0:
                        oi[nnz] = c_out
                        orr[nnz] = vr
                        om[nnz] = vi
                        nnz += 1
                op[r + 1] = nnz
        return _finish(nrows, op, oi, orr, om, nnz)
    finally:
        free(buf)


cdef inline i64 _gcd(i64 a, i64 b) noexcept nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


def gcd_maxabs(re_arr, im_arr, i64 den):
    """``(gcd(re, im, den), max(|re| + |im|))`` in one pass."""
    cdef cnp.ndarray R = _c(re_arr), M = _c(im_arr)
    cdef i64* re = _p(R)
    cdef i64* im = _p(M)
    cdef Py_ssize_t t, n = cnp.PyArray_SIZE(R)
    cdef i64 g = den, mx = 0, v
    with nogil:
        for t in range(n):
            v = (re[t] if re[t] >= 0 else -re[t]) + (im[t] if im[t] >= 0 else -im[t])
            if v > mx:
                mx = v
            if g != 1:
                g = _gcd(_gcd(g, re[t]), im[t])
    return g, mx
