# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled truncated-product kernel for dense jets.

``convolve(a, b, ia, ib, ic, size)`` returns ``out`` with
``out[ic[t]] += a[ia[t]] * b[ib[t]]`` over all precomputed index triples.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef void _acc_real(double[::1] out, const double[::1] a, const double[::1] b,
                    const cnp.intp_t[::1] ia, const cnp.intp_t[::1] ib,
                    const cnp.intp_t[::1] ic) noexcept nogil:
    cdef Py_ssize_t t, m = ia.shape[0]
    for t in range(m):
        out[ic[t]] += a[ia[t]] * b[ib[t]]


cdef void _acc_complex(double complex[::1] out, const double complex[::1] a,
                       const double complex[::1] b, const cnp.intp_t[::1] ia,
                       const cnp.intp_t[::1] ib, const cnp.intp_t[::1] ic) noexcept nogil:
    cdef Py_ssize_t t, m = ia.shape[0]
    for t in range(m):
        out[ic[t]] += a[ia[t]] * b[ib[t]]


def convolve(a, b, const cnp.intp_t[::1] ia, const cnp.intp_t[::1] ib,
             const cnp.intp_t[::1] ic, Py_ssize_t size):
    if a.dtype == np.float64 and b.dtype == np.float64:
        out_r = np.zeros(size, dtype=np.float64)
        _acc_real(out_r, a, b, ia, ib, ic)
        return out_r
    ac = np.ascontiguousarray(a, dtype=np.complex128)
    bc = np.ascontiguousarray(b, dtype=np.complex128)
    out_c = np.zeros(size, dtype=np.complex128)
    _acc_complex(out_c, ac, bc, ia, ib, ic)
    return out_c
