# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled moment kernels: structured (H - shift) application and the
symmetric-split power moments <psi|(H - shift)^m|psi>."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

BACKEND = "cython"


cdef void _apply(double omega0, double omega, double g, double shift,
                 const double* vin, double* vout, Py_ssize_t n1) noexcept nogil:
    cdef Py_ssize_t n
    cdef double c = 2.0 * g
    cdef double hd = -0.5 * omega0 - shift
    cdef double hu = 0.5 * omega0 - shift
    cdef const double* d = vin
    cdef const double* u = vin + n1
    cdef double acc
    for n in range(n1):
        acc = (omega * n + hd) * d[n]
        if n > 0:
            acc += c * sqrt(<double> n) * u[n - 1]
        if n + 1 < n1:
            acc += c * sqrt(<double> (n + 1)) * u[n + 1]
        vout[n] = acc
    for n in range(n1):
        acc = (omega * n + hu) * u[n]
        if n > 0:
            acc += c * sqrt(<double> n) * d[n - 1]
        if n + 1 < n1:
            acc += c * sqrt(<double> (n + 1)) * d[n + 1]
        vout[n1 + n] = acc


cdef double _dot(const double* a, const double* b, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0
    for i in range(n):
        s += a[i] * b[i]
    return s


def apply_shifted(double omega0, double omega, double g, double shift,
                  cnp.ndarray[double, ndim=1] v, out=None):
    """out = (H - shift) v, exploiting the tridiagonal block structure."""
    cdef Py_ssize_t dim = v.shape[0]
    cdef Py_ssize_t n1 = dim // 2
    cdef cnp.ndarray[double, ndim=1] res
    if out is None:
        res = np.empty(dim)
    else:
        res = out
    cdef double[::1] vin = np.ascontiguousarray(v)
    cdef double[::1] vout = res
    with nogil:
        _apply(omega0, omega, g, shift, &vin[0], &vout[0], n1)
    return res


def raw_moments(double omega0, double omega, double g, double shift,
                cnp.ndarray[double, ndim=1] psi, int n_moments):
    """mu[m-1] = <psi|(H - shift)^m|psi> for m = 1..n_moments."""
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t n1 = dim // 2
    cdef int n_apps = (n_moments + 1) // 2
    cdef cnp.ndarray[double, ndim=2] work = np.empty((n_apps + 1, dim))
    cdef cnp.ndarray[double, ndim=1] mu = np.empty(n_moments)
    cdef double[:, ::1] w = work
    cdef double[::1] p = np.ascontiguousarray(psi)
    cdef double[::1] m_out = mu
    cdef Py_ssize_t i
    cdef int k, m, j
    with nogil:
        for i in range(dim):
            w[0, i] = p[i]
        for k in range(n_apps):
            _apply(omega0, omega, g, shift, &w[k, 0], &w[k + 1, 0], n1)
        for m in range(1, n_moments + 1):
            j = m // 2
            m_out[m - 1] = _dot(&w[j, 0], &w[m - j, 0], dim)
    return mu
