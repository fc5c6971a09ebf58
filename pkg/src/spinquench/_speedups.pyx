# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Cython statevector kernels (compiled backend).

Mirrors the API of ``_kernels_py`` exactly; selected by ``kernels.py`` at
import when the extension built.
"""

import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def apply_1q(cnp.complex128_t[::1] amps, int n, int q, u):
    cdef cnp.complex128_t u00 = u[0, 0], u01 = u[0, 1], u10 = u[1, 0], u11 = u[1, 1]
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t mask = 1 << q
    cdef Py_ssize_t i0, i1, i
    cdef cnp.complex128_t a0, a1
    for i in range(dim >> 1):
        i0 = ((i & ~(mask - 1)) << 1) | (i & (mask - 1))
        i1 = i0 | mask
        a0 = amps[i0]
        a1 = amps[i1]
        amps[i0] = u00 * a0 + u01 * a1
        amps[i1] = u10 * a0 + u11 * a1


def apply_diag1q(cnp.complex128_t[::1] amps, int n, int q, d0, d1):
    cdef cnp.complex128_t c0 = d0, c1 = d1
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t mask = 1 << q
    cdef Py_ssize_t i
    for i in range(dim):
        if i & mask:
            amps[i] = amps[i] * c1
        else:
            amps[i] = amps[i] * c0


def apply_2q(cnp.complex128_t[::1] amps, int n, int qa, int qb, u):
    cdef cnp.complex128_t[:, ::1] um = np.ascontiguousarray(u, dtype=np.complex128)
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t ma = 1 << qa, mb = 1 << qb
    cdef Py_ssize_t i, r, c
    cdef Py_ssize_t idx[4]
    cdef cnp.complex128_t v[4]
    cdef cnp.complex128_t acc
    for i in range(dim):
        if i & ma or i & mb:
            continue
        idx[0] = i
        idx[1] = i | ma
        idx[2] = i | mb
        idx[3] = i | ma | mb
        for r in range(4):
            v[r] = amps[idx[r]]
        for r in range(4):
            acc = 0
            for c in range(4):
                acc = acc + um[r, c] * v[c]
            amps[idx[r]] = acc


def apply_phase2q(cnp.complex128_t[::1] amps, int n, int qa, int qb, phases):
    cdef cnp.complex128_t p0 = phases[0], p1 = phases[1], p2 = phases[2], p3 = phases[3]
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t i, key
    for i in range(dim):
        key = ((i >> qa) & 1) | (((i >> qb) & 1) << 1)
        if key == 0:
            amps[i] = amps[i] * p0
        elif key == 1:
            amps[i] = amps[i] * p1
        elif key == 2:
            amps[i] = amps[i] * p2
        else:
            amps[i] = amps[i] * p3


def expect_z(cnp.complex128_t[::1] amps, int n, int q):
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t mask = 1 << q
    cdef Py_ssize_t i
    cdef double acc = 0.0, p
    for i in range(dim):
        p = amps[i].real * amps[i].real + amps[i].imag * amps[i].imag
        if i & mask:
            acc += p
        else:
            acc -= p
    return acc


def bit_prob(cnp.complex128_t[::1] amps, int n, int q):
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t mask = 1 << q
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(dim):
        if i & mask:
            acc += amps[i].real * amps[i].real + amps[i].imag * amps[i].imag
    return acc


def parity_even_prob(cnp.complex128_t[::1] amps, int n, int qa, int qb):
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(dim):
        if (((i >> qa) ^ (i >> qb)) & 1) == 0:
            acc += amps[i].real * amps[i].real + amps[i].imag * amps[i].imag
    return acc


def project_mask(cnp.complex128_t[::1] amps, mask):
    cdef cnp.uint8_t[::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(amps.shape[0]):
        if m[i]:
            acc += amps[i].real * amps[i].real + amps[i].imag * amps[i].imag
        else:
            amps[i] = 0
    return acc
