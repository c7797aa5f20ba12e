# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled conditional log-determinant kernel.

Same algorithm and tolerances as ``coopifc._pykernels``: Householder
triangularization of the factor rows, conditioning rows first.
"""

from libc.math cimport sqrt, log2, NAN
from libc.stdlib cimport malloc, free

ctypedef double complex cplx


cdef inline double _abs2(cplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef double _cond_logdet(const cplx[:, ::1] F, const Py_ssize_t[::1] target,
                         const Py_ssize_t[::1] given, double drop_tol,
                         double deg_tol) noexcept nogil:
    cdef Py_ssize_t ng = given.shape[0]
    cdef Py_ssize_t nt = target.shape[0]
    cdef Py_ssize_t k = ng + nt
    cdef Py_ssize_t rows = F.shape[1]
    cdef Py_ssize_t i, j, c, r = 0, src
    cdef double res, nrm, beta, total = 0.0, a0
    cdef cplx phase, s

    # A is rows x k, column-major: A[c * rows + i]
    cdef cplx* A = <cplx*> malloc((rows * k + 1) * sizeof(cplx))
    cdef double* norms = <double*> malloc((k + 1) * sizeof(double))
    if A == NULL or norms == NULL:
        free(A); free(norms)
        return NAN

    for c in range(k):
        src = given[c] if c < ng else target[c - ng]
        nrm = 0.0
        for i in range(rows):
            A[c * rows + i] = F[src, i].conjugate()
            nrm += _abs2(A[c * rows + i])
        norms[c] = sqrt(nrm)

    for j in range(k):
        res = 0.0
        if r < rows:
            for i in range(r, rows):
                res += _abs2(A[j * rows + i])
            res = sqrt(res)
        if j < ng:
            if res <= drop_tol * norms[j] or res == 0.0:
                continue
        else:
            if res <= deg_tol * norms[j] or res == 0.0:
                free(A); free(norms)
                return NAN
            total += 2.0 * log2(res)
        if j + 1 < k:
            # reflector v overwrites column j from row r: v = x + phase*res*e1
            a0 = sqrt(_abs2(A[j * rows + r]))
            if a0 > 0.0:
                phase = A[j * rows + r] / a0
            else:
                phase = 1.0
            A[j * rows + r] = A[j * rows + r] + phase * res
            beta = 0.0
            for i in range(r, rows):
                beta += _abs2(A[j * rows + i])
            if beta > 0.0:
                beta = 2.0 / beta
                for c in range(j + 1, k):
                    s = 0.0
                    for i in range(r, rows):
                        s = s + A[j * rows + i].conjugate() * A[c * rows + i]
                    s = s * beta
                    for i in range(r, rows):
                        A[c * rows + i] = A[c * rows + i] - s * A[j * rows + i]
        r += 1

    free(A); free(norms)
    return total


def cond_logdet(const cplx[:, ::1] F, const Py_ssize_t[::1] target,
                const Py_ssize_t[::1] given, double drop_tol, double deg_tol):
    cdef double r
    with nogil:
        r = _cond_logdet(F, target, given, drop_tol, deg_tol)
    return r


def combo(const cplx[:, ::1] F, list program, double drop_tol, double deg_tol):
    """Weighted sum of conditional log-dets; ``program`` holds
    ``(coef, target, given)`` triples."""
    cdef double total = 0.0, v, coef
    cdef const Py_ssize_t[::1] t
    cdef const Py_ssize_t[::1] gv
    for item in program:
        coef = item[0]
        t = item[1]
        gv = item[2]
        v = _cond_logdet(F, t, gv, drop_tol, deg_tol)
        if v != v:
            return NAN
        total += coef * v
    return total
