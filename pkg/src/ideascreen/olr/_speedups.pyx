# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of _kernels_py with identical float semantics.

Same accumulation order, same libm calls, no fast-math: results are
bit-identical to the pure-Python kernels.
"""

import array

from cpython cimport array
from libc.math cimport exp, fabs, isfinite, isinf, log2

BACKEND = "c"

cdef double P_MIN = 1e-12
cdef double P_MAX = 1.0 - 1e-12


class FitDivergedError(ArithmeticError):
    def __init__(self, sweep):
        self.sweep = sweep
        super().__init__(f"loss became non-finite during sweep {sweep}")


cdef inline double _sigmoid(double z) noexcept nogil:
    cdef double e
    if z >= 0.0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


cdef inline double _clamp(double p) noexcept nogil:
    if p < P_MIN:
        return P_MIN
    if p > P_MAX:
        return P_MAX
    return p


cdef inline double _loss_bits(double p, int y) noexcept nogil:
    p = _clamp(p)
    if y == 1:
        return -log2(p)
    return -log2(1.0 - p)


cdef inline double _rel_diff(double a, double b) noexcept nogil:
    if a == b:
        return 0.0
    if isinf(a) or isinf(b):
        return 1.0
    return fabs(a - b) / (fabs(a) + fabs(b))


def dot(beta, x):
    cdef double z = 0.0
    cdef Py_ssize_t j
    for j in range(len(beta)):
        z += <double>beta[j] * <double>x[j]
    return z


def sigmoid(double z):
    return _sigmoid(z)


def clamp_p(double p):
    return _clamp(p)


def loss_bits(double p, int y):
    return _loss_bits(p, y)


def rel_diff(double a, double b):
    return _rel_diff(a, b)


def sgd_fit(beta0, xs_flat, ys, int dim, double eta, double sigma,
            int max_sweeps):
    cdef array.array xarr = array.array("d", xs_flat)
    cdef array.array yarr = array.array("i", ys)
    cdef array.array barr = array.array("d", beta0)
    cdef double[::1] x = xarr
    cdef int[::1] y = yarr
    cdef double[::1] beta = barr
    cdef Py_ssize_t n = len(ys)

    cdef double loss = 0.0
    cdef double prev = float("inf")
    cdef double sweep_loss, z, p, coef
    cdef int sweeps = 0
    cdef Py_ssize_t i, j, base
    cdef bint diverged = 0
    with nogil:
        while _rel_diff(prev, loss) > sigma and sweeps < max_sweeps:
            sweep_loss = 0.0
            for i in range(n):
                base = i * dim
                z = 0.0
                for j in range(dim):
                    z += beta[j] * x[base + j]
                p = _sigmoid(z)
                sweep_loss += _loss_bits(p, y[i])
                coef = eta * (y[i] - p)
                for j in range(dim):
                    beta[j] += coef * x[base + j]
            prev = loss
            loss = sweep_loss
            sweeps += 1
            if not isfinite(loss):
                diverged = 1
                break
            for j in range(dim):
                if not isfinite(beta[j]):
                    diverged = 1
                    break
            if diverged:
                break
    if diverged:
        raise FitDivergedError(sweeps)
    return list(barr), sweeps, loss


def total_loss_bits(beta_in, xs_flat, ys, int dim):
    cdef array.array xarr = array.array("d", xs_flat)
    cdef array.array yarr = array.array("i", ys)
    cdef array.array barr = array.array("d", beta_in)
    cdef double[::1] x = xarr
    cdef int[::1] y = yarr
    cdef double[::1] beta = barr
    cdef Py_ssize_t n = len(ys)
    cdef double total = 0.0, z
    cdef Py_ssize_t i, j, base
    with nogil:
        for i in range(n):
            base = i * dim
            z = 0.0
            for j in range(dim):
                z += beta[j] * x[base + j]
            total += _loss_bits(_sigmoid(z), y[i])
    return total


def count_mistakes(beta_in, xs_flat, ys, int dim, double epsilon):
    cdef array.array xarr = array.array("d", xs_flat)
    cdef array.array yarr = array.array("i", ys)
    cdef array.array barr = array.array("d", beta_in)
    cdef double[::1] x = xarr
    cdef int[::1] y = yarr
    cdef double[::1] beta = barr
    cdef Py_ssize_t n = len(ys)
    cdef int mistakes = 0
    cdef double z
    cdef Py_ssize_t i, j, base
    with nogil:
        for i in range(n):
            base = i * dim
            z = 0.0
            for j in range(dim):
                z += beta[j] * x[base + j]
            if _loss_bits(_sigmoid(z), y[i]) >= epsilon:
                mistakes += 1
    return mistakes
