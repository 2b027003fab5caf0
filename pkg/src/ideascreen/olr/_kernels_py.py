"""Pure-Python SGD kernels; the reference for the compiled twin.

Operation order is pinned so the compiled kernel produces bit-identical
floats: dot products accumulate left to right, the per-instance update
hoists coef = eta * (y - p) and then adds coef * x_j per component, and
losses accumulate in instance order within a sweep.
"""

from __future__ import annotations

import math

BACKEND = "python"

P_MIN = 1e-12
P_MAX = 1.0 - 1e-12


class FitDivergedError(ArithmeticError):
    def __init__(self, sweep: int):
        self.sweep = sweep
        super().__init__(f"loss became non-finite during sweep {sweep}")


def dot(beta, x) -> float:
    z = 0.0
    for j in range(len(beta)):
        z += beta[j] * x[j]
    return z


def sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def clamp_p(p: float) -> float:
    if p < P_MIN:
        return P_MIN
    if p > P_MAX:
        return P_MAX
    return p


def loss_bits(p: float, y: int) -> float:
    p = clamp_p(p)
    if y == 1:
        return -math.log2(p)
    return -math.log2(1.0 - p)


def rel_diff(a: float, b: float) -> float:
    if a == b:
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return 1.0
    return abs(a - b) / (abs(a) + abs(b))


def sgd_fit(beta0, xs_flat, ys, dim: int, eta: float, sigma: float,
            max_sweeps: int):
    """Full sweeps over the observed instances until the relative change
    of the in-sweep loss drops to sigma (or the sweep cap).  Returns
    (coefficients, sweeps run, last loss in bits)."""
    beta = list(beta0)
    n = len(ys)
    loss = 0.0
    prev = math.inf
    sweeps = 0
    while rel_diff(prev, loss) > sigma and sweeps < max_sweeps:
        sweep_loss = 0.0
        for i in range(n):
            base = i * dim
            z = 0.0
            for j in range(dim):
                z += beta[j] * xs_flat[base + j]
            p = sigmoid(z)
            sweep_loss += loss_bits(p, ys[i])
            coef = eta * (ys[i] - p)
            for j in range(dim):
                beta[j] += coef * xs_flat[base + j]
        prev = loss
        loss = sweep_loss
        sweeps += 1
        if not math.isfinite(loss) or not all(map(math.isfinite, beta)):
            raise FitDivergedError(sweeps)
    return beta, sweeps, loss


def total_loss_bits(beta, xs_flat, ys, dim: int) -> float:
    """Loss of fixed coefficients over a dataset, in bits."""
    total = 0.0
    for i in range(len(ys)):
        base = i * dim
        z = 0.0
        for j in range(dim):
            z += beta[j] * xs_flat[base + j]
        total += loss_bits(sigmoid(z), ys[i])
    return total


def count_mistakes(beta, xs_flat, ys, dim: int, epsilon: float) -> int:
    """Instances on which fixed coefficients incur a loss of at least
    epsilon bits."""
    mistakes = 0
    for i in range(len(ys)):
        base = i * dim
        z = 0.0
        for j in range(dim):
            z += beta[j] * xs_flat[base + j]
        if loss_bits(sigmoid(z), ys[i]) >= epsilon:
            mistakes += 1
    return mistakes
