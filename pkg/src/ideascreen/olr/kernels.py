"""Kernel backend selection: compiled extension when built, else the
pure-Python implementation.  Both expose the same functions with
bit-identical float behavior; `BACKEND` names the active one."""

from . import _kernels_py

try:
    from . import _speedups as _impl
except ImportError:          # extension not built: fall back
    _impl = _kernels_py

BACKEND: str = _impl.BACKEND
FitDivergedError = _impl.FitDivergedError

dot = _impl.dot
sigmoid = _impl.sigmoid
clamp_p = _impl.clamp_p
loss_bits = _impl.loss_bits
rel_diff = _impl.rel_diff
sgd_fit = _impl.sgd_fit
total_loss_bits = _impl.total_loss_bits
count_mistakes = _impl.count_mistakes

P_MIN = _kernels_py.P_MIN
P_MAX = _kernels_py.P_MAX
