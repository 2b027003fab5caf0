"""Online logistic regression as a weighted ensemble of fitted
coefficient vectors.

Each observation is scored by one ensemble member sampled by weight.
When the member's loss reaches the mistake threshold, its weight shrinks
by the reduction factor e^(-alpha) and, while there is capacity, a fresh
vector is fitted over everything observed so far and joins the ensemble
at weight 1.  The module also evaluates the matching regret bound and
the empirical regret of a finished run.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .kernels import FitDivergedError

__all__ = [
    "HyperParams", "EnsembleState", "StepOutcome", "FitDivergedError",
    "predict", "loss_bits", "rel_diff", "sgd_fit", "sample_param",
    "olr_step", "init_state", "theory_regret", "empirical_regret",
    "ensemble_probability", "save_state", "load_state", "state_to_dict",
    "state_from_dict", "N_FEATURES",
]

N_FEATURES = 7

SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class HyperParams:
    """Knobs of the online learner.

    epsilon: loss threshold in bits at or above which a prediction
        counts as a mistake.
    sigma: minimum relative improvement of the refit loss between
        sweeps; smaller means longer fits.
    eta0: initial learning rate; annealed as eta0 / (1 + m/delta) where
        m is the mistake count so far.
    alpha: reduction rate; a sampled member's weight is multiplied by
        e^(-alpha) on a mistake.
    theta: ensemble capacity.
    max_sweeps: hard cap on refit sweeps (the data may never satisfy
        sigma).
    """

    epsilon: float = 0.5
    sigma: float = 1e-4
    eta0: float = 0.01
    delta: float = 10.0
    alpha: float = 1.0
    theta: int = 100
    max_sweeps: int = 10_000

    def __post_init__(self):
        for name in ("epsilon", "sigma", "eta0", "delta", "alpha"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.theta < 1:
            raise ValueError("theta must be a positive integer")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be a positive integer")

    @property
    def omega(self) -> float:
        return math.exp(-self.alpha)


@dataclass(frozen=True)
class StepOutcome:
    p: float
    sampled_index: int
    mistake: bool
    refit_performed: bool
    capacity_hit: bool
    loss: float

    def __post_init__(self):
        if self.refit_performed and not self.mistake:
            raise ValueError("a refit can only follow a mistake")
        if self.capacity_hit and (not self.mistake or self.refit_performed):
            raise ValueError("capacity_hit means a mistake without growth")


@dataclass
class EnsembleState:
    hyper: HyperParams
    params: list[list[float]]            # one coefficient vector per member
    weights: list[float]                 # aligned with params, in (0, 1]
    observed_x: list[tuple[float, ...]] = field(default_factory=list)
    observed_y: list[int] = field(default_factory=list)
    mistake_count: int = 0
    rng: np.random.Generator = None

    def check(self):
        assert len(self.params) == len(self.weights) <= self.hyper.theta
        assert len(self.params) >= 1
        assert all(0.0 < w <= 1.0 for w in self.weights)
        assert sum(self.weights) > 0.0

    @property
    def n_observed(self) -> int:
        return len(self.observed_y)


def predict(beta, x) -> float:
    """Probability from one coefficient vector: overflow-safe sigmoid of
    the dot product."""
    if len(beta) != len(x):
        raise ValueError(f"dimension mismatch: {len(beta)} vs {len(x)}")
    return kernels.sigmoid(kernels.dot(beta, x))


def loss_bits(p: float, y: int) -> float:
    """-log2 of the probability assigned to the true label, with p
    clamped away from 0 and 1."""
    return kernels.loss_bits(p, y)


def rel_diff(a: float, b: float) -> float:
    """|a-b| / (|a|+|b|); equal values (including 0/0) give 0, and an
    infinite side gives 1 so comparisons against it always pass."""
    return kernels.rel_diff(a, b)


def _flatten(xs: list[tuple[float, ...]]) -> list[float]:
    flat: list[float] = []
    for x in xs:
        flat.extend(x)
    return flat


def sgd_fit(init, observed_x, observed_y, eta: float, sigma: float,
            max_sweeps: int = 10_000) -> list[float]:
    """Per-instance gradient updates over full sweeps of the observed
    set until the sweep loss stops improving by more than sigma
    (relative)."""
    if not observed_y:
        raise ValueError("cannot fit on an empty observed set")
    dim = len(init)
    beta, _sweeps, _loss = kernels.sgd_fit(
        list(init), _flatten(observed_x), list(observed_y),
        dim, eta, sigma, max_sweeps,
    )
    return beta


def sample_param(state: EnsembleState) -> int:
    """Index of one member drawn with probability weight/total."""
    weights = state.weights
    total = 0.0
    for w in weights:
        total += w
    u = state.rng.random() * total
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if u < acc:
            return i
    return len(weights) - 1


def init_state(first: tuple[tuple[float, ...], int], hyper: HyperParams,
               seed: int) -> EnsembleState:
    """Ensemble of one member fitted on the first labeled instance."""
    x, y = first
    state = EnsembleState(
        hyper=hyper,
        params=[],
        weights=[],
        observed_x=[tuple(float(v) for v in x)],
        observed_y=[int(y)],
        mistake_count=0,
        rng=np.random.default_rng(seed),
    )
    beta = sgd_fit([0.0] * len(x), state.observed_x, state.observed_y,
                   hyper.eta0, hyper.sigma, hyper.max_sweeps)
    state.params.append(beta)
    state.weights.append(1.0)
    state.check()
    return state


def olr_step(state: EnsembleState, x, y: int,
             hyper: HyperParams | None = None) -> tuple[StepOutcome, EnsembleState]:
    """One online step: observe (x, y), score it with a sampled member,
    and on a mistake shrink that member's weight and (capacity allowing)
    fit a new member over everything observed.  The state is updated in
    place and returned."""
    h = hyper or state.hyper
    x = tuple(float(v) for v in x)
    y = int(y)
    state.observed_x.append(x)
    state.observed_y.append(y)

    r = sample_param(state)
    p = predict(state.params[r], x)
    loss = loss_bits(p, y)

    mistake = loss >= h.epsilon
    refit = False
    capacity_hit = False
    if mistake:
        eta_e = h.eta0 / (1.0 + state.mistake_count / h.delta)
        state.weights[r] *= h.omega
        if len(state.params) < h.theta:
            beta = sgd_fit(state.params[r], state.observed_x, state.observed_y,
                           eta_e, h.sigma, h.max_sweeps)
            state.params.append(beta)
            state.weights.append(1.0)
            refit = True
        else:
            capacity_hit = True
        state.mistake_count += 1

    outcome = StepOutcome(
        p=p, sampled_index=r, mistake=mistake,
        refit_performed=refit, capacity_hit=capacity_hit, loss=loss,
    )
    return outcome, state


def ensemble_probability(state: EnsembleState, x) -> float:
    """Weight-averaged probability over all members.  Deterministic, so
    it suits ranking; the learning step itself samples instead."""
    total = sum(state.weights)
    x = tuple(float(v) for v in x)
    return sum(
        (w / total) * predict(beta, x)
        for beta, w in zip(state.params, state.weights)
    )


def theory_regret(n: int, alpha: float, theta: int) -> float:
    """Upper bound on (online mistakes - best member's mistakes) for a
    run of n instances at capacity theta and reduction rate alpha."""
    if theta < 2:
        raise ValueError("theta must be at least 2")
    if n < theta:
        raise ValueError(f"bound needs n >= theta (got n={n}, theta={theta})")
    if alpha <= 0:
        raise ValueError("alpha must be strictly positive")
    return (
        theta - 1
        + alpha * (n - theta + 1) / 8.0
        + math.log(math.exp(-alpha * (theta - 1)) + theta - 1) / alpha
    )


def empirical_regret(trace_x, trace_y, final_state: EnsembleState,
                     hyper: HyperParams | None = None) -> int:
    """Mistakes made during the live run minus the mistakes of the best
    member of the final ensemble over the same sequence."""
    h = hyper or final_state.hyper
    xs_flat = _flatten([tuple(float(v) for v in x) for x in trace_x])
    ys = [int(y) for y in trace_y]
    dim = len(trace_x[0]) if trace_x else N_FEATURES
    best = min(
        kernels.count_mistakes(beta, xs_flat, ys, dim, h.epsilon)
        for beta in final_state.params
    )
    return final_state.mistake_count - best


# ---------------------------------------------------------------------------
# snapshots

def _omega_digest(state: EnsembleState) -> str:
    payload = json.dumps(
        [[list(x), y] for x, y in zip(state.observed_x, state.observed_y)],
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def state_to_dict(state: EnsembleState) -> dict:
    return {
        "version": SNAPSHOT_VERSION,
        "hyper": {
            "epsilon": state.hyper.epsilon,
            "sigma": state.hyper.sigma,
            "eta0": state.hyper.eta0,
            "delta": state.hyper.delta,
            "alpha": state.hyper.alpha,
            "theta": state.hyper.theta,
            "max_sweeps": state.hyper.max_sweeps,
        },
        "params": [list(b) for b in state.params],
        "weights": list(state.weights),
        "observed_x": [list(x) for x in state.observed_x],
        "observed_y": list(state.observed_y),
        "omega_count": state.n_observed,
        "omega_digest": _omega_digest(state),
        "mistake_count": state.mistake_count,
        "rng_state": state.rng.bit_generator.state,
    }


def state_from_dict(data: dict) -> EnsembleState:
    if data.get("version") != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version: {data.get('version')!r}")
    hyper = HyperParams(**data["hyper"])
    rng = np.random.default_rng()
    rng.bit_generator.state = data["rng_state"]
    state = EnsembleState(
        hyper=hyper,
        params=[list(map(float, b)) for b in data["params"]],
        weights=[float(w) for w in data["weights"]],
        observed_x=[tuple(map(float, x)) for x in data["observed_x"]],
        observed_y=[int(y) for y in data["observed_y"]],
        mistake_count=int(data["mistake_count"]),
        rng=rng,
    )
    if data["omega_count"] != state.n_observed:
        raise ValueError("snapshot omega_count disagrees with embedded observations")
    if data["omega_digest"] != _omega_digest(state):
        raise ValueError("snapshot omega digest mismatch")
    state.check()
    return state


def save_state(state: EnsembleState, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_dict(state), fh, sort_keys=True, separators=(",", ":"))


def load_state(path) -> EnsembleState:
    with open(path, encoding="utf-8") as fh:
        return state_from_dict(json.load(fh))
