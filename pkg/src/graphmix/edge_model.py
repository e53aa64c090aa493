"""Two-state model of a single vertex pair under the swap chains.

A pair is either absent (state 0) or present (state 1). One chain step
flips 0->1 with probability alpha and 1->0 with probability beta; the
transition matrix is [[1-a, a], [b, 1-b]] with eigenvalues 1 and
1-(a+b). Everything downstream (stationary occupancy, geometric decay of
the initial condition, the step budget needed to reach a tolerance) is
closed form in (alpha, beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChainError, InvalidInputError

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class EdgeChainModel:
    alpha: float
    beta: float
    mode: str
    d_u: int | None = None
    d_v: int | None = None
    m: int | None = None
    f_du: int | None = None
    f_dv: int | None = None
    joint: int | None = None
    frozen: bool = False

    def gamma(self) -> float:
        return self.alpha + self.beta


def dd_alpha_beta(d_u: int, d_v: int, m: int):
    """Appearance/removal probabilities for the degree-preserving move."""
    if m < 1:
        raise InvalidInputError("edge count must be positive")
    if d_u < 1 or d_v < 1:
        raise InvalidInputError("degrees must be positive")
    alpha = (d_u * d_v) / (2.0 * m * m)
    beta = 1.0 - (1.0 - 1.0 / m) ** 2
    return alpha, beta


def jdd_alpha_beta(d_u: int, d_v: int, m: int, f_du: int, f_dv: int, J_dudv: int):
    """Appearance/removal probabilities for the joint-degree-preserving move.

    f_* are the degree-class sizes of the endpoints and J_dudv the number
    of edges joining the two classes.
    """
    if m < 1:
        raise InvalidInputError("edge count must be positive")
    if f_du < 1 or f_dv < 1:
        raise InvalidInputError("degree-class sizes must be positive")
    if J_dudv < 0:
        raise InvalidInputError("joint count must be nonnegative")
    beta = 1.0 / m + (f_du - 1) / (2.0 * m * f_du) + (f_dv - 1) / (2.0 * m * f_dv)
    alpha = 2.0 * J_dudv / (m * float(f_du) * float(f_dv))
    return alpha, beta


def dd_model(d_u: int, d_v: int, m: int) -> EdgeChainModel:
    alpha, beta = dd_alpha_beta(d_u, d_v, m)
    return EdgeChainModel(alpha=alpha, beta=beta, mode="dd", d_u=d_u, d_v=d_v, m=m)


def jdd_model(d_u: int, d_v: int, m: int, f_du: int, f_dv: int, J_dudv: int) -> EdgeChainModel:
    """Model for a pair under the jdd move.

    When both degree classes are singletons no swap can touch the pair;
    the model is returned with frozen=True and its occupancy never moves.
    """
    alpha, beta = jdd_alpha_beta(d_u, d_v, m, f_du, f_dv, J_dudv)
    return EdgeChainModel(
        alpha=alpha,
        beta=beta,
        mode="jdd",
        d_u=d_u,
        d_v=d_v,
        m=m,
        f_du=f_du,
        f_dv=f_dv,
        joint=J_dudv,
        frozen=(f_du == 1 and f_dv == 1),
    )


def transition_matrix(model: EdgeChainModel) -> np.ndarray:
    a, b = model.alpha, model.beta
    return np.array([[1.0 - a, a], [b, 1.0 - b]], dtype=np.float64)


def stationary(model: EdgeChainModel):
    """Limiting (absent, present) probabilities."""
    if model.frozen:
        raise DegenerateChainError("pair is frozen: no move can change it")
    g = model.alpha + model.beta
    if g <= 0.0:
        raise DegenerateChainError("alpha + beta must be positive")
    return model.beta / g, model.alpha / g


def stopping_steps(m: int, epsilon: float, mode: str) -> int:
    """Steps after which every pair's distribution is within epsilon of
    its limit: (m/2)·ln(1/eps) for dd, m·ln(1/eps) for jdd, rounded up."""
    if m < 1:
        raise InvalidInputError("edge count must be positive")
    if not (0.0 < epsilon < 1.0):
        raise InvalidInputError("epsilon must be in (0, 1)")
    if mode == "dd":
        x = 0.5 * m * math.log(1.0 / epsilon)
    elif mode == "jdd":
        x = float(m) * math.log(1.0 / epsilon)
    else:
        raise InvalidInputError(f"unknown chain mode {mode!r}")
    # absorb float noise when the product lands within 1e-12 of an integer
    return int(math.ceil(x * (1.0 - 1e-12)))


def _as_distribution(initial):
    if initial == "absent":
        return 1.0, 0.0
    if initial == "present":
        return 0.0, 1.0
    p0, p1 = float(initial[0]), float(initial[1])
    if p0 < 0.0 or p1 < 0.0 or abs(p0 + p1 - 1.0) > 1e-9:
        raise InvalidInputError("initial must be a probability distribution over 2 states")
    return p0, p1


def decay_error(model: EdgeChainModel, N: int, initial) -> float:
    """Euclidean distance of the step-N distribution from the limit.

    The difference vector lives on the line (x, -x), so the distance is
    |1-gamma|^N * |p0 - pi0| * sqrt(2) exactly.
    """
    if N < 0:
        raise InvalidInputError("steps must be nonnegative")
    p0, _ = _as_distribution(initial)
    pi0, _ = stationary(model)
    lam = 1.0 - (model.alpha + model.beta)
    delta = p0 - pi0
    if N == 0:
        return abs(delta) * _SQRT2
    return (abs(lam) ** N) * abs(delta) * _SQRT2
