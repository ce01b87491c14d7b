"""Adam with bias correction; deterministic given identical inputs."""

from dataclasses import dataclass

import numpy as np


@dataclass
class AdamState:
    theta: np.ndarray
    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def init(cls, theta):
        theta = np.asarray(theta, dtype=np.float64)
        return cls(theta=theta.copy(), m=np.zeros_like(theta), v=np.zeros_like(theta))


def adam_step(state: AdamState, grad, cfg) -> AdamState:
    """One update; cfg supplies lr, beta1, beta2, eps.

    theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
    """
    g = np.asarray(grad, dtype=np.float64)
    if g.shape != state.theta.shape:
        raise ValueError(f"grad shape {g.shape} != theta shape {state.theta.shape}")
    t = state.step + 1
    m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * g
    v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * g * g
    m_hat = m / (1.0 - cfg.beta1**t)
    v_hat = v / (1.0 - cfg.beta2**t)
    theta = state.theta - cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.eps)
    return AdamState(theta=theta, m=m, v=v, step=t)
