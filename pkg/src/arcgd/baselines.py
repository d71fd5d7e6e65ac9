"""Reference SGD, Adam/AdamW and Lion steps used as comparison baselines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SGDConfig:
    lr: float = 0.005

    def __post_init__(self):
        if self.lr < 0:
            raise ValueError("lr must be >= 0")


@dataclass(frozen=True)
class AdamConfig:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    weight_decay: float = 0.0  # decoupled (AdamW) when > 0

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError("lr must be > 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("betas must lie in [0, 1)")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be >= 0")


@dataclass(frozen=True)
class LionConfig:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.99
    weight_decay: float = 0.01

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError("lr must be > 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("betas must lie in [0, 1)")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be >= 0")


# Configuration A runs Adam at ArcGD's default effective learning rate.
ADAM_CONFIG_A = AdamConfig(lr=0.0109)
ADAMW_DEFAULT = AdamConfig(weight_decay=0.01)


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, shape):
        return cls(np.zeros(shape), np.zeros(shape), 0)


def _check(x, g):
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if x.shape != g.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {g.shape}")
    return x, g


def sgd_step(x, g, cfg: SGDConfig):
    x, g = _check(x, g)
    return x - cfg.lr * g


def adam_step(state: AdamState, x, g, cfg: AdamConfig):
    """One bias-corrected Adam step; decoupled weight decay turns it into AdamW.

    Returns ``(new_state, new_x)``.
    """
    x, g = _check(x, g)
    if state.m.shape != x.shape:
        raise ValueError("Adam state does not match parameter shape")
    t = state.t + 1
    m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * g
    v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * (g * g)
    m_hat = m / (1.0 - cfg.beta1 ** t)
    v_hat = v / (1.0 - cfg.beta2 ** t)
    if cfg.weight_decay:
        x = x - cfg.lr * cfg.weight_decay * x
    x = x - cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
    return AdamState(m, v, t), x


def lion_step(m, x, g, cfg: LionConfig):
    """Lion: sign of the interpolated momentum, decoupled decay, then momentum update.

    Returns ``(new_m, new_x)``.
    """
    x, g = _check(x, g)
    m = np.asarray(m, dtype=np.float64)
    if m.shape != x.shape:
        raise ValueError("Lion momentum does not match parameter shape")
    interp = cfg.beta1 * m + (1.0 - cfg.beta1) * g
    x = x - cfg.lr * (np.sign(interp) + cfg.weight_decay * x)
    m = cfg.beta2 * m + (1.0 - cfg.beta2) * g
    return m, x
