"""ArcGD gradient transform and update rules.

Every function here is a pure function of its inputs. Scalar helpers accept
floats or arrays and validate their domain; ``arcgd_step`` and friends work on
whole parameter vectors and return a fresh :class:`OptimizerState`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

# Eta_low values with a documented meaning (fast / default / conservative).
KNOWN_ETA_LOW = (0.1, 0.01, 0.001)
KNOWN_OVERSHOOT_TAU = (0.1, 0.01)
DENOM_GUARD = 1e-12

FLOOR_MODES = ("standard", "bounded", "alternative")


@dataclass(frozen=True)
class ArcGDConfig:
    a: float = 0.01
    b: float = 0.001
    c: float = 1e-4
    eta_low: float = 0.01
    beta: float = 0.9
    adaptive_c: bool = True
    use_momentum: bool = True
    floor_mode: str = "standard"
    c_low: float = 1e-8
    c_high: float = 1e-4
    epsilon: float = 1e-8
    overshoot_tau: Optional[float] = None

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"ceiling constant a must be > 0, got {self.a}")
        if self.b < 0 or self.c < 0:
            raise ValueError("b and c must be non-negative")
        total = self.a + self.b + self.c
        if total >= 1:
            raise ValueError(f"a + b + c must be < 1, got {total}")
        if total >= 0.1:
            warnings.warn(f"a + b + c = {total} is not much smaller than 1",
                          stacklevel=3)
        if not self.eta_low > 0:
            raise ValueError(f"eta_low must be > 0, got {self.eta_low}")
        if self.eta_low not in KNOWN_ETA_LOW:
            warnings.warn(f"eta_low = {self.eta_low} is outside {KNOWN_ETA_LOW}",
                          stacklevel=3)
        if not 0 <= self.beta < 1:
            raise ValueError(f"beta must be in [0, 1), got {self.beta}")
        if self.floor_mode not in FLOOR_MODES:
            raise ValueError(f"floor_mode must be one of {FLOOR_MODES}")
        if self.floor_mode == "bounded" and not 0 < self.c_low <= self.c_high:
            raise ValueError("bounded floor requires 0 < c_low <= c_high")
        if self.floor_mode == "alternative" and not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.overshoot_tau is not None:
            if not 0 < self.overshoot_tau < 1:
                raise ValueError("overshoot_tau must lie in (0, 1)")
            if self.overshoot_tau not in KNOWN_OVERSHOOT_TAU:
                warnings.warn(f"overshoot_tau = {self.overshoot_tau} is outside "
                              f"{KNOWN_OVERSHOOT_TAU}", stacklevel=3)

    @property
    def effective_learning_rate(self) -> float:
        """Net coefficient of T once the update is expanded: a + b - c."""
        return self.a + self.b - self.c

    @property
    def step_bound(self) -> float:
        return self.a + self.b + self.c


@dataclass
class OptimizerState:
    x: np.ndarray
    m: np.ndarray = None
    t: int = 0
    momentum_initialized: bool = False

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        if self.m is None:
            self.m = np.zeros_like(self.x)
        else:
            self.m = np.asarray(self.m, dtype=np.float64)
        if self.x.shape != self.m.shape:
            raise ValueError(f"x and m shapes differ: {self.x.shape} vs {self.m.shape}")


class UpdateBreakdown(NamedTuple):
    high_term: np.ndarray
    middle_term: np.ndarray
    floor_term: np.ndarray


def _as_finite(g, name="gradient"):
    g = np.asarray(g, dtype=np.float64)
    if not np.all(np.isfinite(g)):
        raise ValueError(f"{name} must be finite")
    return g


def _sign(v):
    # np.sign maps -0.0 to -0.0; adding 0.0 turns that into +0.0.
    return np.sign(v) + 0.0


def _transform(g):
    # hypot avoids overflow of g**2 for |g| > 1e154
    return g / np.hypot(1.0, g)


def transform_gradient(g):
    """Map a gradient into (-1, 1) via T = g / sqrt(1 + g^2).

    Works elementwise on arrays. In float64, |T| rounds to exactly 1 once
    |g| exceeds roughly 1e8.
    """
    g = _as_finite(g)
    out = _transform(g)
    return float(out) if out.ndim == 0 else out


def _check_open_unit(T):
    T = np.asarray(T, dtype=np.float64)
    if not np.all(np.abs(T) < 1):
        raise ValueError("|T| must be < 1")
    return T


def middle_weight(T):
    """Transition weight T(1 - |T|), peaking at |T| = 0.5."""
    T = _check_open_unit(T)
    out = T * (1.0 - np.abs(T))
    return float(out) if out.ndim == 0 else out


def _adaptive_floor(absT, c, eta_low):
    denom = np.maximum(1.0 - absT, DENOM_GUARD)
    return np.minimum(c, eta_low * absT / denom)


def adaptive_floor_coefficient(T, c, eta_low):
    """c_adapt = min(c, eta_low |T| / (1 - |T|))."""
    T = _check_open_unit(T)
    if c < 0 or not eta_low > 0:
        raise ValueError("need c >= 0 and eta_low > 0")
    out = _adaptive_floor(np.abs(T), c, eta_low)
    return float(out) if out.ndim == 0 else out


def _bounded_floor(absT, c_low, c_high, eta_low):
    denom = np.maximum(1.0 - absT, DENOM_GUARD)
    return np.maximum(c_low, np.minimum(c_high, eta_low * absT / denom))


def bounded_floor_coefficient(T, c_low, c_high, eta_low=0.01):
    """Adaptive floor clamped into [c_low, c_high]."""
    if not 0 < c_low <= c_high:
        raise ValueError("need 0 < c_low <= c_high")
    T = _check_open_unit(T)
    out = _bounded_floor(np.abs(T), c_low, c_high, eta_low)
    return float(out) if out.ndim == 0 else out


def _alternative_floor(T, absT, c, epsilon):
    return c * (1.0 - absT) / (absT + epsilon) * T


def alternative_floor_term(T, c, epsilon=1e-8):
    """Full floor contribution c (1 - |T|) / (|T| + eps) * T; finite at T = 0."""
    T = _check_open_unit(T)
    out = _alternative_floor(T, np.abs(T), c, epsilon)
    return float(out) if out.ndim == 0 else out


def momentum_update(m, g, beta, initialized):
    m = np.asarray(m, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if m.shape != g.shape:
        raise ValueError(f"shape mismatch: {m.shape} vs {g.shape}")
    if not initialized:
        return g.copy()
    return beta * m + (1.0 - beta) * g


def _driving_signal(state, g, beta, use_momentum):
    if g.shape != state.x.shape:
        raise ValueError(f"gradient shape {g.shape} != parameter shape {state.x.shape}")
    if use_momentum:
        m = momentum_update(state.m, g, beta, state.momentum_initialized)
        return m, m, True
    return g, state.m, state.momentum_initialized


def arcgd_update(T, cfg: ArcGDConfig):
    """Split the ArcGD update for transformed gradients T into its three terms.

    Returns ``(breakdown, smooth_mask)``; the update is
    ``-(high + middle + floor)``. ``smooth_mask`` flags coordinates that the
    overshoot heuristic averages with their previous value (``None`` if off).
    """
    absT = np.abs(T)
    one_minus = 1.0 - absT
    high = cfg.a * T
    middle = cfg.b * T * one_minus

    mask = None
    c = cfg.c
    c_high = cfg.c_high
    if cfg.overshoot_tau is not None:
        mask = absT < cfg.overshoot_tau
        # halve a working copy only
        c = np.where(mask, 0.5 * cfg.c, cfg.c)
        c_high = np.maximum(np.where(mask, 0.5 * cfg.c_high, cfg.c_high), cfg.c_low)

    if cfg.floor_mode == "alternative":
        floor = _alternative_floor(T, absT, c, cfg.epsilon)
    else:
        if cfg.floor_mode == "bounded":
            c_eff = _bounded_floor(absT, cfg.c_low, c_high, cfg.eta_low)
        elif cfg.adaptive_c:
            c_eff = _adaptive_floor(absT, c, cfg.eta_low)
        else:
            c_eff = c
        floor = c_eff * _sign(T) * one_minus
    return UpdateBreakdown(high, middle, floor), mask


def arcgd_step(state: OptimizerState, g, cfg: ArcGDConfig, return_breakdown=False):
    """Advance ``state`` by one ArcGD step.

    With ``return_breakdown`` the result is ``(new_state, UpdateBreakdown)``.
    When overshoot control is active the breakdown describes the update
    before the averaging with the old coordinates.
    """
    g = _as_finite(g)
    signal, m, initialized = _driving_signal(state, g, cfg.beta, cfg.use_momentum)
    T = _transform(signal)
    terms, mask = arcgd_update(T, cfg)
    delta = -((terms.high_term + terms.middle_term) + terms.floor_term)
    x_new = state.x + delta
    if mask is not None:
        x_new = np.where(mask, 0.5 * (x_new + state.x), x_new)
    new_state = OptimizerState(x_new, m, state.t + 1, initialized)
    if return_breakdown:
        return new_state, terms
    return new_state


def lion_limit_step(state: OptimizerState, g, gamma, beta=0.9):
    """Sign-of-momentum update: the b = 0, a = c = gamma limit of ArcGD."""
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    g = _as_finite(g)
    signal, m, initialized = _driving_signal(state, g, beta, True)
    T = _transform(signal)
    x_new = state.x - gamma * _sign(T)
    return OptimizerState(x_new, m, state.t + 1, initialized)


def global_norm_step(state: OptimizerState, g, alpha):
    """Whole-vector variant: every component scaled by 1/sqrt(1 + ||g||^2)."""
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    g = _as_finite(g)
    if g.shape != state.x.shape:
        raise ValueError(f"gradient shape {g.shape} != parameter shape {state.x.shape}")
    scale = np.hypot(1.0, np.linalg.norm(g))
    return OptimizerState(state.x - alpha * g / scale, state.m, state.t + 1,
                          state.momentum_initialized)


def arc_length_descent_step(state: OptimizerState, g, alpha):
    """Strict arc-length step -alpha sign(g)/sqrt(1 + g^2).

    Kept only as a reference: it crawls on steep slopes and takes full
    alpha-sized steps on flat ones.
    """
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    g = _as_finite(g)
    if g.shape != state.x.shape:
        raise ValueError(f"gradient shape {g.shape} != parameter shape {state.x.shape}")
    x_new = state.x - alpha * _sign(g) / np.hypot(1.0, g)
    return OptimizerState(x_new, state.m, state.t + 1, state.momentum_initialized)


def phase_curve(g_min=-20.0, g_max=20.0, num=2001):
    """T against g, for plotting the saturation / linear / vanishing regimes."""
    g = np.linspace(g_min, g_max, num)
    return g, _transform(g)
