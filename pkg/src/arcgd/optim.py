"""Stateful optimizer objects wrapping the pure step functions.

The benchmark harnesses only need ``opt.step(x, g) -> x_new``; these classes
hold whatever state the underlying rule carries between calls.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .baselines import (AdamConfig, AdamState, LionConfig, SGDConfig,
                        adam_step, lion_step, sgd_step)
from .core import ArcGDConfig, OptimizerState, arcgd_step

OptimizerConfig = Union[ArcGDConfig, AdamConfig, LionConfig, SGDConfig]

OPTIMIZER_NAMES = ("arcgd", "adam", "adamw", "lion", "sgd")


class ArcGD:
    def __init__(self, cfg: ArcGDConfig):
        self.cfg = cfg
        self.state = None

    def step(self, x, g):
        if self.state is None:
            self.state = OptimizerState(np.array(x, dtype=np.float64))
        else:
            self.state.x = x
        self.state = arcgd_step(self.state, g, self.cfg)
        return self.state.x


class Adam:
    def __init__(self, cfg: AdamConfig):
        self.cfg = cfg
        self.state = None

    def step(self, x, g):
        if self.state is None:
            self.state = AdamState.zeros(np.shape(x))
        self.state, x = adam_step(self.state, x, g, self.cfg)
        return x


class Lion:
    def __init__(self, cfg: LionConfig):
        self.cfg = cfg
        self.m = None

    def step(self, x, g):
        if self.m is None:
            self.m = np.zeros(np.shape(x))
        self.m, x = lion_step(self.m, x, g, self.cfg)
        return x


class SGD:
    def __init__(self, cfg: SGDConfig):
        self.cfg = cfg

    def step(self, x, g):
        return sgd_step(x, g, self.cfg)


@dataclass(frozen=True)
class OptimizerSpec:
    """A named optimizer configuration; ``build()`` gives a fresh stateful instance."""
    name: str
    config: OptimizerConfig

    def build(self):
        if isinstance(self.config, ArcGDConfig):
            return ArcGD(self.config)
        if isinstance(self.config, AdamConfig):
            return Adam(self.config)
        if isinstance(self.config, LionConfig):
            return Lion(self.config)
        if isinstance(self.config, SGDConfig):
            return SGD(self.config)
        raise TypeError(f"unsupported optimizer config {type(self.config).__name__}")


def comparison_spec(name: str, **overrides) -> OptimizerSpec:
    """Optimizer spec with the CIFAR-10 comparison hyperparameters."""
    name = name.lower()
    if name == "arcgd":
        cfg = ArcGDConfig(**overrides)
        label = "ArcGD"
    elif name == "adam":
        cfg = AdamConfig(**overrides)
        label = "Adam"
    elif name == "adamw":
        cfg = AdamConfig(**{"weight_decay": 0.01, **overrides})
        label = "AdamW"
    elif name == "lion":
        cfg = LionConfig(**overrides)
        label = "Lion"
    elif name == "sgd":
        cfg = SGDConfig(**overrides)
        label = "SGD"
    else:
        raise ValueError(f"unknown optimizer {name!r}; expected one of {OPTIMIZER_NAMES}")
    return OptimizerSpec(label, cfg)
