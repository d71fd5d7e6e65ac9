"""ArcGD: bounded, phase-aware gradient updates plus Rosenbrock and MLP benchmark harnesses."""

__version__ = "0.1.0"

from .core import (ArcGDConfig, OptimizerState, UpdateBreakdown, adaptive_floor_coefficient,
                   alternative_floor_term, arc_length_descent_step, arcgd_step,
                   bounded_floor_coefficient, global_norm_step, lion_limit_step,
                   middle_weight, momentum_update, transform_gradient)
from .baselines import (AdamConfig, AdamState, LionConfig, SGDConfig, adam_step,
                        lion_step, sgd_step)
from .optim import OptimizerSpec, comparison_spec
