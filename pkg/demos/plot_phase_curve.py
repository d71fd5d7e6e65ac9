"""
The three regimes of the gradient transform
===========================================

ArcGD never feeds the raw gradient to the update. Each coordinate is first
squashed through T = g / sqrt(1 + g^2), which stays inside (-1, 1). This
script prints the curve and the size of the step each regime produces.
"""

import numpy as np

from arcgd import ArcGDConfig, OptimizerState, arcgd_step, middle_weight, transform_gradient
from arcgd.core import phase_curve

# the curve itself, sampled coarsely so it fits on a terminal
g, T = phase_curve(-10, 10, num=11)
for gi, ti in zip(g, T):
    bar = "#" * int(round(20 * abs(ti)))
    print(f"g = {gi:6.1f}   T = {ti:+.4f}   {bar}")

# small gradients pass through almost unchanged
for gi in (0.001, 0.01, 0.1):
    print(f"relative change at g={gi}: {abs(transform_gradient(gi) - gi) / gi:.2e}")

# the transition weight T(1-|T|) peaks at |T| = 0.5
grid = np.linspace(0, 0.999, 1000)
print("transition weight peaks at |T| =", grid[np.argmax(middle_weight(grid))])

# step sizes for the default configuration, momentum off so one step tells the story
cfg = ArcGDConfig(use_momentum=False)
for gi in (1e-8, 1e-3, 0.1, 1.0, 10.0, 1e6):
    state = arcgd_step(OptimizerState(np.zeros(1)), np.array([gi]), cfg)
    print(f"g = {gi:8.0e}  ->  step {state.x[0]:+.3e}")
print(f"ceiling a + b + c = {cfg.step_bound:.4g}")
