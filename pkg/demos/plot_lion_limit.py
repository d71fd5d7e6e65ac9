"""
Lion as a limiting case of ArcGD
================================

Drop the transition term (b = 0), set the ceiling and floor equal
(a = c = gamma) and switch the adaptive floor off. The update then
collapses to -gamma * sign(T), which is the Lion direction.
"""

import numpy as np

from arcgd import ArcGDConfig, OptimizerState, arcgd_step, lion_limit_step

gamma = 1e-3
cfg = ArcGDConfig(a=gamma, b=0.0, c=gamma, adaptive_c=False)
rng = np.random.default_rng(0)

arc = OptimizerState(np.zeros(8))
lion = OptimizerState(np.zeros(8))
for step in range(200):
    g = rng.normal(0, 10.0 ** rng.uniform(-3, 3), 8)
    arc = arcgd_step(arc, g, cfg)
    lion = lion_limit_step(lion, g, gamma)

print("ArcGD (reduced):", np.round(arc.x, 6))
print("Lion limit     :", np.round(lion.x, 6))
print("max difference :", np.abs(arc.x - lion.x).max())

# with the defaults the same gradients give magnitude-aware steps instead
state = arcgd_step(OptimizerState(np.zeros(4)), np.array([1e-4, 0.05, 1.0, 50.0]),
                   ArcGDConfig(use_momentum=False))
print("default ArcGD steps:", state.x)
