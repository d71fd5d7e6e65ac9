"""
ArcGD against Adam on the noisy 2-D Rosenbrock valley
=====================================================

Both optimizers start from the same random point and see the same noise
stream. Adam runs at ArcGD's effective learning rate a + b - c = 0.0109.
"""

from arcgd.report import records_csv_text
from arcgd.rosenbrock import run_matrix

result = run_matrix("A", dims=[2], runs_per_dim=5, trace_every=500)

# per-run table, the same text the CLI writes to records_A2.csv
print(records_csv_text(result.records, include_time=False))

for s in result.summaries:
    print(f"{s.optimizer:6s} converged {s.converged_runs}/{s.total_runs}, "
          f"mean iterations {s.avg_iterations:.0f}, mean distance {s.avg_distance:.2e}")

# the loss trace of one ArcGD run, thinned to every 500 iterations
arc = [r for r in result.records if r.optimizer == "ArcGD"][0]
for it, loss, smoothed, gnorm in arc.trace[:10]:
    print(f"{it:6d}  loss {loss:10.4e}  smoothed {smoothed:10.4e}  |g| {gnorm:9.3e}")
print("largest single-coordinate step:", arc.max_step)
