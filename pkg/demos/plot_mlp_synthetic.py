"""
Training a small MLP with every optimizer
=========================================

A Gaussian-cluster dataset stands in for CIFAR-10 so the demo runs in
seconds. A one-vs-rest least-squares fit gives the accuracy a linear model
reaches, for reference.
"""

from arcgd.mlp import ARCHITECTURES, TrainPolicy, least_squares_accuracy, synthetic_dataset, train
from arcgd.optim import OPTIMIZER_NAMES, comparison_spec

data = synthetic_dataset(2000, 32, 4, seed=0)
print("linear least-squares test accuracy:", least_squares_accuracy(data, "test"))

policy = TrainPolicy(max_iterations=2000, eval_checkpoints=(1000, 2000))
for name in OPTIMIZER_NAMES:
    spec = comparison_spec(name)
    res = train(ARCHITECTURES["tiny"], spec, policy, data)
    last = res.curve[-1]
    note = " (stopped early)" if res.stopped_early else ""
    print(f"{spec.name:6s} iter {res.last_iteration:5d}{note}: train acc {last['train_acc']:.3f}, "
          f"test acc {last['test_acc']:.3f}, largest update {res.max_abs_update:.4f}")

# eta_low controls how fast the floor fades for tiny gradients
for eta in (0.01, 0.1):
    res = train(ARCHITECTURES["tiny"], comparison_spec("arcgd", eta_low=eta), policy, data)
    print(f"eta_low={eta}: best test acc {max(res.best_so_far()):.3f}")
