"""Stochastic Rosenbrock benchmark: objective, noise, stopping rule and test matrices."""

from __future__ import annotations

import enum
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .baselines import ADAM_CONFIG_A, AdamConfig
from .core import ArcGDConfig
from .optim import OptimizerSpec

MASTER_SEED = 42
DEFAULT_DIMS = (2, 10, 100, 1000)
HUGE_DIM = 50000


def _check_dim(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("Rosenbrock needs a 1-D point with at least 2 coordinates")
    return x


def rosenbrock_value(x) -> float:
    x = _check_dim(x)
    head, tail = x[:-1], x[1:]
    return float(np.sum(100.0 * (tail - head * head) ** 2 + (1.0 - head) ** 2))


def rosenbrock_gradient(x) -> np.ndarray:
    x = _check_dim(x)
    grad = np.zeros_like(x)
    head, tail = x[:-1], x[1:]
    valley = tail - head * head
    grad[:-1] = -400.0 * head * valley - 2.0 * (1.0 - head)
    grad[1:] += 200.0 * valley
    return grad


@dataclass
class RosenbrockProblem:
    """Rosenbrock in ``n`` dimensions with additive Gaussian noise.

    Every call to ``noisy_value`` / ``noisy_gradient`` consumes fresh draws
    from ``rng``. Zero sigmas give the noiseless function.
    """
    n: int
    sigma_f: float = 1e-3
    sigma_g: float = 1e-4
    rng: np.random.Generator = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("Rosenbrock dimension must be >= 2")
        if self.sigma_f < 0 or self.sigma_g < 0:
            raise ValueError("noise levels must be >= 0")
        if self.rng is None:
            self.rng = np.random.default_rng(self.seed)

    def value(self, x):
        return rosenbrock_value(x)

    def gradient(self, x):
        return rosenbrock_gradient(x)

    def noisy_value(self, x):
        f = rosenbrock_value(x)
        if self.sigma_f:
            f += self.sigma_f * self.rng.standard_normal()
        return f

    def noisy_gradient(self, x):
        g = rosenbrock_gradient(x)
        if self.sigma_g:
            g += self.sigma_g * self.rng.standard_normal(g.shape)
        return g


def noisy_value(problem: RosenbrockProblem, x):
    return problem.noisy_value(x)


def noisy_gradient(problem: RosenbrockProblem, x):
    return problem.noisy_gradient(x)


def _stream(master_seed, run_index, purpose):
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(run_index, purpose)))


def sample_initial_point(n, master_seed=MASTER_SEED, run_index=0):
    """Uniform start in [-3, 3]^n, reproducible from (master_seed, run_index)."""
    if n < 2:
        raise ValueError("Rosenbrock dimension must be >= 2")
    return _stream(master_seed, run_index, 0).uniform(-3.0, 3.0, size=n)


def make_problem(n, master_seed=MASTER_SEED, run_index=0, sigma_f=1e-3, sigma_g=1e-4):
    return RosenbrockProblem(n, sigma_f, sigma_g, rng=_stream(master_seed, run_index, 1))


def distance_to_minimum(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(np.linalg.norm(x - 1.0))


def ema_smooth(prev, current, prev_weight=0.9):
    return prev_weight * prev + (1.0 - prev_weight) * current


@dataclass(frozen=True)
class ConvergencePolicy:
    ema_prev_weight: float = 0.9
    min_improvement: float = 1e-5
    patience: int = 1000
    loss_threshold: float = 0.1
    max_iterations: int = 1_000_000

    def __post_init__(self):
        if not 0 < self.ema_prev_weight < 1:
            raise ValueError("ema_prev_weight must lie in (0, 1)")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.max_iterations <= self.patience:
            raise ValueError("max_iterations must exceed patience")


class Status(enum.Enum):
    CONTINUE = "continue"
    CONVERGED = "converged"
    FAILED_HIGH_LOSS = "failed_high_loss"
    FAILED_MAX_ITER = "failed_max_iter"
    # only produced by run_single when the loss stops being finite
    DIVERGED = "diverged"


class Tracker(NamedTuple):
    best: float = math.inf
    stagnant: int = 0


def convergence_check(tracker: Tracker, smoothed_loss, iteration,
                      policy: ConvergencePolicy = ConvergencePolicy()):
    """Advance the plateau tracker by one smoothed loss.

    Returns ``(status, new_tracker)``. The gradient never enters the decision.
    """
    if smoothed_loss > tracker.best - policy.min_improvement:
        tracker = Tracker(tracker.best, tracker.stagnant + 1)
    else:
        tracker = Tracker(smoothed_loss, 0)
    if tracker.stagnant > policy.patience:
        if smoothed_loss <= policy.loss_threshold:
            return Status.CONVERGED, tracker
        return Status.FAILED_HIGH_LOSS, tracker
    if iteration >= policy.max_iterations:
        return Status.FAILED_MAX_ITER, tracker
    return Status.CONTINUE, tracker


@dataclass
class RunRecord:
    optimizer: str
    converged: bool
    iterations: int
    final_loss: float
    final_grad_norm: float
    distance_to_minimum: float
    wall_time_s: float
    run: int = 0
    test_set: str = ""
    status: Status = Status.CONTINUE
    final_smoothed_loss: float = math.nan
    max_step: float = 0.0
    trace: Optional[list] = field(default=None, repr=False)


def run_single(problem: RosenbrockProblem, optimizer_spec: OptimizerSpec,
               policy: ConvergencePolicy = ConvergencePolicy(), run_index=0,
               x0=None, master_seed=MASTER_SEED, trace_every=0, test_set=""):
    """Optimize one stochastic Rosenbrock instance until the stopping rule fires.

    ``trace_every > 0`` keeps ``(iteration, loss, smoothed_loss, grad_norm)``
    rows every that many iterations.
    """
    if x0 is None:
        x0 = sample_initial_point(problem.n, master_seed, run_index)
    x = np.array(x0, dtype=np.float64)
    opt = optimizer_spec.build()
    tracker = Tracker()
    smoothed = None
    loss = math.nan
    status = Status.CONTINUE
    max_step = 0.0
    trace = [] if trace_every else None
    ema_w = policy.ema_prev_weight
    it = 0

    start = time.perf_counter()
    while status is Status.CONTINUE:
        it += 1
        g = problem.noisy_gradient(x)
        x_new = opt.step(x, g)
        new_loss = problem.noisy_value(x_new)
        if not (math.isfinite(new_loss) and np.all(np.isfinite(x_new))):
            status = Status.DIVERGED
            break
        step = float(np.max(np.abs(x_new - x)))
        if step > max_step:
            max_step = step
        x, loss = x_new, new_loss
        smoothed = loss if smoothed is None else ema_w * smoothed + (1.0 - ema_w) * loss
        status, tracker = convergence_check(tracker, smoothed, it, policy)
        if trace is not None and (it % trace_every == 0 or status is not Status.CONTINUE):
            trace.append((it, loss, smoothed, float(np.linalg.norm(g))))
    elapsed = time.perf_counter() - start

    return RunRecord(
        optimizer=optimizer_spec.name,
        converged=status is Status.CONVERGED,
        iterations=it,
        final_loss=float(loss),
        final_grad_norm=float(np.linalg.norm(rosenbrock_gradient(x))),
        distance_to_minimum=distance_to_minimum(x),
        wall_time_s=elapsed,
        run=run_index,
        test_set=test_set,
        status=status,
        final_smoothed_loss=math.nan if smoothed is None else float(smoothed),
        max_step=max_step,
        trace=trace,
    )


@dataclass
class RunSummary:
    test_set: str
    optimizer: str
    total_runs: int
    converged_runs: int
    convergence_rate_pct: float
    avg_iterations: Optional[float]
    avg_time: Optional[float]
    avg_distance: Optional[float]
    avg_final_loss: Optional[float]
    avg_final_gradnorm: Optional[float]


def summarize_runs(records: Sequence[RunRecord], test_set=None) -> RunSummary:
    """Aggregate one optimizer's runs; averages use converged runs only (None if there are none)."""
    if not records:
        raise ValueError("cannot summarize an empty record list")
    names = {r.optimizer for r in records}
    if len(names) != 1:
        raise ValueError(f"records mix optimizers: {sorted(names)}")
    ok = [r for r in records if r.converged]

    def avg(attr):
        if not ok:
            return None
        return float(np.mean([getattr(r, attr) for r in ok]))

    return RunSummary(
        test_set=test_set if test_set is not None else records[0].test_set,
        optimizer=records[0].optimizer,
        total_runs=len(records),
        converged_runs=len(ok),
        convergence_rate_pct=100.0 * len(ok) / len(records),
        avg_iterations=avg("iterations"),
        avg_time=avg("wall_time_s"),
        avg_distance=avg("distance_to_minimum"),
        avg_final_loss=avg("final_loss"),
        avg_final_gradnorm=avg("final_grad_norm"),
    )


# Configuration A: Adam at ArcGD's effective learning rate 0.0109.
# Configuration B: ArcGD scaled down to effective rate 0.00099, Adam at defaults.
ARCGD_CONFIG_A = ArcGDConfig()
ARCGD_CONFIG_B = ArcGDConfig(a=0.0009, b=0.0001, c=1e-5)


def matrix_optimizers(config: str) -> List[OptimizerSpec]:
    config = config.upper()
    if config == "A":
        return [OptimizerSpec("ADAM", ADAM_CONFIG_A), OptimizerSpec("ArcGD", ARCGD_CONFIG_A)]
    if config == "B":
        return [OptimizerSpec("ADAM", AdamConfig()), OptimizerSpec("ArcGD", ARCGD_CONFIG_B)]
    raise ValueError(f"unknown configuration {config!r}; expected 'A' or 'B'")


def default_runs(dim):
    return 3 if dim >= HUGE_DIM else 10


@dataclass
class MatrixResult:
    config: str
    records: List[RunRecord]
    summaries: List[RunSummary]

    def records_for(self, test_set):
        return [r for r in self.records if r.test_set == test_set]


def _run_job(args):
    problem_args, spec, policy, run_index, master_seed, trace_every, test_set = args
    problem = make_problem(*problem_args)
    return run_single(problem, spec, policy, run_index, master_seed=master_seed,
                      trace_every=trace_every, test_set=test_set)


def run_matrix(config="A", dims=DEFAULT_DIMS, runs_per_dim=None,
               master_seed=MASTER_SEED, policy: ConvergencePolicy = ConvergencePolicy(),
               workers=1, trace_every=0, sigma_f=1e-3, sigma_g=1e-4) -> MatrixResult:
    """Run every (dimension, run, optimizer) cell of configuration A or B.

    ``runs_per_dim`` defaults to 10 (3 for 50,000-D). Both optimizers in a run
    share the start point and the noise seed. ``workers > 1`` spreads runs
    over processes; results do not depend on the worker count.
    """
    specs = matrix_optimizers(config)
    config = config.upper()
    dims = list(dims)
    if not dims or any(int(d) < 2 for d in dims):
        raise ValueError("dims must be a non-empty list of integers >= 2")
    if runs_per_dim is not None and runs_per_dim < 1:
        raise ValueError("runs_per_dim must be >= 1")

    jobs = []
    for dim in dims:
        runs = runs_per_dim or default_runs(dim)
        test_set = f"{config}{dim}"
        for run_index in range(1, runs + 1):
            for spec in specs:
                problem_args = (dim, master_seed, run_index, sigma_f, sigma_g)
                jobs.append((problem_args, spec, policy, run_index, master_seed,
                             trace_every, test_set))

    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_job, jobs))
    else:
        records = [_run_job(job) for job in jobs]

    summaries = []
    for dim in dims:
        test_set = f"{config}{dim}"
        for spec in specs:
            rows = [r for r in records if r.test_set == test_set and r.optimizer == spec.name]
            summaries.append(summarize_runs(rows, test_set))
    return MatrixResult(config, records, summaries)
