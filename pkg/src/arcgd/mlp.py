"""From-scratch MLP classifier (ReLU hidden layers, softmax output) and its training harness."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .core import ArcGDConfig
from .optim import OptimizerSpec

CIFAR_RECORD = 1 + 3072
CIFAR_INPUT_DIM = 3072
CIFAR_CLASSES = 10
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class MLPArchitecture:
    hidden: Tuple[int, ...]
    input_dim: int = CIFAR_INPUT_DIM
    output_dim: int = CIFAR_CLASSES
    name: str = ""

    def __post_init__(self):
        if self.input_dim < 1 or self.output_dim < 1 or any(h < 1 for h in self.hidden):
            raise ValueError("layer widths must be positive")

    @property
    def widths(self):
        return (self.input_dim, *self.hidden, self.output_dim)

    @property
    def n_params(self):
        w = self.widths
        return sum(fi * fo + fo for fi, fo in zip(w[:-1], w[1:]))

    def resized(self, input_dim, output_dim):
        return MLPArchitecture(self.hidden, input_dim, output_dim, self.name)


ARCHITECTURES: Dict[str, MLPArchitecture] = {
    name: MLPArchitecture(tuple(hidden), name=name)
    for name, hidden in [
        ("tiny", [32]),
        ("shallow", [64]),
        ("medium", [512, 256]),
        ("deep", [1024, 512, 256, 128]),
        ("very_deep", [512, 512, 512, 256, 256]),
        ("const_shallow", [256]),
        ("const_medium", [256, 256]),
        ("const_deep", [256, 256, 256]),
    ]
}


class MLPParams:
    """Weights and biases stored in one flat vector.

    ``weights[i]`` (fan_in x fan_out) and ``biases[i]`` are views into
    ``flat``, so an optimizer can update every parameter with one array op.
    """

    def __init__(self, arch: MLPArchitecture, flat=None):
        self.arch = arch
        self.flat = np.zeros(arch.n_params) if flat is None else np.asarray(flat, dtype=np.float64)
        if self.flat.shape != (arch.n_params,):
            raise ValueError(f"expected {arch.n_params} parameters, got {self.flat.shape}")
        self.weights, self.biases = [], []
        offset = 0
        w = arch.widths
        for fan_in, fan_out in zip(w[:-1], w[1:]):
            self.weights.append(self.flat[offset:offset + fan_in * fan_out].reshape(fan_in, fan_out))
            offset += fan_in * fan_out
            self.biases.append(self.flat[offset:offset + fan_out])
            offset += fan_out

    def copy(self):
        return MLPParams(self.arch, self.flat.copy())

    def zeros_like(self):
        return MLPParams(self.arch)


def he_normal_init(arch: MLPArchitecture, seed=0) -> MLPParams:
    rng = np.random.default_rng(seed)
    params = MLPParams(arch)
    for W in params.weights:
        W[...] = rng.normal(0.0, np.sqrt(2.0 / W.shape[0]), size=W.shape)
    return params


def softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def forward(params: MLPParams, batch):
    """Returns ``(probabilities, cache)``; cache holds each layer's input and pre-activation."""
    a = np.asarray(batch, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != params.arch.input_dim:
        raise ValueError(f"batch must have shape (n, {params.arch.input_dim}), got {a.shape}")
    inputs, pre = [], []
    last = len(params.weights) - 1
    for i, (W, b) in enumerate(zip(params.weights, params.biases)):
        inputs.append(a)
        z = a @ W + b
        pre.append(z)
        a = z if i == last else np.maximum(z, 0.0)
    probs = softmax(a)
    return probs, {"inputs": inputs, "pre": pre, "probs": probs}


def cross_entropy(probabilities, labels):
    labels = np.asarray(labels)
    p = probabilities[np.arange(len(labels)), labels]
    return float(np.mean(-np.log(np.maximum(p, PROB_FLOOR))))


def backward(params: MLPParams, cache, labels) -> MLPParams:
    """Exact gradient of the mean cross-entropy, as an MLPParams of the same layout."""
    labels = np.asarray(labels)
    probs = cache["probs"]
    n = probs.shape[0]
    if labels.shape != (n,):
        raise ValueError("labels do not match the cached batch")
    grads = params.zeros_like()
    delta = probs.copy()
    delta[np.arange(n), labels] -= 1.0
    delta /= n
    for i in range(len(params.weights) - 1, -1, -1):
        grads.weights[i][...] = cache["inputs"][i].T @ delta
        grads.biases[i][...] = delta.sum(axis=0)
        if i:
            delta = (delta @ params.weights[i].T) * (cache["pre"][i - 1] > 0)
    return grads


def loss_and_grad(params, x, y):
    probs, cache = forward(params, x)
    return cross_entropy(probs, y), backward(params, cache, y)


def predict(params, x, batch_size=2048):
    out = []
    for start in range(0, len(x), batch_size):
        probs, _ = forward(params, x[start:start + batch_size])
        out.append(np.argmax(probs, axis=1))  # argmax breaks ties toward the lowest class
    return np.concatenate(out) if out else np.zeros(0, dtype=int)


def evaluate(params: MLPParams, x, y) -> float:
    y = np.asarray(y)
    if len(y) == 0:
        raise ValueError("cannot evaluate on an empty split")
    return float(np.mean(predict(params, x) == y))


def _loss_acc(params, x, y, batch_size=2048):
    total_loss, correct = 0.0, 0
    for start in range(0, len(x), batch_size):
        xb, yb = x[start:start + batch_size], y[start:start + batch_size]
        probs, _ = forward(params, xb)
        total_loss += cross_entropy(probs, yb) * len(yb)
        correct += int(np.sum(np.argmax(probs, axis=1) == yb))
    return total_loss / len(x), correct / len(x)


# ---------------------------------------------------------------------------
# data

@dataclass
class Dataset:
    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray
    n_classes: int
    name: str = ""

    @property
    def n_features(self):
        return self.x_train.shape[1]


def split_dataset(x, y, n_classes, test_fraction=0.2, seed=0, name=""):
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must lie in (0, 1)")
    order = np.random.default_rng(seed).permutation(len(x))
    n_test = int(round(test_fraction * len(x)))
    test, train = order[:n_test], order[n_test:]
    return Dataset(x[train], y[train], x[test], y[test], n_classes, name)


def read_cifar10_records(path) -> Tuple[np.ndarray, np.ndarray]:
    """Parse CIFAR-10 binary records (1 label byte + 3072 pixel bytes each).

    ``path`` is a single ``.bin`` file or a directory holding ``data_batch_*.bin``.
    """
    path = Path(path)
    if path.is_dir():
        files = sorted(path.glob("data_batch_*.bin"))
        if not files:
            raise FileNotFoundError(f"no data_batch_*.bin files in {path}")
    else:
        files = [path]
    xs, ys = [], []
    for f in files:
        raw = np.fromfile(f, dtype=np.uint8)
        if raw.size == 0 or raw.size % CIFAR_RECORD:
            raise ValueError(f"{f}: size {raw.size} is not a multiple of {CIFAR_RECORD}")
        rec = raw.reshape(-1, CIFAR_RECORD)
        labels = rec[:, 0].astype(np.int64)
        if labels.max() >= CIFAR_CLASSES:
            raise ValueError(f"{f}: label {labels.max()} out of range 0-9")
        ys.append(labels)
        xs.append(rec[:, 1:].astype(np.float64) / 255.0)
    return np.concatenate(xs), np.concatenate(ys)


def load_cifar10_binary(path, seed=0, subset=None, test_fraction=0.2) -> Dataset:
    """Load CIFAR-10 binary batches, optionally keep a seeded random ``subset``, split 80:20."""
    x, y = read_cifar10_records(path)
    if subset is not None:
        if subset < 2:
            raise ValueError("subset must be >= 2")
        keep = np.sort(np.random.default_rng(seed).permutation(len(x))[:subset])
        x, y = x[keep], y[keep]
    return split_dataset(x, y, CIFAR_CLASSES, test_fraction, seed, name="cifar10")


def synthetic_dataset(n_samples=2000, n_features=32, n_classes=4, seed=0,
                      separation=0.5, noise=1.0, test_fraction=0.2) -> Dataset:
    """Gaussian class clusters around random centres; labels assigned round-robin."""
    if n_samples < 2 or n_features < 1 or n_classes < 2:
        raise ValueError("need n_samples >= 2, n_features >= 1, n_classes >= 2")
    rng = np.random.default_rng(seed)
    centres = separation * rng.standard_normal((n_classes, n_features))
    y = rng.permutation(np.arange(n_samples) % n_classes)
    x = centres[y] + noise * rng.standard_normal((n_samples, n_features))
    return split_dataset(x, y, n_classes, test_fraction, seed, name="synthetic")


def least_squares_accuracy(dataset: Dataset, split="train") -> float:
    """One-vs-rest linear least-squares classifier; a baseline the MLP should match."""
    def design(x):
        return np.hstack([x, np.ones((len(x), 1))])
    targets = np.eye(dataset.n_classes)[dataset.y_train]
    coef, *_ = np.linalg.lstsq(design(dataset.x_train), targets, rcond=None)
    x, y = (dataset.x_train, dataset.y_train) if split == "train" else (dataset.x_test, dataset.y_test)
    return float(np.mean(np.argmax(design(x) @ coef, axis=1) == y))


# ---------------------------------------------------------------------------
# training

@dataclass(frozen=True)
class TrainPolicy:
    batch_size: int = 128
    max_iterations: int = 20000
    eval_checkpoints: Tuple[int, ...] = (5000, 20000)
    eval_every: int = 100
    early_stopping: bool = True
    early_stop_patience: int = 500
    early_stop_min_delta: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if min(self.batch_size, self.max_iterations, self.eval_every,
               self.early_stop_patience) < 1:
            raise ValueError("batch_size, max_iterations, eval_every and patience must be positive")
        if any(c < 1 or c > self.max_iterations for c in self.eval_checkpoints):
            raise ValueError("checkpoints must lie in [1, max_iterations]")
        if self.early_stop_min_delta < 0:
            raise ValueError("early_stop_min_delta must be >= 0")


@dataclass
class TrainResult:
    curve: List[dict]
    params: MLPParams
    stopped_early: bool
    last_iteration: int
    max_abs_update: float
    # early stopping watches held-out (test split) accuracy
    monitor: str = "test_acc"

    def at(self, iteration):
        """Metrics at ``iteration``, or the last row before it if training stopped sooner."""
        rows = [r for r in self.curve if r["iteration"] <= iteration]
        return rows[-1]

    def best_so_far(self, key="test_acc"):
        return list(np.maximum.accumulate([r[key] for r in self.curve]))


def _batches(n, batch_size, rng):
    """Endless minibatch indices: reshuffle every epoch, walk through sequentially."""
    batch_size = min(batch_size, n)
    while True:
        order = rng.permutation(n)
        for start in range(0, n - batch_size + 1, batch_size):
            yield order[start:start + batch_size]


def train(arch: MLPArchitecture, optimizer_spec: OptimizerSpec, policy: TrainPolicy,
          dataset: Dataset, init_seed=None) -> TrainResult:
    """Minibatch training with periodic evaluation and accuracy-based early stopping."""
    if arch.input_dim != dataset.n_features or arch.output_dim != dataset.n_classes:
        arch = arch.resized(dataset.n_features, dataset.n_classes)
    params = he_normal_init(arch, policy.seed if init_seed is None else init_seed)
    opt = optimizer_spec.build()
    batches = _batches(len(dataset.x_train), policy.batch_size,
                       np.random.default_rng(policy.seed + 1))
    checkpoints = set(policy.eval_checkpoints)

    curve = []

    def record(it):
        train_loss, train_acc = _loss_acc(params, dataset.x_train, dataset.y_train)
        _, test_acc = _loss_acc(params, dataset.x_test, dataset.y_test)
        row = {"iteration": it, "train_loss": train_loss, "train_acc": train_acc,
               "test_acc": test_acc}
        curve.append(row)
        return row

    best = record(0)["test_acc"]
    best_it = 0
    stopped = False
    max_update = 0.0
    it = 0
    while it < policy.max_iterations:
        it += 1
        idx = next(batches)
        _, grads = loss_and_grad(params, dataset.x_train[idx], dataset.y_train[idx])
        new_flat = opt.step(params.flat, grads.flat)
        upd = float(np.max(np.abs(new_flat - params.flat)))
        if upd > max_update:
            max_update = upd
        params.flat[...] = new_flat
        if it % policy.eval_every == 0 or it in checkpoints or it == policy.max_iterations:
            acc = record(it)["test_acc"]
            if acc > best + policy.early_stop_min_delta:
                best, best_it = acc, it
            elif policy.early_stopping and it - best_it >= policy.early_stop_patience:
                stopped = True
                break
    return TrainResult(curve, params, stopped, it, max_update)


def eta_low_ablation(archs: Sequence[str], dataset: Dataset, policy: TrainPolicy,
                     eta_lows=(0.01, 0.1)) -> List[dict]:
    """Train ArcGD with two eta_low values on each architecture.

    Returns one row per (architecture, checkpoint) with both test accuracies,
    their best-so-far values, and ``delta = second - first``.
    """
    if len(eta_lows) != 2:
        raise ValueError("the ablation compares exactly two eta_low values")
    rows = []
    for name in archs:
        arch = ARCHITECTURES[name] if isinstance(name, str) else name
        results = [train(arch, OptimizerSpec("ArcGD", ArcGDConfig(eta_low=e)), policy, dataset)
                   for e in eta_lows]
        for cp in policy.eval_checkpoints:
            accs = [res.at(cp)["test_acc"] for res in results]
            bests = [max(r["test_acc"] for r in res.curve if r["iteration"] <= cp)
                     for res in results]
            rows.append({
                "arch": arch.name or name,
                "checkpoint": cp,
                "test_acc_a": accs[0],
                "test_acc_b": accs[1],
                "best_acc_a": bests[0],
                "best_acc_b": bests[1],
                "delta": accs[1] - accs[0],
                "eta_low_a": eta_lows[0],
                "eta_low_b": eta_lows[1],
            })
    return rows
