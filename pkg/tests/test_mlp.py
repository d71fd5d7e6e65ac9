import numpy as np
import pytest

from arcgd.baselines import SGDConfig
from arcgd.core import ArcGDConfig
from arcgd.mlp import (ARCHITECTURES, MLPArchitecture, MLPParams, TrainPolicy, backward,
                       cross_entropy, eta_low_ablation, evaluate, forward, he_normal_init,
                       least_squares_accuracy, load_cifar10_binary, loss_and_grad, predict,
                       read_cifar10_records, softmax, split_dataset, synthetic_dataset, train)
from arcgd.optim import OPTIMIZER_NAMES, OptimizerSpec, comparison_spec

SMALL = MLPArchitecture((2,), input_dim=4, output_dim=3)


def fd_check(arch, seed, h=1e-6):
    rng = np.random.default_rng(seed)
    params = he_normal_init(arch, seed)
    # keep pre-activations away from the ReLU kink
    params.flat[...] += rng.normal(0, 0.1, params.flat.size)
    x = rng.normal(size=(5, arch.input_dim))
    y = rng.integers(0, arch.output_dim, 5)
    _, grads = loss_and_grad(params, x, y)
    fd = np.empty_like(params.flat)
    for i in range(params.flat.size):
        keep = params.flat[i]
        params.flat[i] = keep + h
        up = cross_entropy(forward(params, x)[0], y)
        params.flat[i] = keep - h
        down = cross_entropy(forward(params, x)[0], y)
        params.flat[i] = keep
        fd[i] = (up - down) / (2 * h)
    return grads.flat, fd


@pytest.mark.parametrize("seed", range(5))
def test_backprop_matches_finite_differences(seed):
    analytic, fd = fd_check(SMALL, seed)
    np.testing.assert_allclose(analytic, fd, rtol=1e-4, atol=1e-7)


def test_backprop_deeper_net():
    analytic, fd = fd_check(MLPArchitecture((5, 4), input_dim=3, output_dim=4), 11)
    np.testing.assert_allclose(analytic, fd, rtol=1e-4, atol=1e-7)


def test_param_layout_and_views():
    p = MLPParams(SMALL)
    assert SMALL.n_params == 4 * 2 + 2 + 2 * 3 + 3
    assert [w.shape for w in p.weights] == [(4, 2), (2, 3)]
    assert [b.shape for b in p.biases] == [(2,), (3,)]
    p.weights[1][0, 0] = 7.0
    assert p.flat[4 * 2 + 2] == 7.0
    q = p.copy()
    q.flat[0] = 1.0
    assert p.flat[0] == 0.0
    with pytest.raises(ValueError):
        MLPParams(SMALL, np.zeros(3))


def test_architecture_presets():
    assert ARCHITECTURES["tiny"].widths == (3072, 32, 10)
    assert ARCHITECTURES["deep"].hidden == (1024, 512, 256, 128)
    assert ARCHITECTURES["very_deep"].hidden == (512, 512, 512, 256, 256)
    assert len(ARCHITECTURES) == 8
    with pytest.raises(ValueError):
        MLPArchitecture((0,))


def test_he_init_statistics():
    arch = MLPArchitecture((512,), input_dim=3072, output_dim=10)
    p = he_normal_init(arch, 0)
    assert p.weights[0].std() == pytest.approx(np.sqrt(2 / 3072), rel=0.01)
    assert np.sqrt(2 / 3072) == pytest.approx(0.0255155, abs=1e-7)
    assert np.all(p.biases[0] == 0)
    np.testing.assert_array_equal(p.flat, he_normal_init(arch, 0).flat)


def test_softmax_and_cross_entropy():
    p = softmax(np.array([[1000.0, 1000.0], [0.0, np.log(3.0)]]))
    np.testing.assert_allclose(p, [[0.5, 0.5], [0.25, 0.75]])
    assert cross_entropy(np.array([[0.25, 0.75]]), [1]) == pytest.approx(-np.log(0.75))
    # clamped at 1e-12
    assert cross_entropy(np.array([[1.0, 0.0]]), [1]) == pytest.approx(-np.log(1e-12))


def test_forward_shape_checks():
    p = he_normal_init(SMALL)
    with pytest.raises(ValueError):
        forward(p, np.zeros((2, 5)))
    probs, cache = forward(p, np.ones((6, 4)))
    np.testing.assert_allclose(probs.sum(axis=1), 1.0)
    assert len(cache["inputs"]) == 2


def test_backward_zero_when_prediction_is_perfect():
    p = MLPParams(SMALL)
    p.biases[1][...] = [100.0, 0.0, 0.0]
    probs, cache = forward(p, np.ones((3, 4)))
    g = backward(p, cache, np.zeros(3, dtype=int))
    assert np.abs(g.flat).max() < 1e-30


def test_predict_and_evaluate():
    p = MLPParams(SMALL)
    p.biases[1][...] = [0.0, 1.0, 0.0]
    x = np.zeros((5, 4))
    np.testing.assert_array_equal(predict(p, x, batch_size=2), 1)
    assert evaluate(p, x, np.array([1, 1, 0, 1, 2])) == 0.6


# --- data ------------------------------------------------------------------------------

def write_cifar(path, labels, rng):
    pixels = rng.integers(0, 256, (len(labels), 3072), dtype=np.uint8)
    raw = np.hstack([np.asarray(labels, dtype=np.uint8)[:, None], pixels])
    raw.tofile(path)
    return pixels


def test_cifar_reader(tmp_path):
    rng = np.random.default_rng(0)
    pix = write_cifar(tmp_path / "data_batch_1.bin", [3, 9, 0], rng)
    write_cifar(tmp_path / "data_batch_2.bin", [1, 2], rng)
    x, y = read_cifar10_records(tmp_path)
    assert x.shape == (5, 3072) and list(y) == [3, 9, 0, 1, 2]
    np.testing.assert_allclose(x[:3], pix / 255.0)
    assert 0.0 <= x.min() and x.max() <= 1.0
    x1, _ = read_cifar10_records(tmp_path / "data_batch_1.bin")
    assert len(x1) == 3


def test_cifar_reader_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_cifar10_records(tmp_path)
    bad = tmp_path / "bad.bin"
    np.zeros(100, dtype=np.uint8).tofile(bad)
    with pytest.raises(ValueError):
        read_cifar10_records(bad)
    write_cifar(bad, [12], np.random.default_rng(0))
    with pytest.raises(ValueError, match="label"):
        read_cifar10_records(bad)


def test_cifar_loader_subset_split(tmp_path):
    write_cifar(tmp_path / "data_batch_1.bin", np.arange(50) % 10, np.random.default_rng(1))
    d = load_cifar10_binary(tmp_path, seed=0, subset=20)
    assert (len(d.x_train), len(d.x_test)) == (16, 4)
    assert d.n_classes == 10 and d.n_features == 3072
    d2 = load_cifar10_binary(tmp_path, seed=0, subset=20)
    np.testing.assert_array_equal(d.x_train, d2.x_train)


def test_split_dataset_partition():
    x = np.arange(10.0)[:, None]
    y = np.arange(10) % 2
    d = split_dataset(x, y, 2, 0.2, seed=3)
    assert sorted(np.concatenate([d.x_train, d.x_test]).ravel()) == list(range(10))
    with pytest.raises(ValueError):
        split_dataset(x, y, 2, 1.0)


def test_synthetic_dataset_is_learnable_but_not_trivial():
    d = synthetic_dataset(2000, 32, 4, seed=0)
    assert d.x_train.shape == (1600, 32) and d.x_test.shape == (400, 32)
    assert np.bincount(d.y_train, minlength=4).min() > 350
    acc = least_squares_accuracy(d)
    assert 0.8 < acc < 0.99
    with pytest.raises(ValueError):
        synthetic_dataset(1)


# --- training ----------------------------------------------------------------------------

def small_policy(**kw):
    base = dict(max_iterations=300, eval_checkpoints=(300,), eval_every=50, seed=0)
    base.update(kw)
    return TrainPolicy(**base)


def test_policy_validation():
    with pytest.raises(ValueError):
        TrainPolicy(batch_size=0)
    with pytest.raises(ValueError):
        TrainPolicy(max_iterations=100, eval_checkpoints=(200,))


def test_train_deterministic_and_bounded():
    data = synthetic_dataset(600, 8, 3, seed=2)
    spec = comparison_spec("arcgd")
    a = train(ARCHITECTURES["tiny"], spec, small_policy(), data)
    b = train(ARCHITECTURES["tiny"], spec, small_policy(), data)
    assert a.curve == b.curve
    np.testing.assert_array_equal(a.params.flat, b.params.flat)
    assert a.max_abs_update <= ArcGDConfig().step_bound
    assert a.curve[0]["iteration"] == 0
    assert a.params.arch.widths == (8, 32, 3)


def test_sgd_zero_lr_leaves_weights_unchanged():
    data = synthetic_dataset(200, 8, 3, seed=2)
    res = train(ARCHITECTURES["tiny"], OptimizerSpec("SGD", SGDConfig(0.0)),
                small_policy(early_stopping=False), data)
    init = he_normal_init(res.params.arch, 0)
    np.testing.assert_array_equal(res.params.flat, init.flat)
    assert len({r["train_loss"] for r in res.curve}) == 1


@pytest.mark.parametrize("name", OPTIMIZER_NAMES)
def test_every_optimizer_learns_synthetic(name):
    data = synthetic_dataset(1000, 16, 3, seed=5, separation=1.0)
    res = train(ARCHITECTURES["tiny"], comparison_spec(name), small_policy(max_iterations=400,
                eval_checkpoints=(400,)), data)
    assert res.curve[-1]["train_acc"] > res.curve[0]["train_acc"]
    assert res.curve[-1]["train_loss"] < res.curve[0]["train_loss"]


def test_early_stopping_and_curve_helpers():
    data = synthetic_dataset(200, 8, 3, seed=2)
    pol = small_policy(max_iterations=5000, eval_checkpoints=(5000,), early_stop_patience=100)
    res = train(ARCHITECTURES["tiny"], OptimizerSpec("SGD", SGDConfig(0.0)), pol, data)
    assert res.stopped_early and res.last_iteration == 100
    assert res.at(5000) == res.curve[-1]
    best = res.best_so_far()
    assert all(x <= y for x, y in zip(best, best[1:]))


def test_eta_low_ablation_rows():
    data = synthetic_dataset(300, 8, 3, seed=1)
    rows = eta_low_ablation(["tiny"], data, small_policy(max_iterations=200,
                            eval_checkpoints=(100, 200)))
    assert [r["checkpoint"] for r in rows] == [100, 200]
    for r in rows:
        assert r["delta"] == r["test_acc_b"] - r["test_acc_a"]
        assert (r["eta_low_a"], r["eta_low_b"]) == (0.01, 0.1)
        assert r["best_acc_a"] >= r["test_acc_a"]
    with pytest.raises(ValueError):
        eta_low_ablation(["tiny"], data, small_policy(), eta_lows=(0.1,))
