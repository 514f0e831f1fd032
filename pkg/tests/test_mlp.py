import numpy as np
import pytest

from devnagari_ocr import mlp
from devnagari_ocr.errors import (DimensionMismatch, EmptyDataset, FormatError,
                                  InvalidSizes, VersionMismatch)

XOR = [([0.0, 0.0], 0), ([0.0, 1.0], 1), ([1.0, 0.0], 1), ([1.0, 1.0], 0)]
XOR_SEED = 7


def argmax_accuracy(net, samples):
    hits = sum(
        int(np.argmax(mlp.forward(net, x))) == label for x, label in samples)
    return hits / len(samples)


class TestInit:
    def test_same_seed_same_weights(self):
        a = mlp.init((32, 20, 49), seed=11)
        b = mlp.init((32, 20, 49), seed=11)
        for pa, pb in zip((a.w1, a.b1, a.w2, a.b2), (b.w1, b.b1, b.w2, b.b2)):
            assert (pa == pb).all()

    def test_table_sizes_accepted(self):
        for sizes in ((32, 20, 49), (16, 30, 49), (200, 70, 49)):
            net = mlp.init(sizes, seed=0)
            assert net.sizes == sizes

    def test_zero_hidden_rejected(self):
        with pytest.raises(InvalidSizes):
            mlp.init((16, 0, 5), seed=0)

    def test_single_output_rejected(self):
        with pytest.raises(InvalidSizes):
            mlp.init((16, 4, 1), seed=0)

    def test_range(self):
        net = mlp.init((50, 40, 30), seed=3)
        for arr in (net.w1, net.b1, net.w2, net.b2):
            assert (np.abs(arr) <= 0.5).all()


class TestForward:
    def test_all_zero_net_outputs_half(self):
        net = mlp.Mlp(w1=np.zeros((3, 4)), b1=np.zeros(3),
                      w2=np.zeros((5, 3)), b2=np.zeros(5))
        out = mlp.forward(net, np.zeros(4))
        assert out.tolist() == [0.5] * 5

    def test_hand_computed_chain(self):
        # 1-1-1 shape padded to two outputs: sigmoid(sigmoid(0)) = sigmoid(0.5)
        net = mlp.Mlp(w1=np.ones((1, 1)), b1=np.zeros(1),
                      w2=np.ones((2, 1)), b2=np.zeros(2))
        out = mlp.forward(net, [0.0])
        assert out[0] == pytest.approx(1 / (1 + np.exp(-0.5)), abs=1e-12)
        assert out[0] == pytest.approx(0.62245933, abs=1e-7)

    def test_wrong_length_rejected(self):
        net = mlp.init((4, 3, 2), seed=0)
        with pytest.raises(DimensionMismatch):
            mlp.forward(net, np.zeros(5))

    def test_outputs_strictly_inside_unit_interval(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            net = mlp.init((8, 6, 4), seed=int(rng.integers(1 << 30)))
            out = mlp.forward(net, rng.random(8))
            assert ((out > 0) & (out < 1)).all()


class TestTrain:
    def test_zero_epochs_leaves_net_unchanged(self):
        net = mlp.init((2, 3, 2), seed=1)
        cfg = mlp.TrainConfig(max_epochs=0)
        trained, history = mlp.train(net, XOR, cfg)
        assert history == []
        assert (trained.w1 == net.w1).all() and (trained.w2 == net.w2).all()

    def test_xor_reaches_full_accuracy(self):
        net = mlp.init((2, 4, 2), seed=XOR_SEED)
        cfg = mlp.TrainConfig(learning_rate=0.8, momentum=0.7,
                              max_epochs=5000, sse_tolerance=0.0,
                              seed=XOR_SEED)
        trained, history = mlp.train(net, XOR, cfg)
        assert argmax_accuracy(trained, XOR) == 1.0
        assert len(history) <= 5000

    def test_single_sample_sse_settles(self):
        net = mlp.init((3, 4, 2), seed=5)
        cfg = mlp.TrainConfig(max_epochs=400, sse_tolerance=0.0)
        _, history = mlp.train(net, [([0.2, 0.8, 0.5], 1)], cfg)
        tail = history[-10:]
        assert all(a >= b - 1e-12 for a, b in zip(tail, tail[1:]))

    def test_training_is_deterministic(self):
        cfg = mlp.TrainConfig(max_epochs=50)
        runs = []
        for _ in range(2):
            net = mlp.init((2, 4, 2), seed=3)
            trained, history = mlp.train(net, XOR, cfg)
            runs.append((trained, history))
        (a, ha), (b, hb) = runs
        assert ha == hb
        for pa, pb in zip((a.w1, a.b1, a.w2, a.b2), (b.w1, b.b1, b.w2, b.b2)):
            assert (pa == pb).all()

    def test_sse_improves_on_separable_toy(self):
        rng = np.random.default_rng(6)
        samples = [(np.r_[rng.random(2) + 2, rng.random(2)], 0) for _ in range(10)]
        samples += [(np.r_[rng.random(2), rng.random(2) + 2], 1) for _ in range(10)]
        net = mlp.init((4, 5, 2), seed=6)
        cfg = mlp.TrainConfig(max_epochs=200, sse_tolerance=0.0)
        _, history = mlp.train(net, samples, cfg)
        assert history[199] < history[0]

    def test_early_stop_on_sse_plateau(self):
        net = mlp.init((2, 4, 2), seed=2)
        cfg = mlp.TrainConfig(max_epochs=5000, sse_tolerance=1e-3)
        _, history = mlp.train(net, XOR, cfg)
        assert len(history) < 5000

    def test_empty_dataset_rejected(self):
        with pytest.raises(EmptyDataset):
            mlp.train(mlp.init((2, 3, 2), seed=0), [], mlp.TrainConfig())

    def test_wrong_sample_length_rejected(self):
        with pytest.raises(DimensionMismatch):
            mlp.train(mlp.init((3, 3, 2), seed=0), [([1.0, 2.0], 0)],
                      mlp.TrainConfig())

    def test_label_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            mlp.train(mlp.init((2, 3, 2), seed=0), [([1.0, 2.0], 2)],
                      mlp.TrainConfig())


class TestGradientCheck:
    def test_random_small_nets(self):
        rng = np.random.default_rng(31)
        for _ in range(5):
            sizes = (int(rng.integers(2, 11)), int(rng.integers(2, 9)),
                     int(rng.integers(2, 6)))
            net = mlp.init(sizes, seed=int(rng.integers(1 << 30)))
            x = rng.random(sizes[0])
            target = rng.uniform(0.1, 0.9, sizes[2])
            assert mlp.gradient_check(net, (x, target)) < 1e-4

    def test_zero_gradient_at_exact_fit(self):
        rng = np.random.default_rng(32)
        net = mlp.init((5, 4, 3), seed=9)
        x = rng.random(5)
        target = mlp.forward(net, x)  # loss is exactly zero here
        analytic = mlp._backprop(net, x, target)
        numeric = mlp._fd_gradients(net.copy(), x, target)
        for arr in analytic:
            assert np.abs(arr).max() == 0.0
        for arr in numeric:
            assert np.abs(arr).max() < 1e-8

    def test_sign_flip_is_caught(self):
        rng = np.random.default_rng(33)
        net = mlp.init((4, 4, 3), seed=13)
        x = rng.random(4)
        target = rng.uniform(0.1, 0.9, 3)
        analytic = list(mlp._backprop(net, x, target))
        corrupted = analytic[2].copy()
        idx = np.unravel_index(np.abs(corrupted).argmax(), corrupted.shape)
        corrupted[idx] = -corrupted[idx]
        analytic[2] = corrupted
        numeric = mlp._fd_gradients(net.copy(), x, target)
        assert mlp.max_gradient_error(analytic, numeric) > 1e-2


class TestSaveLoad:
    def test_roundtrip_reproduces_outputs_bitwise(self, tmp_path):
        rng = np.random.default_rng(14)
        net = mlp.init((16, 30, 49), seed=41)
        path = tmp_path / "model.txt"
        mlp.save(net, path)
        loaded = mlp.load(path)
        for _ in range(100):
            x = rng.random(16)
            assert (mlp.forward(net, x) == mlp.forward(loaded, x)).all()

    def test_truncated_file(self, tmp_path):
        net = mlp.init((4, 3, 2), seed=1)
        path = tmp_path / "model.txt"
        mlp.save(net, path)
        text = path.read_text()
        path.write_text(text[: len(text) // 2])
        with pytest.raises(FormatError):
            mlp.load(path)

    def test_version_99_rejected(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("mlp 99\nsizes 2 2 2\n")
        with pytest.raises(VersionMismatch):
            mlp.load(path)

    def test_garbage_rejected(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("not a model\n")
        with pytest.raises(FormatError):
            mlp.load(path)


class TestBackendsAgree:
    def test_short_training_matches_between_kernels(self):
        from devnagari_ocr import _kernels_nb, _kernels_np
        rng = np.random.default_rng(15)
        x = rng.random((20, 6))
        labels = rng.integers(0, 3, 20)
        t = mlp.one_hot_targets(labels, 3)
        seed_net = mlp.init((6, 5, 3), seed=55)
        nets = []
        for kern in (_kernels_np, _kernels_nb):
            net = seed_net.copy()
            kern.train_epochs(net.w1, net.b1, net.w2, net.b2, x, t,
                              0.8, 0.7, 10, 0.0)
            nets.append(net)
        a, b = nets
        for pa, pb in zip((a.w1, a.b1, a.w2, a.b2), (b.w1, b.b1, b.w2, b.b2)):
            np.testing.assert_allclose(pa, pb, atol=1e-12)
