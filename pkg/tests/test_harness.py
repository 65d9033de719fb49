import math

import numpy as np
import pytest

from ckptmerge import Checkpoint
from ckptmerge.errors import CompatError
from ckptmerge.harness import (
    ModelConfig,
    SGDConfig,
    SyntheticObjective,
    ToyEvaluator,
    ToyTask,
    eval_model,
    eval_synthetic,
    gp_sample_cov,
    improvement_fraction,
    lambda_sweep,
    make_toy_checkpoints,
    predict,
)

SMALL = ToyTask(n_train=256, n_dev=128, n_test=256, seed=3)


class TestSynthetic:
    @pytest.mark.parametrize("kind", ["quadratic-peak", "two-bump", "gp-sample", "plateau"])
    def test_deterministic(self, kind):
        a, b = SyntheticObjective(kind, seed=4), SyntheticObjective(kind, seed=4)
        assert [a(x) for x in (0.5, 0.73, 1.0)] == [b(x) for x in (0.5, 0.73, 1.0)]

    def test_quadratic_peak_max(self):
        obj = SyntheticObjective("quadratic-peak", {"peak": 0.77, "height": 2.0})
        assert obj(0.77) == 2.0
        assert all(obj(x) < 2.0 for x in np.linspace(0, 1, 50) if x != 0.77)

    def test_two_bump_global_is_second(self):
        lam, val = SyntheticObjective("two-bump").maximum(0.5, 1.0)
        assert lam == pytest.approx(0.9, abs=1e-3)

    def test_plateau_flat_top(self):
        obj = SyntheticObjective("plateau")
        assert obj(0.75) == obj(0.85) == 1.0
        assert obj(0.5) < 1.0

    def test_gp_sample_matches_mvn_draw(self):
        obj = SyntheticObjective("gp-sample", seed=11)
        xs = np.linspace(0.0, 1.0, 201)
        cov = gp_sample_cov(xs, 1.0, 0.1, 1e-8)
        draw = np.random.default_rng(11).multivariate_normal(np.zeros(201), cov, method="cholesky")
        for i in (0, 37, 100, 150, 200):
            assert obj(xs[i]) == pytest.approx(draw[i], abs=1e-10)

    def test_gp_sample_seeds_differ(self):
        assert SyntheticObjective("gp-sample", seed=1)(0.6) != SyntheticObjective("gp-sample", seed=2)(0.6)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            SyntheticObjective("nope")
        with pytest.raises(ValueError):
            SyntheticObjective("plateau", {"peak": 1})
        with pytest.raises(ValueError):
            eval_synthetic(SyntheticObjective("plateau"), 1.5)


class TestTask:
    def test_split_sizes_and_balance(self):
        x, y = SMALL.split("dev")
        assert x.shape == (128, 2)
        assert int((y == 0).sum()) == 64
        x, y = ToyTask(n_dev=5).split("dev")
        assert int((y == 0).sum()) == 3

    def test_fraction_prefix(self):
        full = SMALL.split("test")
        part = SMALL.split("test", 0.3)
        assert len(part[1]) == math.ceil(0.3 * 256)
        np.testing.assert_array_equal(part[0], full[0][: len(part[1])])

    def test_splits_independent_of_sizes(self):
        a = ToyTask(n_train=100, seed=1).split("dev")
        b = ToyTask(n_train=300, seed=1).split("dev")
        np.testing.assert_array_equal(a[0], b[0])

    def test_bad_split(self):
        with pytest.raises(ValueError):
            SMALL.split("val")
        with pytest.raises(ValueError):
            SMALL.split("dev", 0.0)


@pytest.fixture(scope="module")
def trained():
    return make_toy_checkpoints(ToyTask(seed=0), sgd=SGDConfig(snapshot_steps=(0, 900, 1000)), seed=0)


class TestTraining:
    def test_step_zero_is_init(self):
        from ckptmerge.harness import init_params

        (ck,) = make_toy_checkpoints(SMALL, sgd=SGDConfig(steps=10, snapshot_steps=(0,)), seed=5)
        want = init_params(ModelConfig(), np.random.default_rng(5))
        for k, v in want.items():
            np.testing.assert_array_equal(ck[k], v)
        assert ck.meta["step"] == "0"

    def test_deterministic(self):
        sgd = SGDConfig(steps=50, snapshot_steps=(25, 50))
        a = make_toy_checkpoints(SMALL, sgd=sgd, seed=9)
        b = make_toy_checkpoints(SMALL, sgd=sgd, seed=9)
        assert a == b

    def test_late_snapshots_accurate(self, trained):
        task = ToyTask(seed=0)
        for ck in trained[1:]:
            assert eval_model(ck, task, "dev") >= 0.85

    def test_bad_snapshots(self):
        with pytest.raises(ValueError):
            make_toy_checkpoints(SMALL, sgd=SGDConfig(steps=10, snapshot_steps=(20,)))


class TestEval:
    def test_zero_params_majority(self):
        ck = ModelConfig().template()
        _, y = SMALL.split("dev")
        majority = max(np.mean(y == 0), np.mean(y == 1))
        assert eval_model(ck, SMALL, "dev") == majority

    def test_partition_identity(self, trained):
        task = ToyTask(seed=0)
        ck = trained[-1]
        x, y = task.split("dev")
        half = task.split("dev", 0.5)
        k = len(half[1])
        acc_first = eval_model(ck, task, "dev", 0.5)
        acc_rest = float(np.mean(predict(ck, x[k:]) == y[k:]))
        full = eval_model(ck, task, "dev")
        assert full == pytest.approx((k * acc_first + (len(y) - k) * acc_rest) / len(y), abs=1e-15)

    def test_forward_oracle(self, trained):
        ck = trained[-1]
        x, _ = ToyTask(seed=0).split("test")
        x = x[:10]

        def scalar_forward(v):
            h = [float(t) for t in v]
            for i in range(3):
                w, b = ck[f"layer{i}.weight"], ck[f"layer{i}.bias"]
                z = [float(b[o]) + sum(float(w[o, j]) * h[j] for j in range(len(h))) for o in range(w.shape[0])]
                h = [max(t, 0.0) for t in z] if i < 2 else z
            return 0 if h[0] >= h[1] else 1

        assert predict(ck, x).tolist() == [scalar_forward(v) for v in x]

    def test_shape_mismatch(self):
        with pytest.raises(CompatError):
            eval_model(Checkpoint({"layer0.weight": np.zeros((3, 2))}), SMALL)

    def test_sweep_and_fraction(self, trained):
        ev = ToyEvaluator(ToyTask(seed=0))
        lams, scores = lambda_sweep(trained[1], trained[2], ev, resolution=11)
        assert lams.tolist() == np.linspace(0, 1, 11).tolist()
        assert scores[0] == ev(trained[1]) and scores[-1] == ev(trained[2])
        assert improvement_fraction([0.5, 0.9, 0.95], 0.9, 0.8) == pytest.approx(1 / 3)
