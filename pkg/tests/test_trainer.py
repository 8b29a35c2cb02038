# tests/test_trainer.py
from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from pottscluster import TrainConfig, TrainDivergedError, hard_assign, nmi, train
from pottscluster.dataset import adjacency_features
from pottscluster.model import GradientBundle, ModelParams
from pottscluster.trainer import AdamState, adam_step, init_params, run_seeds


class TestTrainConfig:
    def test_defaults_match_reference_setup(self):
        cfg = TrainConfig()
        assert cfg.k == 16
        assert cfg.hidden == 64
        assert cfg.dropout_keep == 0.5
        assert cfg.gamma_init == 1.0
        assert cfg.gamma_max == 5.0
        assert cfg.w_collapse == 1.0
        assert cfg.w_gamma == 0.01
        assert cfg.loss == "potts"
        assert cfg.epochs == 1000
        assert cfg.learning_rate == 1e-3

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"seed": -1},
            {"k": 1},
            {"hidden": 0},
            {"dropout_keep": 0.0},
            {"dropout_keep": 1.5},
            {"learning_rate": 0.0},
            {"epochs": -1},
            {"gamma_max": 0.0},
            {"gamma_init": -0.5},
            {"gamma_init": 9.0},
            {"w_collapse": -1.0},
            {"w_gamma": -0.1},
            {"loss": "nope"},
            {"collapse_scaling": "nope"},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)

    def test_from_dict_roundtrip(self):
        cfg = TrainConfig(seed=3, k=4, epochs=10)
        assert TrainConfig.from_dict(cfg.to_dict()) == cfg

    def test_from_dict_unknown_key(self):
        with pytest.raises(ValueError, match="unknown config keys: momentum"):
            TrainConfig.from_dict({"momentum": 0.9})


class TestInitParams:
    def test_deterministic_per_seed(self):
        cfg = TrainConfig(seed=11)
        p1 = init_params(5, cfg)
        p2 = init_params(5, cfg)
        assert np.array_equal(p1.w, p2.w)
        assert np.array_equal(p1.w_skip, p2.w_skip)
        assert np.array_equal(p1.w_out, p2.w_out)
        p3 = init_params(5, TrainConfig(seed=12))
        assert not np.array_equal(p1.w, p3.w)

    def test_gamma_starts_at_init(self):
        assert init_params(3, TrainConfig()).gamma == 1.0
        assert init_params(3, TrainConfig(gamma_init=2.5)).gamma == 2.5

    def test_standard_normal_statistics(self):
        p = init_params(64, TrainConfig(seed=0, hidden=64))
        assert -0.2 < p.w.mean() < 0.2
        assert 0.8 < p.w.var() < 1.2

    def test_shapes(self):
        p = init_params(7, TrainConfig(k=5, hidden=9))
        assert p.w.shape == (7, 9)
        assert p.w_skip.shape == (7, 9)
        assert p.w_out.shape == (9, 5)


def make_params_and_grads(seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    params = ModelParams(
        w=rng.standard_normal((3, 4)),
        w_skip=rng.standard_normal((3, 4)),
        w_out=rng.standard_normal((4, 2)),
        gamma=1.0,
    )
    sign = lambda a: np.where(rng.random(a.shape) < 0.5, -1.0, 1.0)
    grads = GradientBundle(
        d_w=sign(params.w) * (0.1 + rng.random(params.w.shape)) * scale,
        d_w_skip=sign(params.w_skip) * (0.1 + rng.random(params.w_skip.shape)) * scale,
        d_w_out=sign(params.w_out) * (0.1 + rng.random(params.w_out.shape)) * scale,
        d_gamma=0.7 * scale,
    )
    return params, grads


class TestAdamStep:
    def test_zero_gradient_leaves_params_unchanged(self):
        params, _ = make_params_and_grads()
        zero = GradientBundle(
            d_w=np.zeros_like(params.w),
            d_w_skip=np.zeros_like(params.w_skip),
            d_w_out=np.zeros_like(params.w_out),
            d_gamma=0.0,
        )
        new, state = adam_step(params, zero, AdamState.zeros(params), 1e-3, 5.0)
        assert np.array_equal(new.w, params.w)
        assert np.array_equal(new.w_skip, params.w_skip)
        assert np.array_equal(new.w_out, params.w_out)
        assert new.gamma == params.gamma
        assert state.t == 1

    def test_first_step_is_signed_learning_rate(self):
        params, grads = make_params_and_grads(seed=1)
        lr = 1e-3
        new, _ = adam_step(params, grads, AdamState.zeros(params), lr, 5.0)
        assert np.allclose(new.w - params.w, -lr * np.sign(grads.d_w), atol=lr * 1e-6)
        assert np.allclose(new.w_out - params.w_out, -lr * np.sign(grads.d_w_out), atol=lr * 1e-6)
        assert new.gamma - params.gamma == pytest.approx(-lr, abs=lr * 1e-6)

    def test_gamma_clamped_at_max(self):
        params, grads = make_params_and_grads(seed=2)
        params = dataclasses.replace(params, gamma=4.9999)
        grads = dataclasses.replace(grads, d_gamma=-1.0)
        new, _ = adam_step(params, grads, AdamState.zeros(params), 1e-3, 5.0)
        assert new.gamma == 5.0

    def test_gamma_clamped_at_zero(self):
        params, grads = make_params_and_grads(seed=3)
        params = dataclasses.replace(params, gamma=1e-4)
        grads = dataclasses.replace(grads, d_gamma=1.0)
        new, _ = adam_step(params, grads, AdamState.zeros(params), 1e-3, 5.0)
        assert new.gamma == 0.0


@pytest.fixture
def k4_setup(two_k4s):
    return two_k4s, adjacency_features(two_k4s), np.array([0] * 4 + [1] * 4)


class TestTrain:
    def test_zero_epochs_single_record(self, k4_setup):
        g, x, _ = k4_setup
        trace = train(g, x, TrainConfig(epochs=0))
        assert len(trace.records) == 1
        assert trace.records[0].epoch == 0
        assert trace.final_assignment.shape == (8, 16)

    def test_record_count_and_gamma_range(self, k4_setup):
        g, x, _ = k4_setup
        cfg = TrainConfig(epochs=40, gamma_max=5.0)
        trace = train(g, x, cfg)
        assert len(trace.records) == 41
        assert [r.epoch for r in trace.records] == list(range(41))
        for r in trace.records:
            assert 0.0 <= r.gamma <= 5.0
            assert np.isfinite(r.total)

    def test_bitwise_determinism(self, k4_setup):
        g, x, _ = k4_setup
        cfg = TrainConfig(seed=5, epochs=60)
        t1 = train(g, x, cfg)
        t2 = train(g, x, cfg)
        assert t1.records == t2.records
        assert np.array_equal(t1.final_assignment, t2.final_assignment)
        assert np.array_equal(t1.final_params.w, t2.final_params.w)

    def test_dmon_gamma_pinned_at_one(self, k4_setup):
        g, x, _ = k4_setup
        trace = train(g, x, TrainConfig(epochs=30, loss="dmon", gamma_init=2.0))
        assert all(r.gamma == 1.0 for r in trace.records)
        assert all(r.gamma_reg == 0.0 for r in trace.records)

    def test_breakdown_identity_along_trace(self, k4_setup):
        g, x, _ = k4_setup
        cfg = TrainConfig(epochs=25, w_collapse=0.8, w_gamma=0.02)
        trace = train(g, x, cfg)
        for r in trace.records:
            assert r.total == pytest.approx(
                r.potts + 0.8 * r.collapse + 0.02 * r.gamma_reg, abs=1e-12
            )

    def test_separable_recovery_k2(self, k4_setup):
        g, x, truth = k4_setup
        trace = train(g, x, TrainConfig(seed=0, k=2, epochs=500))
        pred = hard_assign(trace.final_assignment)
        assert nmi(pred, truth) == 100.0

    def test_divergence_aborts_with_diagnostic(self, k4_setup):
        g, x, _ = k4_setup
        with np.errstate(over="ignore", invalid="ignore"), pytest.raises(TrainDivergedError) as err:
            train(g, x * 1e308, TrainConfig(epochs=5))  # feature sums overflow to inf
        assert err.value.epoch >= 0
        assert not np.isfinite(err.value.breakdown.total)

    def test_feature_shape_mismatch(self, k4_setup):
        g, x, _ = k4_setup
        with pytest.raises(ValueError):
            train(g, x[:-1], TrainConfig(epochs=1))


class TestRunSeeds:
    def test_single_seed_equals_train(self, k4_setup):
        g, x, truth = k4_setup
        cfg = TrainConfig(seed=7, epochs=50)
        sweep = run_seeds(g, x, cfg, 1, truth)
        solo = train(g, x, cfg)
        assert sweep.runs[0].trace.records == solo.records
        assert np.array_equal(sweep.runs[0].trace.final_assignment, solo.final_assignment)
        assert sweep.mean["nmi"] == sweep.runs[0].report.nmi
        assert sweep.std["nmi"] == 0.0

    def test_seed_sequence_and_counts(self, k4_setup):
        g, x, truth = k4_setup
        sweep = run_seeds(g, x, TrainConfig(seed=4, epochs=20), 3, truth)
        assert [r.seed for r in sweep.runs] == [4, 5, 6]
        assert len(sweep.runs) == 3
        vals = [r.report.modularity for r in sweep.runs]
        assert sweep.mean["modularity"] == pytest.approx(np.mean(vals))
        assert sweep.std["modularity"] == pytest.approx(np.std(vals))

    def test_no_labels_gives_null_aggregates(self, k4_setup):
        g, x, _ = k4_setup
        sweep = run_seeds(g, x, TrainConfig(epochs=10), 2)
        assert sweep.mean["nmi"] is None and sweep.std["nmi"] is None
        assert sweep.mean["pairwise_f1"] is None
        assert sweep.mean["modularity"] is not None

    def test_k4_ten_seeds_perfect(self, k4_setup):
        g, x, truth = k4_setup
        sweep = run_seeds(g, x, TrainConfig(), 10, truth)
        assert sweep.mean["nmi"] == 100.0
        assert sweep.std["nmi"] == 0.0

    def test_num_seeds_validated(self, k4_setup):
        g, x, _ = k4_setup
        with pytest.raises(ValueError):
            run_seeds(g, x, TrainConfig(epochs=1), 0)
