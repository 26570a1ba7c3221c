# tests/test_adaptation.py

from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from adaptation.baseline import run_baseline
from adaptation.kernels import gaussian_kernel, kernel_mmd, median_bandwidth, weighted_mmd
from adaptation.kmm import KmmConfig, default_slack, kmm_weights, run_kmm
from adaptation.oracle import (
    dp_exhaustive_oracle,
    dp_objective,
    greedy_gap,
    label_grid_from,
    total_loss,
)
from adaptation.selection import select_source_model
from adaptation.self_labeling import (
    AdaptationConfig,
    blocks,
    loss_trace,
    run_isda,
    run_re_isda,
    run_re_isda_ensemble,
    run_self_labeling,
    snap_to_grid,
)
from adaptation.tca import (
    TcaConfig,
    fit_tca,
    latent_coordinates,
    latent_mean_gap,
    run_tca,
    subspace_mmd,
    tca_project,
    tca_transform,
)
from core.errors import AdaptationStepError, InvalidInputError
from domain.data import Dataset, DomainPair, LabeledSample
from learner.mlp import MlpSpec
from learner.ridge import RidgeLearner
from tests.conftest import ConstantModel, make_linear_pair


class _Exploding:
    name = "boom"

    def fit(self, data, sample_weights=None, init=None):
        raise ValueError("singular")


class TestKernels:

    def test_gaussian_kernel_diagonal_and_range(self, rng):
        x = rng.normal(size=(6, 3))
        k = gaussian_kernel(x, x, 0.7)
        assert_allclose(np.diag(k), 1.0)
        assert np.all((k > 0) & (k <= 1.0))

    def test_median_bandwidth(self):
        x = np.array([[0.0], [1.0], [3.0]])
        assert median_bandwidth(x) == 2.0
        assert median_bandwidth(np.zeros((4, 2))) == 1.0

    def test_mmd_vanishes_for_identical_sets(self, rng):
        x = rng.normal(size=(5, 2))
        pooled = np.vstack([x, x])
        assert abs(kernel_mmd(gaussian_kernel(pooled, pooled, 1.0), 5)) < 1e-12

    def test_bad_bandwidth(self):
        with pytest.raises(InvalidInputError):
            gaussian_kernel(np.ones((1, 1)), np.ones((1, 1)), 0.0)


class TestKmm:

    def test_uniform_when_domains_coincide(self, rng):
        x = rng.uniform(size=(12, 3))
        w = kmm_weights(x, x)
        assert np.max(np.abs(w - 1.0)) < 1e-2

    def test_favours_source_rows_near_targets(self, rng):
        near = rng.normal(0.0, 0.1, (5, 1))
        far = rng.normal(3.0, 0.1, (5, 1))
        targets = rng.normal(0.0, 0.1, (5, 1))
        w = kmm_weights(np.vstack([near, far]), targets)
        assert w[5:].mean() < 0.1 * w[:5].mean()
        assert np.all(w >= 0)

    @pytest.mark.parametrize("seed", range(30))
    def test_two_cluster_instances_converge(self, seed):
        rng = np.random.default_rng(seed)
        near = rng.normal(0.0, 0.1, (5, 1))
        far = rng.normal(3.0, 0.1, (5, 1))
        targets = rng.normal(0.0, 0.1, (5, 1))
        w = kmm_weights(np.vstack([near, far]), targets)
        assert w[5:].mean() < 0.1 * w[:5].mean()

    def test_single_source_sample(self, rng):
        w = kmm_weights(rng.normal(size=(1, 2)), rng.normal(size=(4, 2)))
        assert_allclose(w, [1.0], atol=1e-12)

    def test_weights_reduce_mmd(self, rng):
        xs = rng.normal(0.0, 1.0, (15, 2))
        xt = rng.normal(0.8, 0.5, (10, 2))
        cfg = KmmConfig(bandwidth=0.8)
        w = kmm_weights(xs, xt, cfg)
        k_ss = gaussian_kernel(xs, xs, 0.8)
        k_st = gaussian_kernel(xs, xt, 0.8)
        k_tt = gaussian_kernel(xt, xt, 0.8)
        assert weighted_mmd(k_ss, k_st, k_tt, w) <= weighted_mmd(k_ss, k_st, k_tt, np.ones(15)) + 1e-9

    def test_mean_constraint(self, rng):
        xs = rng.normal(size=(16, 2))
        w = kmm_weights(xs, rng.normal(1.0, 1.0, (8, 2)))
        assert abs(w.mean() - 1.0) <= default_slack(16) + 1e-9

    def test_default_slack(self):
        assert default_slack(1) == 0.0
        assert_allclose(default_slack(100), 0.9)

    def test_bad_bandwidth(self):
        with pytest.raises(InvalidInputError):
            KmmConfig(bandwidth=-1.0)

    def test_run_kmm_predicts_every_target(self, rng):
        pair = make_linear_pair(rng, q=8, p=4)
        preds = run_kmm(pair, MlpSpec(), learner=RidgeLearner())
        assert preds.shape == (4,)


class TestTca:

    def test_output_shapes(self, rng):
        zs, zt = tca_transform(rng.normal(size=(9, 3)), rng.normal(size=(4, 3)), TcaConfig(latent_dim=2))
        assert zs.shape == (9, 2) and zt.shape == (4, 2)
        model = fit_tca(rng.normal(size=(9, 3)), rng.normal(size=(4, 3)), TcaConfig(latent_dim=2))
        assert tca_project(model, rng.normal(size=(3, 3))).shape == (3, 2)

    def test_transform_matches_fitted_model(self, rng):
        xs, xt = rng.normal(size=(7, 2)), rng.normal(0.5, 1.0, (4, 2))
        cfg = TcaConfig(latent_dim=3, bandwidth=0.9)
        zs, zt = tca_transform(xs, xt, cfg)
        ref_s, ref_t = latent_coordinates(fit_tca(xs, xt, cfg))
        assert_array_equal(zs, ref_s)
        assert_array_equal(zt, ref_t)

    def test_transform_rejects_too_many_components(self, rng):
        with pytest.raises(InvalidInputError):
            tca_transform(rng.normal(size=(3, 2)), rng.normal(size=(2, 2)), TcaConfig(latent_dim=6))

    def test_identical_domains_have_no_mean_gap(self, rng):
        x = rng.normal(size=(6, 2))
        model = fit_tca(x, x, TcaConfig(latent_dim=3))
        assert latent_mean_gap(model) < 1e-8

    @pytest.mark.parametrize("seed", range(4))
    def test_subspace_mmd_bounded_by_kernel_mmd(self, seed):
        rng = np.random.default_rng(seed)
        model = fit_tca(rng.normal(size=(8, 2)), rng.normal(0.7, 1.0, (6, 2)), TcaConfig(latent_dim=2))
        assert subspace_mmd(model) <= kernel_mmd(model.kernel, model.q) + 1e-10

    def test_projection_of_fitted_rows_matches_transform(self, rng):
        xs, xt = rng.normal(size=(5, 2)), rng.normal(size=(3, 2))
        model = fit_tca(xs, xt, TcaConfig(latent_dim=2))
        zs, _ = latent_coordinates(model)
        assert_allclose(tca_project(model, xs), zs, atol=1e-12)

    def test_latent_dim_too_large(self, rng):
        with pytest.raises(InvalidInputError):
            fit_tca(rng.normal(size=(3, 2)), rng.normal(size=(2, 2)), TcaConfig(latent_dim=6))

    def test_invalid_config(self):
        with pytest.raises(InvalidInputError):
            TcaConfig(latent_dim=0)
        with pytest.raises(InvalidInputError):
            TcaConfig(mu=0.0)

    def test_run_tca_predicts_every_target(self, rng):
        pair = make_linear_pair(rng, q=8, p=5)
        preds = run_tca(pair, MlpSpec(), TcaConfig(latent_dim=2), learner=RidgeLearner())
        assert preds.shape == (5,) and np.all(np.isfinite(preds))


class TestSelfLabeling:

    def test_blocks(self):
        assert blocks(5, 2) == [(0, 2), (2, 4), (4, 5)]
        assert blocks(3, 3) == [(0, 3)]

    def test_snap_to_grid_ties_go_low(self):
        assert_array_equal(snap_to_grid(np.array([0.5, 0.9, -3.0]), (0.0, 1.0)), [0.0, 1.0, 0.0])
        assert_array_equal(snap_to_grid(np.array([0.3]), None), [0.3])

    def test_single_block_isda_is_the_baseline(self, rng):
        pair = make_linear_pair(rng, q=10, p=4, dim=5)
        spec = MlpSpec(layer_sizes=(5, 6, 1), epochs=30)
        preds, states = run_isda(pair, AdaptationConfig(eta=4, base=spec, renew=False))
        assert_array_equal(preds, run_baseline(pair, spec))
        assert len(states) == 1

    def test_one_target_isda_equals_re_isda(self, rng):
        pair = make_linear_pair(rng, q=10, p=1, dim=5)
        spec = MlpSpec(layer_sizes=(5, 6, 1), epochs=30)
        a, sa = run_isda(pair, AdaptationConfig(eta=1, base=spec, renew=False))
        b, sb = run_re_isda(pair, AdaptationConfig(eta=1, base=spec, renew=True))
        assert_array_equal(a, b)
        assert_array_equal(loss_trace(sa), loss_trace(sb))

    def test_p_le_eta_equivalence(self, rng):
        pair = make_linear_pair(rng, q=7, p=3)
        cfg = AdaptationConfig(eta=3)
        a, _ = run_isda(pair, replace(cfg, renew=False), RidgeLearner())
        b, _ = run_re_isda(pair, cfg, RidgeLearner())
        assert_array_equal(a, b)

    def test_trace_length(self, rng):
        pair = make_linear_pair(rng, q=5, p=41)
        for renew in (False, True):
            _, states = run_self_labeling(pair, AdaptationConfig(eta=2, renew=renew), RidgeLearner())
            assert loss_trace(states).shape == (21,)

    def test_perfect_learner_has_zero_loss(self, rng, nn_learner):
        pair = make_linear_pair(rng, q=6, p=5)
        for renew in (False, True):
            _, states = run_self_labeling(pair, AdaptationConfig(eta=2, renew=renew), nn_learner)
            assert_array_equal(loss_trace(states), 0.0)

    def test_pool_keeps_original_labels(self, rng):
        pair = make_linear_pair(rng, q=6, p=7)
        s0 = pair.initial_pool()
        for renew in (False, True):
            _, states = run_self_labeling(pair, AdaptationConfig(eta=3, renew=renew), RidgeLearner())
            for s in states:
                assert_array_equal(s.labeled_pool.inputs[: s0.size], s0.inputs)
                assert_array_equal(s.labeled_pool.labels[: s0.size], s0.labels)
                assert s.labeled_pool.size == s0.size + s.block[0]

    def test_isda_labels_never_change(self, rng):
        pair = make_linear_pair(rng, q=6, p=7)
        _, states = run_isda(pair, AdaptationConfig(eta=2, renew=False), RidgeLearner())
        for prev, cur in zip(states, states[1:]):
            assert_array_equal(cur.pseudo_labels[: prev.pseudo_labels.size], prev.pseudo_labels)

    def test_re_isda_renews_labels(self, rng):
        pair = make_linear_pair(rng, q=4, p=6, shift=1.5)
        _, states = run_re_isda(pair, AdaptationConfig(eta=2), RidgeLearner())
        assert states[-1].pseudo_labels.size == 6
        assert not np.array_equal(states[1].pseudo_labels[:2], states[0].pseudo_labels)

    def test_extra_epochs_relabel_everything(self, rng):
        pair = make_linear_pair(rng, q=5, p=4)
        _, states = run_re_isda(pair, AdaptationConfig(eta=2, epochs=4), RidgeLearner())
        assert len(states) == 4
        assert states[-1].block == (4, 4)
        assert states[-1].labeled_pool.size == pair.q + 1 + 4

    def test_too_few_epochs(self, rng):
        pair = make_linear_pair(rng, q=5, p=4)
        with pytest.raises(InvalidInputError):
            run_re_isda(pair, AdaptationConfig(eta=1, epochs=3), RidgeLearner())

    def test_isda_rejects_epochs(self, rng):
        pair = make_linear_pair(rng, q=5, p=4)
        with pytest.raises(InvalidInputError):
            run_self_labeling(pair, AdaptationConfig(eta=1, renew=False, epochs=7), RidgeLearner())

    def test_eta_larger_than_targets(self, rng):
        pair = make_linear_pair(rng, q=5, p=3)
        with pytest.raises(InvalidInputError):
            run_isda(pair, AdaptationConfig(eta=4, renew=False), RidgeLearner())

    def test_invalid_config(self):
        with pytest.raises(InvalidInputError):
            AdaptationConfig(eta=0)
        with pytest.raises(InvalidInputError):
            AdaptationConfig(label_grid=())

    def test_deterministic(self, rng):
        pair = make_linear_pair(rng, q=8, p=4, dim=5)
        cfg = AdaptationConfig(eta=2, base=MlpSpec(layer_sizes=(5, 4, 1), epochs=20))
        a, sa = run_re_isda(pair, cfg)
        b, sb = run_re_isda(pair, cfg)
        assert_array_equal(a, b)
        assert_array_equal(loss_trace(sa), loss_trace(sb))

    def test_learner_failure_names_method_and_step(self, rng):
        pair = make_linear_pair(rng, q=5, p=2)
        with pytest.raises(AdaptationStepError) as info:
            run_re_isda(pair, AdaptationConfig(eta=1), _Exploding())
        assert info.value.method == "re_isda"
        assert info.value.step == 0

    def test_empty_trace(self):
        with pytest.raises(InvalidInputError):
            loss_trace([])


class TestEnsemble:

    def test_single_calibration_in_given_order(self, rng):
        pair = make_linear_pair(rng, q=6, p=5)
        cfg = AdaptationConfig(eta=2)
        single, _ = run_re_isda(pair, cfg, RidgeLearner())
        ens = run_re_isda_ensemble(pair, cfg, [pair.calibration], "keep_order", RidgeLearner())
        assert_array_equal(ens, single)

    def test_duplicate_calibrations_average_to_one_run(self, rng):
        pair = make_linear_pair(rng, q=6, p=5)
        cfg = AdaptationConfig(eta=2)
        one = run_re_isda_ensemble(pair, cfg, [pair.calibration], learner=RidgeLearner())
        two = run_re_isda_ensemble(pair, cfg, [pair.calibration] * 2, learner=RidgeLearner())
        assert_array_equal(one, two)

    def test_needs_a_calibration(self, rng):
        with pytest.raises(InvalidInputError):
            run_re_isda_ensemble(make_linear_pair(rng), AdaptationConfig(eta=1), [])


class TestOracle:

    def test_one_target_picks_the_better_label(self, rng):
        pair = make_linear_pair(rng, q=4, p=1)
        cfg = AdaptationConfig(eta=1)
        learner = RidgeLearner()
        grid = (0.0, 10.0)
        result = dp_exhaustive_oracle(pair, cfg, grid, learner)
        costs = [total_loss(dp_objective(pair, cfg, [g], learner)) for g in grid]
        assert result.evaluated == 2
        assert result.best_labels[0] == grid[int(np.argmin(costs))]
        assert result.min_total_loss == min(costs)

    @pytest.mark.parametrize("seed", range(24))
    def test_greedy_never_beats_the_optimum(self, seed):
        rng = np.random.default_rng(seed)
        p = int(rng.integers(1, 4))
        eta = int(rng.integers(1, p + 1))
        pair = make_linear_pair(rng, q=5, p=p, shift=float(rng.uniform(0.0, 1.0)), noise=0.1)
        grid = tuple(label_grid_from(pair.source.labels, int(rng.integers(2, 5))))
        cfg = AdaptationConfig(eta=eta, label_grid=grid)
        learner = RidgeLearner(alpha=1e-2)
        oracle = dp_exhaustive_oracle(pair, cfg, grid, learner)
        assert oracle.evaluated == len(cfg.label_grid) ** p
        for renew in (False, True):
            labels, _ = run_self_labeling(pair, replace(cfg, renew=renew), learner)
            assert set(labels.tolist()) <= set(cfg.label_grid)
            greedy = total_loss(dp_objective(pair, cfg, labels, learner))
            assert greedy >= oracle.min_total_loss
            assert greedy_gap(pair, cfg, labels, oracle, learner) >= 0.0

    def test_objective_matches_shifted_isda_trace(self, rng):
        pair = make_linear_pair(rng, q=6, p=5)
        cfg = AdaptationConfig(eta=2, renew=False)
        labels, states = run_isda(pair, cfg, RidgeLearner())
        objective = dp_objective(pair, cfg, labels, RidgeLearner())
        assert_array_equal(objective[:-1], loss_trace(states)[1:])

    def test_budget(self, rng):
        pair = make_linear_pair(rng, q=4, p=3)
        with pytest.raises(InvalidInputError):
            dp_exhaustive_oracle(pair, AdaptationConfig(eta=1), (0.0, 1.0, 2.0, 3.0), RidgeLearner(), budget=10)

    def test_label_count_checked(self, rng):
        pair = make_linear_pair(rng, q=4, p=3)
        with pytest.raises(InvalidInputError):
            dp_objective(pair, AdaptationConfig(eta=1), [1.0], RidgeLearner())

    def test_label_grid_from(self):
        assert label_grid_from([0.0, 3.0, 1.0], 4) == [0.0, 1.0, 2.0, 3.0]
        assert label_grid_from([1.0, 3.0], 1) == [2.0]


class TestSelection:

    def test_nearer_prediction_wins(self):
        cal = LabeledSample(np.array([0.0]), 1.2)
        assert select_source_model([ConstantModel(1.0), ConstantModel(5.0)], cal) == 0

    def test_single_model(self):
        assert select_source_model([ConstantModel(9.0)], LabeledSample(np.array([0.0]), 0.0)) == 0

    def test_ties_go_to_lowest_index(self):
        cal = LabeledSample(np.array([0.0]), 1.0)
        assert select_source_model([ConstantModel(0.0), ConstantModel(2.0)], cal) == 0

    def test_five_offset_sources(self, rng):
        w = np.array([1.0, -0.5])
        models = []
        for offset in range(5):
            x = rng.uniform(size=(20, 2))
            models.append(RidgeLearner().fit(Dataset(x, x @ w + 3.0 * offset)))
        xc = rng.uniform(size=2)
        assert select_source_model(models, LabeledSample(xc, float(xc @ w + 9.0))) == 3

    def test_empty(self):
        with pytest.raises(InvalidInputError):
            select_source_model([], LabeledSample(np.array([0.0]), 0.0))
