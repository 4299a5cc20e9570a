import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spreadbench.errors import UndefinedCorrelationError
from spreadbench.evaluation import (aggregate_datasets, evaluate_metrics,
                                    grid_csv_rows, pearson, precision_at,
                                    relative_gain, top_k_indices,
                                    top_share_count, EvaluationCell)


class TestPearson:
    def test_perfect_correlation(self):
        assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)

    def test_perfect_anticorrelation(self):
        assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_half(self):
        assert pearson([1, 2, 3], [1, 3, 2]) == pytest.approx(0.5)

    def test_constant_vector_raises(self):
        with pytest.raises(UndefinedCorrelationError):
            pearson([1.0, 1.0, 1.0], [1, 2, 3])

    def test_short_input_raises(self):
        with pytest.raises(UndefinedCorrelationError):
            pearson([1.0], [2.0])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-100, 100), min_size=3, max_size=20),
           st.floats(0.1, 10), st.floats(-5, 5))
    def test_invariant_under_positive_affine(self, xs, a, b):
        rng = np.random.default_rng(len(xs))
        ys = rng.normal(size=len(xs))
        x = np.asarray(xs)
        if np.ptp(x) < 1e-9:  # near-constant input: correlation undefined
            return
        base = pearson(x, ys)
        assert pearson(a * x + b, ys) == pytest.approx(base, abs=1e-9)
        assert pearson(-a * x + b, ys) == pytest.approx(-base, abs=1e-9)


class TestPrecision:
    def test_identical_rankings(self):
        scores = np.arange(100, dtype=float)
        assert precision_at(scores, scores, 0.05) == 1.0

    def test_disjoint_top_sets(self):
        scores = np.arange(100, dtype=float)
        truth = -scores
        assert precision_at(scores, truth, 0.05) == 0.0

    def test_top_share_arithmetic(self):
        # N=1000 at 0.5% gives k=5; 3 shared of 5 is 0.6
        n = 1000
        rng = np.random.default_rng(0)
        truth = rng.permutation(n).astype(float)
        scores = truth.copy()
        top = top_k_indices(truth, 5)
        # displace two of the true top-5 to the bottom of the score ranking
        scores[top[3]] = -1.0
        scores[top[4]] = -2.0
        assert precision_at(scores, truth, 0.005) == pytest.approx(0.6)

    def test_small_networks_get_at_least_one(self):
        assert top_share_count(10, 0.005) == 1
        assert top_share_count(1000, 0.005) == 5

    def test_ties_broken_by_node_id(self):
        scores = np.array([1.0, 1.0, 1.0, 0.0])
        truth = np.array([0.0, 1.0, 1.0, 1.0])
        # k=1: scores pick node 0, truth picks node 1
        assert precision_at(scores, truth, 0.25) == 0.0

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.sampled_from([0.01, 0.1, 0.33, 1.0]))
    def test_invariant_under_monotone_transform(self, seed, p):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 60))
        scores = rng.normal(size=n)
        truth = rng.normal(size=n)
        base = precision_at(scores, truth, p)
        shifted = 3.0 * scores + 11.0
        cubed = scores**3 + 2.0 * scores
        assert precision_at(shifted, truth, p) == base
        assert precision_at(cubed, truth, p) == base


class TestRelativeGain:
    def test_identical_rankings_give_zero(self):
        q_t = np.linspace(0.1, 0.9, 50)
        assert relative_gain(q_t, q_t.copy(), p=0.1) == pytest.approx(0.0)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_never_negative(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 80))
        q_t = rng.uniform(1 / n, 1, size=n)
        q_inf = np.maximum(q_t, rng.uniform(1 / n, 1, size=n))
        assert relative_gain(q_t, q_inf, p=0.05) >= 0.0


class TestGrid:
    def test_single_metric_normalizes_to_one(self):
        scores = {"degree": np.array([1.0, 2.0, 3.0, 4.0])}
        q_t = np.linspace(0.1, 0.4, 4).reshape(4, 1)
        cells = evaluate_metrics(scores, q_t, q_t[:, 0], 1.0, [1])
        for c in cells:
            assert c.normalized_r == pytest.approx(1.0)

    def test_two_metric_normalization(self):
        rng = np.random.default_rng(5)
        truth = np.linspace(0, 1, 200) + rng.normal(0, 0.05, 200)
        strong = truth + rng.normal(0, 0.1, 200)
        weak = truth + rng.normal(0, 1.5, 200)
        cells = evaluate_metrics({"a": strong, "b": weak},
                                 truth.reshape(-1, 1), truth, 1.0, [1],
                                 include_inf=False)
        by_metric = {c.metric: c for c in cells}
        assert by_metric["a"].normalized_r == pytest.approx(1.0)
        assert by_metric["b"].normalized_r == pytest.approx(
            by_metric["b"].r / by_metric["a"].r)

    def test_exactly_one_best_per_cell(self):
        rng = np.random.default_rng(9)
        truth = rng.uniform(size=50)
        scores = {f"m{i}": rng.uniform(size=50) for i in range(4)}
        cells = evaluate_metrics(scores, truth.reshape(-1, 1), truth, 2.0, [1])
        for t in (1.0, math.inf):
            group = [c for c in cells if c.t == t and c.normalized_r is not None]
            assert sum(1 for c in group if c.normalized_r == 1.0) == 1

    def test_constant_metric_reported_missing(self):
        scores = {"flat": np.ones(10), "ok": np.arange(10, dtype=float)}
        truth = np.linspace(0.1, 1.0, 10)
        cells = evaluate_metrics(scores, truth.reshape(-1, 1), truth, 1.0, [1],
                                 include_inf=False)
        flat = next(c for c in cells if c.metric == "flat")
        ok = next(c for c in cells if c.metric == "ok")
        assert flat.r is None and flat.normalized_r is None
        assert ok.normalized_r == pytest.approx(1.0)

    def test_t_outside_horizon_rejected(self):
        scores = {"a": np.arange(4, dtype=float)}
        q_t = np.linspace(0.1, 0.4, 4).reshape(4, 1)
        with pytest.raises(ValueError):
            evaluate_metrics(scores, q_t, q_t[:, 0], 1.0, [2])


class TestAggregate:
    def _cell(self, metric, norm_r, norm_p=0.5, lam=1.0, t=5.0):
        return EvaluationCell(metric=metric, lambda_ratio=lam, t=t, r=norm_r,
                              precision=norm_p, normalized_r=norm_r,
                              normalized_precision=norm_p)

    def test_single_dataset_identity(self):
        grid = [self._cell("a", 0.8), self._cell("b", 1.0)]
        agg = aggregate_datasets([grid])
        by = {c.metric: c for c in agg}
        assert by["a"].mean_normalized_r == pytest.approx(0.8)
        assert by["b"].mean_normalized_r == pytest.approx(1.0)

    def test_best_everywhere_scores_one(self):
        grids = [[self._cell("a", 1.0)], [self._cell("a", 1.0)]]
        agg = aggregate_datasets(grids)
        assert agg[0].mean_normalized_r == pytest.approx(1.0)

    def test_mean_of_two_datasets(self):
        grids = [[self._cell("a", 1.0)], [self._cell("a", 0.5)]]
        agg = aggregate_datasets(grids)
        assert agg[0].mean_normalized_r == pytest.approx(0.75)
        assert agg[0].dataset_count == 2

    def test_missing_cells_not_coerced(self):
        with_missing = EvaluationCell(metric="a", lambda_ratio=1.0, t=5.0,
                                      r=None, precision=0.2,
                                      normalized_r=None,
                                      normalized_precision=0.4)
        agg = aggregate_datasets([[with_missing], [self._cell("a", 0.6)]])
        assert agg[0].mean_normalized_r == pytest.approx(0.6)


class TestCsv:
    def test_rows_sorted_and_parseable(self):
        cells = [EvaluationCell("b", 1.0, math.inf, 0.5, 0.2, 0.9, 0.8),
                 EvaluationCell("a", 1.0, 2.0, 0.7, 0.3, 1.0, 1.0)]
        rows = grid_csv_rows("toy", cells)
        assert rows[0].startswith("toy,a,1.0,2,")
        assert rows[1].startswith("toy,b,1.0,inf,")
