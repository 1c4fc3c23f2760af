"""Pseudo-label thresholding and the label-count statistic."""

import numpy as np
import pytest

from spml.errors import ConfigError, InputError, LabelError
from spml.pseudo import avg_positives_per_example, make_pseudo_labels


class TestMakePseudoLabels:
    def test_direct_rule(self):
        out = make_pseudo_labels(np.array([[0.2, 0.9, 0.7]]), tau=0.75)
        np.testing.assert_array_equal(out, [[0, 1, 0]])

    def test_boundary_equal_is_zero(self):
        out = make_pseudo_labels(np.array([[0.75, 0.7500000001]]), tau=0.75)
        np.testing.assert_array_equal(out, [[0, 1]])

    def test_tau_zero_all_ones(self):
        rng = np.random.default_rng(0)
        probs = rng.uniform(0.01, 0.99, size=(10, 5))
        out = make_pseudo_labels(probs, tau=0.0)
        np.testing.assert_array_equal(out, np.ones_like(out))

    def test_monotone_in_tau(self):
        rng = np.random.default_rng(1)
        probs = rng.uniform(0.0, 1.0, size=(50, 8))
        taus = sorted(rng.uniform(0.0, 0.999, size=10))
        previous = None
        for tau in taus:
            labels = make_pseudo_labels(probs, tau)
            if previous is not None:
                assert np.all(previous >= labels)  # entrywise superset
            previous = labels

    def test_tau_above_max_gives_all_zeros(self):
        probs = np.full((4, 3), 0.8)
        out = make_pseudo_labels(probs, tau=0.9)
        np.testing.assert_array_equal(out, np.zeros_like(out))

    def test_keep_observed_positive_forces_row_positive(self):
        probs = np.full((3, 4), 0.1)
        observed = np.array([0, 2, 3])
        out = make_pseudo_labels(probs, tau=0.9, observed=observed,
                                 keep_observed_positive=True)
        assert np.all(out.sum(axis=1) >= 1)
        np.testing.assert_array_equal(out[np.arange(3), observed], 1)

    def test_keep_observed_requires_indices(self):
        with pytest.raises(ConfigError):
            make_pseudo_labels(np.full((2, 2), 0.5), tau=0.5, keep_observed_positive=True)

    def test_idempotent_on_binary_matrices(self):
        rng = np.random.default_rng(2)
        labels = rng.integers(0, 2, size=(20, 6))
        for tau in (0.001, 0.3, 0.999):
            np.testing.assert_array_equal(make_pseudo_labels(labels, tau), labels)

    @pytest.mark.parametrize("tau", [-0.1, 1.0, 1.5, float("nan")])
    def test_invalid_tau(self, tau):
        with pytest.raises(ConfigError):
            make_pseudo_labels(np.full((1, 2), 0.5), tau=tau)

    def test_observed_index_out_of_range(self):
        with pytest.raises(LabelError):
            make_pseudo_labels(np.full((1, 2), 0.5), tau=0.5, observed=np.array([2]),
                               keep_observed_positive=True)


class TestAvgPositives:
    def test_simple_count(self):
        assert avg_positives_per_example(np.array([[1, 0], [1, 1]])) == 1.5

    def test_all_zeros(self):
        assert avg_positives_per_example(np.zeros((3, 4), dtype=int)) == 0.0

    def test_matches_row_mean_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            labels = rng.integers(0, 2, size=(int(rng.integers(1, 40)), int(rng.integers(1, 12))))
            oracle = float(np.mean(labels.sum(axis=1)))
            assert abs(avg_positives_per_example(labels) - oracle) < 1e-12

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            avg_positives_per_example(np.zeros((0, 3)))
