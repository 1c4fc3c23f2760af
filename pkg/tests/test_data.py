"""Synthetic generation, single-positive corruption, splits, and file I/O."""

import numpy as np
import pytest
from scipy import stats

from spml.data import (
    FullDataset,
    SinglePositiveDataset,
    SynthConfig,
    corrupt_to_single_positive,
    generate_synthetic,
    load_dataset,
    save_dataset,
    split_dataset,
)
from spml.errors import ConfigError, CorruptionError, ParseError, SplitError


class TestGenerateSynthetic:
    def test_contract(self):
        data = generate_synthetic(SynthConfig(n_examples=100, n_features=6, n_labels=4, seed=1))
        assert data.features.shape == (100, 6)
        assert data.labels.shape == (100, 4)
        assert np.all(data.labels.sum(axis=1) >= 1)
        assert set(np.unique(data.labels)) <= {0, 1}

    def test_deterministic(self):
        cfg = SynthConfig(n_examples=50, n_features=5, n_labels=3, seed=9)
        a = generate_synthetic(cfg)
        b = generate_synthetic(cfg)
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_positive_rate_calibration(self):
        data = generate_synthetic(
            SynthConfig(n_examples=5000, n_features=10, n_labels=10,
                        target_positive_rate=0.3, noise_std=0.0, seed=4)
        )
        mean_positives = float(data.labels.sum(axis=1).mean())
        assert 2.5 <= mean_positives <= 3.5

    @pytest.mark.parametrize("field, value", [
        ("n_examples", 0), ("target_positive_rate", 0.0),
        ("target_positive_rate", 1.0), ("noise_std", -0.1),
    ])
    def test_bad_config(self, field, value):
        cfg = SynthConfig(**{field: value})
        with pytest.raises(ConfigError):
            generate_synthetic(cfg)


class TestCorruption:
    def test_single_positive_is_certain(self):
        labels = np.array([[1, 0, 0]])
        features = np.zeros((1, 2))
        for seed in range(20):
            spml = corrupt_to_single_positive(labels, features, seed)
            assert spml.observed_positive[0] == 0

    def test_uniform_over_positives(self):
        labels = np.array([[0, 1, 1]])
        features = np.zeros((1, 2))
        picks = np.array([
            corrupt_to_single_positive(labels, features, seed).observed_positive[0]
            for seed in range(10000)
        ])
        share_of_one = np.mean(picks == 1)
        assert abs(share_of_one - 0.5) <= 0.02

    def test_chi_square_does_not_reject_uniformity(self):
        labels = np.array([[1, 0, 1, 1, 0]])
        features = np.zeros((1, 2))
        picks = [
            int(corrupt_to_single_positive(labels, features, seed).observed_positive[0])
            for seed in range(10000)
        ]
        counts = [picks.count(i) for i in (0, 2, 3)]
        assert stats.chisquare(counts).pvalue > 0.01

    def test_observed_is_true_positive(self):
        data = generate_synthetic(SynthConfig(n_examples=200, n_features=8, n_labels=5, seed=2))
        spml = corrupt_to_single_positive(data.labels, data.features, seed=3)
        rows = np.arange(200)
        assert np.all(data.labels[rows, spml.observed_positive] == 1)
        np.testing.assert_array_equal(spml.features, data.features)

    def test_deterministic(self):
        data = generate_synthetic(SynthConfig(n_examples=50, n_features=4, n_labels=6, seed=5))
        a = corrupt_to_single_positive(data.labels, data.features, seed=7)
        b = corrupt_to_single_positive(data.labels, data.features, seed=7)
        np.testing.assert_array_equal(a.observed_positive, b.observed_positive)

    def test_zero_positive_row_names_row(self):
        labels = np.array([[1, 0], [0, 0], [0, 1]])
        with pytest.raises(CorruptionError, match="row 1"):
            corrupt_to_single_positive(labels, np.zeros((3, 2)), seed=0)


class TestSplit:
    def test_sizes(self):
        x = np.zeros((100, 3))
        y = np.ones((100, 2), dtype=np.int8)
        split = split_dataset(x, y, (0.8, 0.1, 0.1), seed=0)
        assert split.train.features.shape[0] == 80
        assert split.val.features.shape[0] == 10
        assert split.test.features.shape[0] == 10

    def test_partition_property(self):
        n = 57
        x = np.arange(n, dtype=np.float64).reshape(n, 1)
        y = np.ones((n, 1), dtype=np.int8)
        split = split_dataset(x, y, (0.6, 0.2, 0.2), seed=3)
        seen = np.concatenate([
            split.train.features[:, 0], split.val.features[:, 0], split.test.features[:, 0]
        ])
        assert sorted(seen.astype(int).tolist()) == list(range(n))

    def test_deterministic(self):
        x = np.random.default_rng(0).normal(size=(40, 2))
        y = np.ones((40, 1), dtype=np.int8)
        a = split_dataset(x, y, (0.5, 0.25, 0.25), seed=11)
        b = split_dataset(x, y, (0.5, 0.25, 0.25), seed=11)
        np.testing.assert_array_equal(a.train.features, b.train.features)
        np.testing.assert_array_equal(a.test.features, b.test.features)

    def test_empty_split_rejected(self):
        x = np.zeros((5, 1))
        y = np.ones((5, 1), dtype=np.int8)
        with pytest.raises(SplitError):
            split_dataset(x, y, (0.9, 0.05, 0.05), seed=0)

    def test_fractions_must_sum_to_one(self):
        x = np.zeros((10, 1))
        y = np.ones((10, 1), dtype=np.int8)
        with pytest.raises(SplitError):
            split_dataset(x, y, (0.5, 0.3, 0.3), seed=0)


class TestFileIO:
    def test_full_round_trip(self, tmp_path):
        data = generate_synthetic(SynthConfig(n_examples=30, n_features=4, n_labels=3, seed=8))
        path = tmp_path / "full.txt"
        save_dataset(path, data)
        loaded = load_dataset(path)
        assert isinstance(loaded, FullDataset)
        np.testing.assert_array_equal(loaded.features, data.features)
        np.testing.assert_array_equal(loaded.labels, data.labels)

    def test_single_round_trip(self, tmp_path):
        data = generate_synthetic(SynthConfig(n_examples=20, n_features=3, n_labels=4, seed=9))
        spml = corrupt_to_single_positive(data.labels, data.features, seed=1)
        path = tmp_path / "single.txt"
        save_dataset(path, spml)
        loaded = load_dataset(path)
        assert isinstance(loaded, SinglePositiveDataset)
        assert loaded.n_labels == 4
        np.testing.assert_array_equal(loaded.features, spml.features)
        np.testing.assert_array_equal(loaded.observed_positive, spml.observed_positive)

    def test_resave_is_byte_identical(self, tmp_path):
        data = generate_synthetic(SynthConfig(n_examples=10, n_features=3, n_labels=2, seed=2))
        first = tmp_path / "a.txt"
        second = tmp_path / "b.txt"
        save_dataset(first, data)
        save_dataset(second, load_dataset(first))
        assert first.read_bytes() == second.read_bytes()

    def test_comments_ignored(self, tmp_path):
        path = tmp_path / "c.txt"
        path.write_text(
            "# a comment\n"
            "spml-dataset v1 N=1 D=2 L=2 kind=full\n"
            "# another\n"
            "1,2|0,1\n"
        )
        loaded = load_dataset(path)
        np.testing.assert_array_equal(loaded.labels, [[0, 1]])

    def test_label_row_length_mismatch_names_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text(
            "spml-dataset v1 N=1 D=2 L=5 kind=full\n"
            "1,2|0,1,0,1\n"
        )
        with pytest.raises(ParseError) as exc:
            load_dataset(path)
        assert exc.value.line == 2

    def test_single_index_out_of_range(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text(
            "spml-dataset v1 N=1 D=2 L=5 kind=single\n"
            "1,2|7\n"
        )
        with pytest.raises(ParseError) as exc:
            load_dataset(path)
        assert exc.value.line == 2

    def test_label_value_outside_binary(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text(
            "spml-dataset v1 N=1 D=1 L=2 kind=full\n"
            "1|0,2\n"
        )
        with pytest.raises(ParseError):
            load_dataset(path)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("spml-dataset v2 N=1 D=1 L=1 kind=full\n1|1\n")
        with pytest.raises(ParseError) as exc:
            load_dataset(path)
        assert exc.value.line == 1

    def test_wrong_data_line_count(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("spml-dataset v1 N=3 D=1 L=1 kind=full\n1|1\n2|1\n")
        with pytest.raises(ParseError, match="N=3"):
            load_dataset(path)
