import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fuzzylabel.dataset import (DataError, Dataset, LabelMode, ValidationError, check_fuzzy, check_logical,
                                fuzzy_to_logical, kfold_split, load_arff, load_csv, load_fuzzy_csv, save_csv,
                                save_fuzzy_csv, standardize)


def write(path, text):
    path.write_text(text)
    return path


class TestDatasetType:
    def test_arrays_are_frozen_copies(self):
        X = np.zeros((2, 2))
        ds = Dataset(X, [[1, 0], [0, 1]])
        X[0, 0] = 5
        assert ds.features[0, 0] == 0
        with pytest.raises(ValueError):
            ds.features[0, 0] = 1

    def test_single_mode_requires_one_hot(self):
        with pytest.raises(ValidationError, match="one-hot|sum"):
            Dataset(np.zeros((2, 1)), [[1, 1], [0, 1]], "single")
        Dataset(np.zeros((2, 1)), [[1, 1], [0, 0]], "multi")

    def test_rejects_nonbinary_and_nonfinite(self):
        with pytest.raises(ValidationError):
            check_logical([[2, 0]], LabelMode.MULTI)
        with pytest.raises(ValidationError):
            Dataset([[np.nan]], [[1]])
        with pytest.raises(ValidationError):
            check_fuzzy([[1.5]])

    def test_row_count_mismatch(self):
        with pytest.raises(ValidationError, match="rows"):
            Dataset(np.zeros((3, 1)), np.eye(2))
        with pytest.raises(ValidationError, match="shape"):
            Dataset(np.zeros((2, 1)), np.eye(2), fuzzy=np.zeros((2, 3)))

    def test_fuzzy_rows_need_not_sum_to_one(self):
        ds = Dataset(np.zeros((2, 1)), [[1, 0], [0, 1]], "multi", fuzzy=[[0.9, 0.8], [0.0, 0.1]])
        assert ds.fuzzy.sum(1).tolist() == pytest.approx([1.7, 0.1])

    def test_subset_and_class_indices(self):
        ds = Dataset(np.arange(6.0).reshape(3, 2), [[0, 1], [1, 0], [0, 1]])
        assert ds.class_indices().tolist() == [1, 0, 1]
        sub = ds.subset([2, 0])
        assert sub.features.tolist() == [[4, 5], [0, 1]]
        with pytest.raises(ValueError):
            Dataset(np.zeros((1, 1)), [[1, 1]], "multi").class_indices()


class TestCsv:
    def test_categorical_single_label(self, tmp_path):
        p = write(tmp_path / "d.csv", "f1,f2,cls\n1,2,a\n3,4,b\n5,6,a\n")
        ds = load_csv(p, label_cols=1, mode="single")
        assert (ds.n_samples, ds.n_features, ds.n_labels) == (3, 2, 2)
        assert ds.logical.tolist() == [[1, 0], [0, 1], [1, 0]]
        assert ds.label_names == ("a", "b")

    def test_descriptor_supplies_layout(self, tmp_path):
        p = write(tmp_path / "d.csv", "x,l1,l2\n0.5,1,0\n1.5,1,1\n")
        write(tmp_path / "d.json", json.dumps({"label_cols": 2, "mode": "multi"}))
        ds = load_csv(p)
        assert ds.mode is LabelMode.MULTI and ds.logical.tolist() == [[1, 0], [1, 1]]

    def test_nan_cell_is_named(self, tmp_path):
        p = write(tmp_path / "d.csv", "f1,f2,cls\n1,2,a\n3,NaN,b\n")
        with pytest.raises(DataError, match=r"row 2, column 1 \('f2'\)"):
            load_csv(p, 1, "single")

    def test_malformed_number_is_named(self, tmp_path):
        p = write(tmp_path / "d.csv", "f1,cls\n1x,a\n")
        with pytest.raises(DataError, match=r"row 1, column 0"):
            load_csv(p, 1, "single")

    def test_multi_label_entry_two_rejected(self, tmp_path):
        p = write(tmp_path / "d.csv", "f,l1,l2\n1,0,2\n")
        with pytest.raises(ValidationError):
            load_csv(p, 2, "multi")

    def test_one_hot_violation_rejected(self, tmp_path):
        p = write(tmp_path / "d.csv", "f,a,b\n1,1,1\n")
        with pytest.raises(ValidationError):
            load_csv(p, 2, "single")

    def test_missing_layout_and_file(self, tmp_path):
        p = write(tmp_path / "d.csv", "f,a\n1,1\n")
        with pytest.raises(DataError, match="label_cols"):
            load_csv(p)
        with pytest.raises(DataError, match="no such file"):
            load_csv(tmp_path / "missing.csv", 1, "single")

    @pytest.mark.parametrize("mode", ["single", "multi"])
    def test_round_trip(self, tmp_path, rng, mode):
        X = rng.standard_normal((20, 3)) * 1e3
        if mode == "single":
            Y = np.eye(3)[rng.integers(0, 3, 20)]
        else:
            Y = (rng.random((20, 3)) < 0.5).astype(float)
        ds = Dataset(X, Y, mode, label_names=("p", "q", "r"))
        back = load_csv(save_csv(ds, tmp_path / "rt.csv"))
        assert np.abs(back.features - X).max() <= 1e-12
        assert np.array_equal(back.logical, Y) and back.label_names == ds.label_names

    def test_fuzzy_csv_six_significant_digits(self, tmp_path):
        U = np.array([[0.123456789, 1.0], [0.0, 2.0 / 3.0]])
        p = save_fuzzy_csv(U, tmp_path / "u.csv", ("a", "b"))
        lines = p.read_text().splitlines()
        assert lines == ["u_a,u_b", "0.123457,1", "0,0.666667"]
        np.testing.assert_allclose(load_fuzzy_csv(p), U, atol=5e-7)

    def test_arff(self, tmp_path):
        p = write(tmp_path / "t.arff", "@relation t\n@attribute a numeric\n@attribute b {lo,hi}\n"
                                       "@attribute l1 {0,1}\n@attribute l2 {0,1}\n@data\n0.5,hi,1,0\n2,lo,1,1\n")
        ds = load_arff(p, 2)
        assert ds.features.tolist() == [[0.5, 1.0], [2.0, 0.0]]
        assert ds.logical.tolist() == [[1, 0], [1, 1]] and ds.label_names == ("l1", "l2")
        with pytest.raises(DataError):
            load_arff(p, 4)


class TestStandardize:
    def test_closed_form(self):
        Z, params = standardize(np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]))
        np.testing.assert_allclose(Z[:, 0], [-1.224744871391589, 0, 1.224744871391589], atol=1e-12)
        assert Z[:, 1].tolist() == [0, 0, 0]
        assert params.transform([[4.0, 7.0]])[0].tolist() == pytest.approx([2.449489742783178, 0.0])

    def test_needs_two_rows(self):
        with pytest.raises(ValueError):
            standardize(np.ones((1, 2)))

    @given(arrays(np.float64, st.tuples(st.integers(2, 15), st.integers(1, 4)),
                  elements=st.floats(-1e3, 1e3, allow_nan=False)))
    def test_idempotent(self, X):
        Z, _ = standardize(X)
        Z2, _ = standardize(Z)
        assert np.abs(Z2 - Z).max() <= 1e-10 * max(1.0, np.abs(Z).max())


class TestFolds:
    def test_sizes(self):
        assert kfold_split(10, 5, 0).sizes().tolist() == [2] * 5
        assert sorted(kfold_split(7, 5, 3).sizes().tolist(), reverse=True) == [2, 2, 1, 1, 1]

    def test_deterministic_and_seed_sensitive(self):
        a, b = kfold_split(50, 5, 9), kfold_split(50, 5, 9)
        assert np.array_equal(a.assignments, b.assignments)
        assert not np.array_equal(a.assignments, kfold_split(50, 5, 10).assignments)

    def test_errors(self):
        with pytest.raises(ValueError):
            kfold_split(4, 5)
        with pytest.raises(ValueError):
            kfold_split(10, 1)
        with pytest.raises(IndexError):
            kfold_split(10, 5).train_test(5)

    def test_stratified(self):
        classes = np.array([0] * 20 + [1] * 10)
        split = kfold_split(30, 5, 1, classes)
        for train, test in split:
            assert np.bincount(classes[test]).tolist() == [4, 2]
            assert np.intersect1d(train, test).size == 0

    @given(st.integers(2, 60), st.integers(2, 8), st.integers(0, 2**32 - 1))
    def test_partition_property(self, n, f, seed):
        if n < f:
            return
        split = kfold_split(n, f, seed)
        tests = np.concatenate([t for _, t in split])
        assert sorted(tests.tolist()) == list(range(n))
        sizes = split.sizes()
        assert sizes.max() - sizes.min() <= 1


class TestFuzzyToLogical:
    def test_examples(self):
        row = [0.05, 0.40, 0.50, 0.90, 0.60, 0.10]
        assert fuzzy_to_logical(row, "single").tolist() == [0, 0, 0, 1, 0, 0]
        assert fuzzy_to_logical([0.3, 0.7, 0.5], "multi", 0.5).tolist() == [0, 1, 1]
        assert fuzzy_to_logical([0.5, 0.5], "single").tolist() == [1, 0]

    def test_threshold_range(self):
        with pytest.raises(ValueError):
            fuzzy_to_logical([[0.2]], "multi", 1.0)

    @given(arrays(np.float64, st.tuples(st.integers(1, 10), st.integers(1, 6)), elements=st.floats(0, 1)),
           st.floats(0.01, 0.99))
    def test_exhaustive_threshold_rule(self, U, t):
        out = fuzzy_to_logical(U, "multi", t)
        assert np.array_equal(out == 1, U >= t)
        single = fuzzy_to_logical(U, "single")
        assert np.all(single.sum(1) == 1)
