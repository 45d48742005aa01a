import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smiclust.data import (
    ConstraintFormatError,
    ConstraintSet,
    Dataset,
    DatasetFormatError,
    EmptyDatasetError,
    empty_constraints,
    load_constraints,
    load_dataset,
    make_blobs,
    normalize,
    sample_constraints,
    save_constraints,
)


def _csv(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadDataset:
    def test_zeros_no_labels(self, tmp_path):
        path = _csv(tmp_path, "0,0\n0,0\n0,0\n0,0\n")
        ds = load_dataset(path, "csv")
        assert ds.n == 4 and ds.d == 2
        assert ds.labels is None
        assert np.array_equal(ds.features, np.zeros((4, 2)))

    def test_labeled_infers_class_count(self, tmp_path):
        path = _csv(tmp_path, "0.5,1\n0.4,1\n8.0,2\n8.1,2\n")
        ds = load_dataset(path, "labeled-csv")
        assert ds.c == 2
        assert np.array_equal(ds.labels, [1, 1, 2, 2])
        assert ds.d == 1

    def test_ragged_row_names_line(self, tmp_path):
        path = _csv(tmp_path, "1,2\n3,4\n5\n")
        with pytest.raises(DatasetFormatError, match="line 3"):
            load_dataset(path, "csv")

    def test_empty_file(self, tmp_path):
        path = _csv(tmp_path, "")
        with pytest.raises(EmptyDatasetError):
            load_dataset(path, "csv")
        assert load_dataset(path, "csv", allow_empty=True) is None

    def test_non_numeric_cell_names_line(self, tmp_path):
        path = _csv(tmp_path, "1,2\n3,oops\n")
        with pytest.raises(DatasetFormatError, match="line 2"):
            load_dataset(path, "csv")

    def test_header_autodetected(self, tmp_path):
        path = _csv(tmp_path, "x,y\n1,2\n3,4\n")
        ds = load_dataset(path, "csv")
        assert ds.n == 2

    def test_non_integer_label_rejected(self, tmp_path):
        path = _csv(tmp_path, "1,1.5\n2,2\n")
        with pytest.raises(DatasetFormatError, match="line 1"):
            load_dataset(path, "labeled-csv")

    def test_label_below_one_rejected(self, tmp_path):
        path = _csv(tmp_path, "1,0\n2,1\n")
        with pytest.raises(DatasetFormatError, match="line 1"):
            load_dataset(path, "labeled-csv")

    def test_non_finite_rejected(self, tmp_path):
        path = _csv(tmp_path, "1,2\nnan,4\n")
        with pytest.raises(DatasetFormatError, match="line 2"):
            load_dataset(path, "csv")

    def test_unknown_format(self, tmp_path):
        path = _csv(tmp_path, "1,2\n")
        with pytest.raises(ValueError, match="format"):
            load_dataset(path, "tsv")


class TestNormalize:
    def test_minmax_symmetric_endpoints(self):
        ds = Dataset(features=np.array([[0.0], [255.0]]))
        out = normalize(ds, "minmax-symmetric")
        assert np.allclose(out.features.ravel(), [-1.0, 1.0])

    def test_constant_column_maps_to_zero(self):
        ds = Dataset(features=np.array([[5.0], [5.0], [5.0]]))
        for scheme in ("minmax-symmetric", "zscore"):
            assert np.array_equal(normalize(ds, scheme).features, np.zeros((3, 1)))

    def test_zscore_oracle(self):
        ds = Dataset(features=np.array([[1.0], [2.0], [3.0]]))
        out = normalize(ds, "zscore").features.ravel()
        assert abs(out.mean()) < 1e-12
        assert abs(out.var() - 1.0) < 1e-12

    def test_minmax_idempotent(self):
        rng = np.random.default_rng(0)
        ds = Dataset(features=rng.uniform(-3, 7, size=(40, 3)))
        once = normalize(ds, "minmax-symmetric")
        twice = normalize(once, "minmax-symmetric")
        assert np.allclose(once.features, twice.features, atol=1e-12)

    def test_none_is_identity(self):
        ds = Dataset(features=np.array([[1.0, 2.0]]))
        assert normalize(ds, "none") is ds

    def test_unknown_scheme(self):
        ds = Dataset(features=np.ones((2, 2)))
        with pytest.raises(ValueError):
            normalize(ds, "standard")

    def test_labels_preserved(self):
        ds = Dataset(features=np.array([[0.0], [4.0]]), labels=np.array([1, 2]), c=2)
        out = normalize(ds, "zscore")
        assert np.array_equal(out.labels, ds.labels)
        assert out.c == 2


class TestMakeBlobs:
    def test_deterministic(self):
        a = make_blobs(50, 2, 2, 10.0, seed=1)
        b = make_blobs(50, 2, 2, 10.0, seed=1)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)

    def test_zero_separation_balanced(self):
        ds = make_blobs(60, 3, 2, 0.0, seed=2)
        counts = np.bincount(ds.labels)[1:]
        assert np.array_equal(counts, [60, 60, 60])
        # all classes draw from the same standard normal around the origin
        for cls in (1, 2, 3):
            mean = ds.features[ds.labels == cls].mean(axis=0)
            assert np.all(np.abs(mean) < 4.0 / np.sqrt(60))

    def test_nearest_centroid_oracle(self):
        ds = make_blobs(50, 3, 2, 20.0, seed=7)
        centroids = np.stack([ds.features[ds.labels == cls].mean(axis=0) for cls in (1, 2, 3)])
        dist = np.linalg.norm(ds.features[:, None, :] - centroids[None, :, :], axis=2)
        predicted = dist.argmin(axis=1) + 1
        assert np.array_equal(predicted, ds.labels)

    def test_pairwise_center_distances(self):
        # simplex arrangement: all centers equidistant when d >= c - 1
        ds = make_blobs(2000, 3, 2, 30.0, seed=3)
        centroids = np.stack([ds.features[ds.labels == cls].mean(axis=0) for cls in (1, 2, 3)])
        for i in range(3):
            for j in range(i + 1, 3):
                assert abs(np.linalg.norm(centroids[i] - centroids[j]) - 30.0) < 0.5

    def test_bad_counts(self):
        with pytest.raises(ValueError):
            make_blobs(0, 2, 2, 1.0, seed=0)


class TestSampleConstraints:
    def test_zero_links(self):
        cs = sample_constraints([1, 1, 2, 2], 0, seed=0)
        assert cs.must_links == () and cs.cannot_links == ()

    def test_all_pairs_enumerated(self):
        cs = sample_constraints([1, 1, 2, 2], 6, seed=0)
        assert set(cs.must_links) == {(0, 1), (2, 3)}
        assert set(cs.cannot_links) == {(0, 2), (0, 3), (1, 2), (1, 3)}

    def test_deterministic(self):
        labels = [1, 2, 1, 2, 1, 2, 2, 1]
        a = sample_constraints(labels, 5, seed=9)
        b = sample_constraints(labels, 5, seed=9)
        assert a == b

    def test_too_many_links(self):
        with pytest.raises(ValueError):
            sample_constraints([1, 2, 1], 4, seed=0)

    @settings(max_examples=40, deadline=None)
    @given(
        labels=st.lists(st.integers(1, 3), min_size=3, max_size=25),
        frac=st.floats(0.1, 1.0),
        seed=st.integers(0, 2**16),
    )
    def test_links_respect_labels(self, labels, frac, seed):
        labels = np.asarray(labels)
        n = labels.shape[0]
        n_links = int(frac * n * (n - 1) // 2)
        cs = sample_constraints(labels, n_links, seed=seed)
        assert len(cs) == n_links
        for i, j in cs.must_links:
            assert labels[i] == labels[j]
        for i, j in cs.cannot_links:
            assert labels[i] != labels[j]
        pairs = cs.must_links + cs.cannot_links
        assert len(set(pairs)) == len(pairs)  # sampled without replacement

    def test_matrix_invariants(self):
        cs = sample_constraints([1, 1, 2, 2, 3], 7, seed=4)
        m = cs.must_link_matrix()
        c = cs.cannot_link_matrix()
        assert np.array_equal(m, m.T) and np.array_equal(c, c.T)
        assert np.array_equal(np.diag(m), np.ones(5))
        assert np.array_equal(np.diag(c), np.zeros(5))
        off = ~np.eye(5, dtype=bool)
        assert np.all((m * c)[off] == 0)


class TestConstraintSet:
    def test_self_pair_rejected(self):
        with pytest.raises(ConstraintFormatError):
            ConstraintSet(((1, 1),), (), 3)

    def test_pair_in_both_lists_rejected(self):
        with pytest.raises(ConstraintFormatError):
            ConstraintSet(((0, 1),), ((1, 0),), 3)

    def test_out_of_range_rejected(self):
        with pytest.raises(ConstraintFormatError):
            ConstraintSet(((0, 3),), (), 3)

    def test_pairs_canonicalized(self):
        cs = ConstraintSet(((2, 0),), ((3, 1),), 4)
        assert cs.must_links == ((0, 2),)
        assert cs.cannot_links == ((1, 3),)


class TestConstraintFiles:
    def test_roundtrip(self, tmp_path):
        cs = sample_constraints([1, 1, 2, 2, 1, 2], 6, seed=1)
        path = tmp_path / "links.txt"
        save_constraints(cs, path)
        assert load_constraints(path, 6) == cs

    def test_file_is_one_based(self, tmp_path):
        path = tmp_path / "links.txt"
        save_constraints(ConstraintSet(((0, 1),), (), 2), path)
        body = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert body == ["1 2 +1"]

    def test_comments_skipped(self, tmp_path):
        path = tmp_path / "links.txt"
        path.write_text("# a comment\n1 2 +1  # trailing\n\n2 3 -1\n")
        cs = load_constraints(path, 3)
        assert cs.must_links == ((0, 1),)
        assert cs.cannot_links == ((1, 2),)

    def test_out_of_range_names_line(self, tmp_path):
        path = tmp_path / "links.txt"
        path.write_text("1 2 +1\n1 9 -1\n")
        with pytest.raises(ConstraintFormatError, match="line 2"):
            load_constraints(path, 4)

    def test_bad_kind_names_line(self, tmp_path):
        path = tmp_path / "links.txt"
        path.write_text("1 2 5\n")
        with pytest.raises(ConstraintFormatError, match="line 1"):
            load_constraints(path, 4)


class TestDatasetValidation:
    def test_empty_features_rejected(self):
        with pytest.raises(ValueError):
            Dataset(features=np.zeros((0, 2)))

    def test_labels_need_class_count(self):
        with pytest.raises(ValueError):
            Dataset(features=np.ones((2, 1)), labels=np.array([1, 2]))

    def test_labels_out_of_range(self):
        with pytest.raises(ValueError):
            Dataset(features=np.ones((2, 1)), labels=np.array([1, 3]), c=2)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            Dataset(features=np.array([[1.0, np.inf]]))
