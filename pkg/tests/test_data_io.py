import numpy as np
import pytest

from mdh.data_io import DataError, DegenerateDataError, Dataset, center, \
    default_bandwidth, load_csv, principal_components, standardize


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestLoadCsv:
    def test_plain_matrix(self, tmp_path):
        ds, labeled = load_csv(write(tmp_path, "0,0\n1,1\n2,2\n"))
        assert ds.n == 3 and ds.d == 2
        assert labeled is None
        np.testing.assert_array_equal(ds.rows, [[0, 0], [1, 1], [2, 2]])

    def test_header_and_labels(self, tmp_path):
        text = "x,y,cls\n0,0,+\n1,1,-\n2,2,\n3,3,\n"
        ds, labeled = load_csv(write(tmp_path, text), has_header=True,
                               label_column="cls")
        assert ds.n == 4
        assert labeled.size == 2
        # lexicographic smallest symbol maps to -1: '+' < '-'
        np.testing.assert_array_equal(labeled.indices, [0, 1])
        np.testing.assert_array_equal(labeled.labels, [-1, 1])

    def test_positive_label_mapping(self, tmp_path):
        text = "x,y,cls\n0,0,+\n1,1,-\n"
        _, labeled = load_csv(write(tmp_path, text), has_header=True,
                              label_column="cls", positive_label="+")
        np.testing.assert_array_equal(labeled.labels, [1, -1])

    def test_parse_error_names_row_and_column(self, tmp_path):
        with pytest.raises(DataError, match="row 1, column 2"):
            load_csv(write(tmp_path, "1,abc\n2,3\n"))

    def test_ragged_rows(self, tmp_path):
        with pytest.raises(DataError, match="expected 2 fields"):
            load_csv(write(tmp_path, "1,2\n3\n"))

    def test_non_finite_rejected(self, tmp_path):
        with pytest.raises(DataError, match="non-finite"):
            load_csv(write(tmp_path, "1,inf\n2,3\n"))

    def test_missing_file(self):
        with pytest.raises(DataError, match="no/such/file.csv"):
            load_csv("no/such/file.csv")

    def test_label_column_by_index(self, tmp_path):
        ds, labeled = load_csv(write(tmp_path, "0,0,a\n1,1,b\n"),
                               label_column=2)
        assert ds.d == 2
        np.testing.assert_array_equal(labeled.labels, [-1, 1])


class TestCenter:
    def test_basic(self):
        ds, mean = center(Dataset(np.array([[0.0, 0.0], [2.0, 2.0]])))
        np.testing.assert_allclose(ds.rows, [[-1, -1], [1, 1]])
        np.testing.assert_allclose(mean, [1, 1])

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        ds, _ = center(Dataset(rng.normal(size=(10, 3))))
        again, mean = center(ds)
        np.testing.assert_allclose(again.rows, ds.rows, atol=1e-14)
        np.testing.assert_allclose(mean, 0.0, atol=1e-14)

    def test_repeated_point(self):
        ds, mean = center(Dataset(np.array([[5.0, 5.0], [5.0, 5.0]])))
        np.testing.assert_array_equal(ds.rows, 0.0)
        np.testing.assert_allclose(mean, [5, 5])

    def test_commutes_with_projection(self):
        rng = np.random.default_rng(1)
        ds = Dataset(rng.normal(size=(20, 4)) + 3.0)
        v = rng.standard_normal(4)
        v /= np.linalg.norm(v)
        centered, mean = center(ds)
        direct = centered.rows @ v
        shifted = ds.rows @ v - ds.rows.mean(axis=0) @ v
        np.testing.assert_allclose(direct, shifted, rtol=1e-12)


class TestPrincipalComponents:
    def test_axis_aligned(self):
        ds = Dataset(np.array([[-1.0, 0.0], [1.0, 0.0]]))
        vecs, variances = principal_components(ds, 1)
        np.testing.assert_allclose(vecs[:, 0], [1, 0], atol=1e-12)
        np.testing.assert_allclose(variances, [1.0])

    def test_isotropic_cross(self):
        ds = Dataset(np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1]]))
        _, variances = principal_components(ds, 2)
        np.testing.assert_allclose(variances, [0.5, 0.5])

    def test_against_dense_eigh_oracle(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=(20, 3)) @ np.diag([3.0, 1.0, 0.2])
        ds, _ = center(Dataset(x))
        vecs, variances = principal_components(ds, 3)
        cov = (ds.rows.T @ ds.rows) / ds.n
        vals, evecs = np.linalg.eigh(cov)
        order = np.argsort(vals)[::-1]
        np.testing.assert_allclose(variances, vals[order], rtol=1e-10)
        for j in range(3):
            ref = evecs[:, order[j]]
            assert min(np.linalg.norm(vecs[:, j] - ref),
                       np.linalg.norm(vecs[:, j] + ref)) < 1e-8

    def test_orthonormal(self):
        rng = np.random.default_rng(3)
        ds, _ = center(Dataset(rng.normal(size=(30, 5))))
        vecs, _ = principal_components(ds, 5)
        np.testing.assert_allclose(vecs.T @ vecs, np.eye(5), atol=1e-10)

    def test_power_iteration_path(self):
        # d > 64 triggers power iteration with deflation
        rng = np.random.default_rng(5)
        scales = np.linspace(5.0, 0.5, 70)
        x = rng.normal(size=(50, 70)) * scales
        ds, _ = center(Dataset(x))
        vecs, variances = principal_components(ds, 3)
        cov = (ds.rows.T @ ds.rows) / ds.n
        vals, evecs = np.linalg.eigh(cov)
        order = np.argsort(vals)[::-1]
        np.testing.assert_allclose(variances, vals[order[:3]], rtol=1e-8)
        for j in range(3):
            ref = evecs[:, order[j]]
            assert min(np.linalg.norm(vecs[:, j] - ref),
                       np.linalg.norm(vecs[:, j] + ref)) < 1e-6


class TestDefaultBandwidth:
    def test_exact_value(self):
        # std of projections 2 along pc1 and n = 32: 0.9 * 2 * 32^(-1/5) = 0.9
        xs = np.array([-2.0, -2, -2, -2, -2, -2, -2, -2, -2, -2, -2, -2,
                       -2, -2, -2, -2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2,
                       2, 2, 2, 2])
        rows = np.column_stack([xs, np.zeros(32)])
        assert default_bandwidth(Dataset(rows)) == pytest.approx(0.9,
                                                                 rel=1e-12)

    def test_zero_variance(self):
        with pytest.raises(DegenerateDataError, match="zero variance"):
            default_bandwidth(Dataset(np.ones((5, 2))))

    def test_scale_equivariance(self):
        rng = np.random.default_rng(9)
        rows = rng.normal(size=(40, 3))
        h1 = default_bandwidth(Dataset(rows))
        h2 = default_bandwidth(Dataset(rows * 7.5))
        assert h2 == pytest.approx(7.5 * h1, rel=1e-12)


def test_standardize_unit_variance():
    rng = np.random.default_rng(2)
    ds = Dataset(rng.normal(size=(50, 3)) * [1.0, 10.0, 0.1] + 5.0)
    std, mean, scale = standardize(ds)
    np.testing.assert_allclose(std.rows.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(std.rows.std(axis=0), 1.0, rtol=1e-12)


def test_standardize_rejects_constant_column():
    rows = np.column_stack([np.arange(5.0), np.ones(5)])
    with pytest.raises(DegenerateDataError):
        standardize(Dataset(rows))
