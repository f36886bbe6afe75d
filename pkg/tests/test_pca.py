import numpy as np
import pytest

from morphofv.pca import fit_pca, project


def svd_oracle(data, d):
    """Independent reference: PCA through a dense SVD of the centered data."""
    data = np.asarray(data, dtype=np.float64)
    mean = data.mean(axis=0)
    centered = data - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:d].copy()
    variance = (s[:d] ** 2) / (data.shape[0] - 1)
    for row in components:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            row *= -1.0
    return mean, components, variance


def test_axis_aligned_data():
    data = np.array([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]])
    model = fit_pca(data, 1)
    np.testing.assert_allclose(model.components, [[1.0, 0.0]], atol=1e-12)
    np.testing.assert_allclose(model.explained_variance, [1.0], atol=1e-12)
    total = np.var(data, axis=0, ddof=1).sum()
    assert model.explained_variance.sum() == pytest.approx(total)


def test_matches_svd_oracle():
    rng = np.random.default_rng(7)
    data = rng.normal(size=(20, 604))
    model = fit_pca(data, 5)
    mean, components, variance = svd_oracle(data, 5)
    np.testing.assert_allclose(model.mean, mean, atol=1e-12)
    np.testing.assert_allclose(model.components, components, atol=1e-8)
    np.testing.assert_allclose(model.explained_variance, variance, atol=1e-8)


def test_full_rank_reconstruction():
    rng = np.random.default_rng(3)
    data = rng.normal(size=(5, 604))
    model = fit_pca(data, 5)
    centered = data - model.mean
    reconstructed = project(model, data) @ model.components
    np.testing.assert_allclose(reconstructed, centered, atol=1e-8)


def test_rank_deficient_data_allows_zero_eigenvalues():
    rng = np.random.default_rng(11)
    base = rng.normal(size=(4, 10))
    data = np.vstack([base, base])  # 8 rows, rank <= 4
    model = fit_pca(data, 6)
    assert np.all(model.explained_variance >= 0)
    assert np.all(np.diff(model.explained_variance) <= 1e-12)


def test_rows_orthonormal():
    rng = np.random.default_rng(5)
    model = fit_pca(rng.normal(size=(30, 12)), 8)
    gram = model.components @ model.components.T
    np.testing.assert_allclose(gram, np.eye(8), atol=1e-8)


def test_requires_enough_rows():
    with pytest.raises(ValueError):
        fit_pca(np.zeros((3, 10)), 4)


def test_d_out_of_range():
    with pytest.raises(ValueError):
        fit_pca(np.zeros((20, 10)), 11)
    with pytest.raises(ValueError):
        fit_pca(np.zeros((20, 10)), 0)


def test_project_centering():
    model = fit_pca(np.random.default_rng(0).normal(size=(10, 6)), 3)
    np.testing.assert_array_equal(project(model, model.mean), np.zeros(3))


def test_project_component_row_gives_basis_vector():
    model = fit_pca(np.random.default_rng(1).normal(size=(10, 6)), 3)
    out = project(model, model.mean + model.components[0])
    np.testing.assert_allclose(out, [1.0, 0.0, 0.0], atol=1e-10)


def test_project_matches_manual_product():
    rng = np.random.default_rng(2)
    model = fit_pca(rng.normal(size=(15, 9)), 4)
    x = rng.normal(size=9)
    np.testing.assert_allclose(project(model, x), model.components @ (x - model.mean), atol=1e-10)


def test_project_dimension_mismatch():
    model = fit_pca(np.random.default_rng(0).normal(size=(10, 6)), 2)
    with pytest.raises(ValueError):
        project(model, np.zeros(7))


def test_projection_is_non_expansive():
    rng = np.random.default_rng(9)
    model = fit_pca(rng.normal(size=(25, 14)), 6)
    for _ in range(20):
        x = rng.normal(size=14) * rng.uniform(0.1, 10)
        assert np.linalg.norm(project(model, x)) <= np.linalg.norm(x - model.mean) + 1e-8


def test_row_permutation_invariance():
    rng = np.random.default_rng(4)
    data = rng.normal(size=(18, 7))
    a = fit_pca(data, 4)
    b = fit_pca(data[rng.permutation(18)], 4)
    np.testing.assert_allclose(a.components, b.components, atol=1e-9)
    np.testing.assert_allclose(a.explained_variance, b.explained_variance, atol=1e-9)


def test_explained_variance_bounded_by_total():
    rng = np.random.default_rng(6)
    data = rng.normal(size=(40, 10))
    model = fit_pca(data, 4)
    total = np.var(data, axis=0, ddof=1).sum()
    assert model.explained_variance.sum() <= total + 1e-9
