import numpy as np
import pytest
import scipy.optimize

from lrshield.svm import (
    KernelSpec,
    kernel,
    train_svm,
    train_svr,
    load_model,
    save_model,
    svm_predict,
    svr_predict,
    kernel_matrix,
)
from lrshield.svm._models import _svr_dual

__all__ = [
    'test_kernel_matrix_shape',
    'test_kernel_values',
    'test_model_archive',
    'test_svm_dual_against_slsqp',
    'test_svm_linear_two_points',
    'test_svm_separable_clusters',
    'test_svm_single_class',
    'test_svm_xor',
    'test_svr_coefficients_complementary',
    'test_svr_dual_against_slsqp',
    'test_svr_fits_sine',
]


def test_kernel_values():

    rbf = KernelSpec(sigma = 0.5)

    assert kernel(rbf, [0, 0], [1, 1]) == pytest.approx(np.exp(-1))
    assert kernel(rbf, [3, 4], [3, 4]) == pytest.approx(1)
    assert kernel(KernelSpec('linear'), [1, 2], [3, 4]) == pytest.approx(11)

    with pytest.raises(ValueError, match = 'Dimension mismatch'):

        kernel(rbf, [1, 2], [1, 2, 3])

    with pytest.raises(ValueError):

        KernelSpec('poly')


def test_kernel_matrix_shape(rng):

    a = rng.normal(size = (5, 3))
    b = rng.normal(size = (2, 3))
    k = kernel_matrix(KernelSpec(sigma = 0.1), a, b)

    assert k.shape == (5, 2)
    assert np.all((k > 0) & (k <= 1))
    assert np.allclose(np.diag(kernel_matrix(KernelSpec(), a)), 1)


def test_svr_fits_sine():

    x = np.linspace(0, 3, 40)[:, None]
    y = np.sin(x).ravel()
    model = train_svr(x, y, eps = 0.01, penalty = 100, spec = KernelSpec(
        sigma = 1.0,
    ))
    fitted = svr_predict(model, x)

    assert np.max(np.abs(fitted - y)) < 0.05
    assert svr_predict(model, [1.5]) == pytest.approx(np.sin(1.5), abs = 0.05)
    assert abs(model.coef.sum()) < 1e-6 * np.abs(model.coef).sum() + 1e-9
    assert np.all(np.abs(model.coef) <= 100 + 1e-9)


def test_svm_linear_two_points():

    model = train_svm(
        [[1.0], [-1.0]],
        [1, -1],
        C = 100,
        spec = KernelSpec('linear'),
        tol = 1e-6,
    )
    label, value = svm_predict(model, [0.5])

    # maximal margin separator of the two points is the identity
    assert label == 1
    assert value == pytest.approx(0.5, abs = 1e-4)
    assert model.bias == pytest.approx(0, abs = 1e-4)
    assert np.allclose(model.beta, [0.5, 0.5], atol = 1e-4)


def test_svm_separable_clusters(rng):

    pos = rng.normal(loc = 2.0, scale = 0.3, size = (30, 2))
    neg = rng.normal(loc = -2.0, scale = 0.3, size = (30, 2))
    u = np.vstack([pos, neg])
    v = np.r_[np.ones(30), -np.ones(30)]
    model = train_svm(u, v, C = 10, spec = KernelSpec(sigma = 0.5))
    labels, values = svm_predict(model, u)

    assert np.array_equal(labels, v)
    assert values.shape == (60,)
    assert svm_predict(model, [2.0, 2.0])[0] == 1
    assert svm_predict(model, [-2.0, -2.0])[0] == -1
    assert np.all(model.beta <= 10 + 1e-9)


def test_svm_single_class():

    with pytest.raises(ValueError, match = 'Both classes'):

        train_svm([[0.0], [1.0]], [1, 1])

    with pytest.raises(ValueError):

        train_svm([[0.0], [1.0]], [1, 0])


def test_model_archive(tmp_path):

    x = np.linspace(0, 1, 10)[:, None]
    model = train_svr(x, 2 * x.ravel(), spec = KernelSpec(sigma = 1.0))
    path = tmp_path / 'model.json'
    save_model(path, model, config_hash = 'abc', seed = 1)
    back = load_model(path)

    assert type(back) is type(model)
    assert back.kernel == model.kernel
    assert np.allclose(svr_predict(back, x), svr_predict(model, x))

    path.write_text('{"type": "tree"}')

    with pytest.raises(ValueError, match = 'Not a model archive'):

        load_model(path)


def test_svm_dual_against_slsqp(rng):

    u = rng.normal(size = (12, 2))
    v = np.where(u[:, 0] + 0.3 * rng.normal(size = 12) > 0, 1.0, -1.0)
    v[:2] = [1.0, -1.0]
    spec = KernelSpec(sigma = 0.5)
    model = train_svm(u, v, C = 1.0, spec = spec, tol = 1e-7)
    q = np.outer(v, v) * kernel_matrix(spec, u)
    ref = scipy.optimize.minimize(
        lambda a: 0.5 * a @ q @ a - a.sum(),
        np.zeros(12),
        jac = lambda a: q @ a - 1,
        bounds = [(0, 1.0)] * 12,
        constraints = [{'type': 'eq', 'fun': lambda a: v @ a}],
        method = 'SLSQP',
        options = {'ftol': 1e-12, 'maxiter': 1000},
    )

    assert ref.success
    assert model.objective == pytest.approx(-ref.fun, rel = 1e-4)


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_svr_dual_against_slsqp(seed):

    rng = np.random.default_rng(seed)
    m = 14
    x = rng.uniform(0, 3, size = (m, 1))
    y = np.sin(x).ravel() + rng.normal(0, 0.1, size = m)
    eps, penalty = 0.05, 1.0
    spec = KernelSpec(sigma = 1.0)
    model = train_svr(
        x, y,
        eps = eps,
        penalty = penalty,
        spec = spec,
        tol = 1e-8,
    )
    k = kernel_matrix(spec, x)

    def neg_dual(ab):

        coef = ab[:m] - ab[m:]

        return 0.5 * coef @ k @ coef + eps * ab.sum() - y @ coef

    def neg_dual_grad(ab):

        g = k @ (ab[:m] - ab[m:]) - y

        return np.concatenate([g + eps, -g + eps])

    ref = scipy.optimize.minimize(
        neg_dual,
        np.zeros(2 * m),
        jac = neg_dual_grad,
        bounds = [(0, penalty)] * (2 * m),
        constraints = [{
            'type': 'eq',
            'fun': lambda ab: ab[:m].sum() - ab[m:].sum(),
        }],
        method = 'SLSQP',
        options = {'ftol': 1e-12, 'maxiter': 2000},
    )
    coef = ref.x[:m] - ref.x[m:]
    free = (np.abs(coef) > 1e-4) & (np.abs(coef) < penalty - 1e-4)
    fitted = k @ coef

    assert ref.success
    assert model.objective == pytest.approx(-ref.fun, rel = 1e-5)

    if free.any():

        bias = np.mean(
            y[free] - np.sign(coef[free]) * eps - fitted[free],
        )

        assert np.allclose(svr_predict(model, x), fitted + bias, atol = 1e-4)


def test_svr_coefficients_complementary(rng):

    x = rng.uniform(-2, 2, size = (30, 2))
    y = x[:, 0] ** 2 - x[:, 1] + rng.normal(0, 0.2, size = 30)
    alpha, alpha_star, bias, objective = _svr_dual(
        x, y,
        eps = 0.1,
        penalty = 10.0,
        spec = KernelSpec(sigma = 0.5),
        tol = 1e-6,
        max_updates = 1_000_000,
    )
    model = train_svr(x, y, eps = 0.1, penalty = 10.0, spec = KernelSpec(
        sigma = 0.5,
    ), tol = 1e-6)
    fitted = svr_predict(model, x)
    inside = (alpha == 0) & (alpha_star == 0)

    assert np.minimum(alpha, alpha_star).max() <= 1e-9
    assert np.all((alpha >= 0) & (alpha <= 10.0))
    assert np.all((alpha_star >= 0) & (alpha_star <= 10.0))
    assert abs(alpha.sum() - alpha_star.sum()) <= 1e-9
    assert model.objective == pytest.approx(objective)
    assert model.bias == pytest.approx(bias)
    # samples without coefficients lie in the tube
    assert np.all(np.abs(fitted[inside] - y[inside]) <= 0.1 + 1e-5)


def test_svm_xor():

    u = [[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]]
    v = [-1, -1, 1, 1]
    model = train_svm(u, v, C = 1000, spec = KernelSpec(sigma = 1.0))
    labels, values = svm_predict(model, u)

    assert np.array_equal(labels, v)
    assert np.all(np.abs(values) > 0.5)
    assert abs(model.labels @ model.beta) <= 1e-6 * 1000
