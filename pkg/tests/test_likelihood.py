import numpy as np
import pytest

from surrogate_langevin.basis import BasisFamily
from surrogate_langevin.expfam import ExpFamily, LinkFunction
from surrogate_langevin.forward import Darcy1D, LinearPhi
from surrogate_langevin.likelihood import Dataset, ModelInstance, generate_data


def glm_model(n=200, p=3, family="gaussian", link="canonical", seed=0, theta0=None):
    basis = BasisFamily("cosine-with-constant", p)
    if theta0 is None:
        theta0 = 0.5 * np.arange(1, p + 1, dtype=float) ** -2
    fam, lk = ExpFamily(family), LinkFunction(link)
    ds = generate_data(basis, theta0, n, seed, family=fam, link=lk)
    return ModelInstance(ds, basis, fam, lk, LinearPhi(basis)), theta0


def density_model(n=500, p=4, seed=0, theta0=None):
    basis = BasisFamily("cosine-centered", p)
    if theta0 is None:
        theta0 = 0.4 * np.arange(1, p + 1, dtype=float) ** -2
    ds = generate_data(basis, theta0, n, seed, kind="density")
    return ModelInstance(ds, basis, None, None, None), theta0


def darcy_model(n=100, p=3, seed=0, M=64):
    basis = BasisFamily("dirichlet-sine", p)
    theta0 = 0.4 * np.arange(1, p + 1, dtype=float) ** -2
    fam, lk = ExpFamily("gaussian"), LinkFunction("canonical")
    op = Darcy1D(basis, M=M)
    ds = generate_data(basis, theta0, n, seed, family=fam, link=lk, forward=op)
    return ModelInstance(ds, basis, fam, lk, op), theta0


# -- data generation ----------------------------------------------------------

def test_generate_gaussian_zero_truth():
    basis = BasisFamily("cosine-with-constant", 2)
    ds = generate_data(basis, np.zeros(2), 50_000, 1,
                       family=ExpFamily("gaussian"), link=LinkFunction("canonical"))
    assert abs(ds.y.mean()) < 3.0 / np.sqrt(50_000)


def test_generate_poisson_constant_mean():
    basis = BasisFamily("cosine-with-constant", 1)
    ds = generate_data(basis, np.array([0.5]), 50_000, 2,
                       family=ExpFamily("poisson"), link=LinkFunction("canonical"))
    mean = np.exp(0.5)
    sigma = np.sqrt(mean / 50_000)
    assert abs(ds.y.mean() - mean) < 3 * sigma


def test_generate_density_uniform_ks():
    basis = BasisFamily("cosine-centered", 3)
    ds = generate_data(basis, np.zeros(3), 10_000, 3, kind="density")
    xs = np.sort(ds.x)
    ks = np.max(np.abs(xs - (np.arange(1, 10_001)) / 10_000.0))
    assert ks < 1.63 / np.sqrt(10_000)  # 1% critical value


def test_generate_poisson_overflow_error():
    basis = BasisFamily("cosine-with-constant", 1)
    with pytest.raises(ValueError):
        generate_data(basis, np.array([800.0]), 10, 0,
                      family=ExpFamily("poisson"), link=LinkFunction("canonical"))


def test_generate_determinism():
    basis = BasisFamily("cosine-with-constant", 2)
    a = generate_data(basis, np.array([0.5, 0.1]), 100, 9,
                      family=ExpFamily("bernoulli"), link=LinkFunction("canonical"))
    b = generate_data(basis, np.array([0.5, 0.1]), 100, 9,
                      family=ExpFamily("bernoulli"), link=LinkFunction("canonical"))
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.y, b.y)


def test_dataset_save_load_roundtrip(tmp_path):
    model, theta0 = glm_model(n=20)
    path = tmp_path / "data.csv"
    model.dataset.save(path)
    loaded = Dataset.load(path)
    np.testing.assert_array_equal(loaded.x, model.dataset.x)
    np.testing.assert_array_equal(loaded.y, model.dataset.y)
    np.testing.assert_array_equal(loaded.truth_theta0, theta0)


# -- log-likelihood values ----------------------------------------------------

def test_gaussian_single_datum_maximum():
    basis = BasisFamily("cosine-with-constant", 1)
    y = 1.7
    ds = Dataset("regression", np.array([0.3]), np.array([y]), 1)
    model = ModelInstance(ds, basis, ExpFamily("gaussian"), LinkFunction("canonical"),
                          LinearPhi(basis))
    assert model.log_lik(np.array([y])) == pytest.approx(y ** 2 / 2.0, abs=1e-12)


def test_density_loglik_zero_theta():
    model, _ = density_model()
    assert model.log_lik(np.zeros(4)) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("builder", [glm_model, density_model])
def test_gradient_theorem_line_integral(builder):
    model, theta0 = builder()
    rng = np.random.default_rng(5)
    p = theta0.size
    a = theta0 + 0.1 * rng.standard_normal(p)
    b = theta0 + 0.1 * rng.standard_normal(p)
    # 20-point Gauss-Legendre along the segment
    z, w = np.polynomial.legendre.leggauss(20)
    ts = 0.5 * (z + 1.0)
    integral = 0.0
    for t, wt in zip(ts, w):
        integral += 0.5 * wt * float(model.grad_log_lik(a + t * (b - a)) @ (b - a))
    diff = model.log_lik(b) - model.log_lik(a)
    assert integral == pytest.approx(diff, rel=1e-6)


# -- gradients ----------------------------------------------------------------

@pytest.mark.parametrize("builder", [
    glm_model,
    lambda: glm_model(family="poisson"),
    lambda: glm_model(family="bernoulli"),
    lambda: glm_model(family="gaussian", link="cube",
                      theta0=np.array([2.0, 0.3, 0.1])),
    density_model,
])
def test_grad_matches_fd(builder):
    model, theta0 = builder()
    rng = np.random.default_rng(11)
    p = theta0.size
    for _ in range(20):
        theta = theta0 + 0.05 * rng.standard_normal(p)
        g = model.grad_log_lik(theta)
        eps = 1e-6
        fd = np.empty(p)
        for k in range(p):
            e = np.zeros(p)
            e[k] = eps
            fd[k] = (model.log_lik(theta + e) - model.log_lik(theta - e)) / (2 * eps)
        assert np.max(np.abs(g - fd)) <= 1e-5 * max(np.max(np.abs(fd)), 1.0)


def test_density_grad_at_zero():
    model, _ = density_model()
    g = model.grad_log_lik(np.zeros(4))
    expected = model.basis.design_matrix(model.dataset.x).sum(axis=0)
    np.testing.assert_allclose(g, expected, atol=1e-8)


def test_grad_vanishes_at_ascent_maximum():
    model, theta0 = glm_model(n=500)
    from surrogate_langevin.initializers import pilot_ascent_init
    from surrogate_langevin.prior import SievePrior

    # flat-prior surrogate: use a very weak prior so the mode is near the MLE
    prior = SievePrior(1.0, 1, 3)
    theta, _ = pilot_ascent_init(model, prior, steps=4000)
    assert np.linalg.norm(model.grad_log_lik(theta) + prior.grad_log_density(theta)) <= 1e-6


# -- directional Hessians -----------------------------------------------------

def test_gaussian_hess_closed_form():
    model, theta0 = glm_model()
    rng = np.random.default_rng(13)
    E = model.basis.design_matrix(model.dataset.x)
    for _ in range(5):
        theta = theta0 + 0.1 * rng.standard_normal(3)
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        expected = -float(np.sum((E @ v) ** 2))
        assert model.hess_dir(theta, v) == pytest.approx(expected, rel=1e-10)
        assert model.hess_dir(theta, v) <= 0


def test_density_hess_unit_direction_at_zero():
    model, _ = density_model(n=700)
    for k in range(4):
        v = np.zeros(4)
        v[k] = 1.0
        assert model.hess_dir(np.zeros(4), v) == pytest.approx(-700.0, rel=1e-8)


@pytest.mark.parametrize("builder", [
    lambda: glm_model(family="poisson"),
    lambda: glm_model(family="gaussian", link="cube",
                      theta0=np.array([2.0, 0.3, 0.1])),
    density_model,
])
def test_hess_dir_matches_fd(builder):
    model, theta0 = builder()
    rng = np.random.default_rng(17)
    p = theta0.size
    for _ in range(20):
        theta = theta0 + 0.05 * rng.standard_normal(p)
        v = rng.standard_normal(p)
        v /= np.linalg.norm(v)
        eps = 1e-4
        fd = (model.log_lik(theta + eps * v) - 2 * model.log_lik(theta)
              + model.log_lik(theta - eps * v)) / eps ** 2
        assert model.hess_dir(theta, v) == pytest.approx(fd, rel=1e-4, abs=1e-6)


def test_hess_dir_many_matches_loop():
    model, theta0 = glm_model(family="poisson")
    rng = np.random.default_rng(19)
    V = rng.standard_normal((3, 8))
    vals = model.hess_dir_many(theta0, V)
    for j in range(8):
        assert vals[j] == pytest.approx(model.hess_dir(theta0, V[:, j]), rel=1e-10)


def test_hess_matrix_polarization():
    model, theta0 = glm_model(family="bernoulli")
    H = model.hess_matrix(theta0)
    rng = np.random.default_rng(23)
    for _ in range(5):
        v = rng.standard_normal(3)
        assert float(v @ H @ v) == pytest.approx(model.hess_dir(theta0, v), rel=1e-8)


def test_density_hessian_negative_semidefinite():
    model, theta0 = density_model()
    rng = np.random.default_rng(29)
    for _ in range(50):
        theta = theta0 + 0.3 * rng.standard_normal(4)
        v = rng.standard_normal(4)
        assert model.hess_dir(theta, v) <= 1e-10


def test_canonical_linear_concavity():
    for family in ("gaussian", "poisson", "bernoulli"):
        model, theta0 = glm_model(family=family)
        rng = np.random.default_rng(31)
        for _ in range(30):
            theta = theta0 + 0.3 * rng.standard_normal(3)
            v = rng.standard_normal(3)
            assert model.hess_dir(theta, v) <= 1e-10


def test_poisson_lipschitz_growth():
    model, _ = glm_model(family="poisson", n=300, theta0=np.array([0.2, 0.1, 0.05]))
    probe0 = model.curvature_probe(np.zeros(3), 0.25, 50, 7)
    center3 = np.array([3.0, 0.0, 0.0])
    probe3 = model.curvature_probe(center3, 0.25, 50, 7)
    assert probe3.lambda_max_est >= 5.0 * probe0.lambda_max_est


# -- curvature probe ----------------------------------------------------------

def test_probe_positive_curvature_gaussian():
    model, theta0 = glm_model(n=1000, p=4, theta0=0.5 * np.arange(1, 5.0) ** -2)
    probe = model.curvature_probe(theta0, 0.5, 100, 0)
    assert probe.lambda_min_est > 0
    assert probe.lambda_min_est <= probe.lambda_max_est
    assert np.isfinite(probe.grad_norm_at_center)


def test_probe_density_scale():
    model, theta0 = density_model(n=1000)
    probe = model.curvature_probe(np.zeros(4), 0.1, 50, 1)
    assert 0.5 * 1000 <= probe.lambda_min_est
    assert probe.lambda_max_est <= 2.0 * 1000


def test_probe_zero_data():
    basis = BasisFamily("cosine-with-constant", 2)
    ds = Dataset("regression", np.zeros(0), np.zeros(0), 0)
    model = ModelInstance(ds, basis, ExpFamily("gaussian"), LinkFunction("canonical"),
                          LinearPhi(basis))
    probe = model.curvature_probe(np.zeros(2), 0.5, 10, 0)
    assert probe.lambda_min_est == probe.lambda_max_est == probe.grad_norm_at_center == 0.0


# -- darcy regression end to end ---------------------------------------------

def test_darcy_grad_and_hess_fd():
    model, theta0 = darcy_model()
    rng = np.random.default_rng(37)
    for _ in range(5):
        theta = theta0 + 0.05 * rng.standard_normal(3)
        g = model.grad_log_lik(theta)
        eps = 1e-6
        fd = np.empty(3)
        for k in range(3):
            e = np.zeros(3)
            e[k] = eps
            fd[k] = (model.log_lik(theta + e) - model.log_lik(theta - e)) / (2 * eps)
        np.testing.assert_allclose(g, fd, rtol=2e-5, atol=1e-6)


def test_loglik_minus_inf_sentinel():
    model, _ = glm_model(family="poisson", n=50)
    val = model.log_lik(np.array([900.0, 0.0, 0.0]))
    assert val == -np.inf
