import numpy as np
import pytest

from aestruct import kernels
from aestruct._jit import NUMBA_AVAILABLE
from aestruct.catalog import catalog_spec
from aestruct.structure import evaluate_fields, sample_points

pytestmark = pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba not importable")


@pytest.fixture
def backend():
    previous = kernels.get_backend()
    yield
    kernels.set_backend(previous)


def both(func, *args):
    kernels.set_backend("numpy")
    a = func(*args)
    kernels.set_backend("numba")
    b = func(*args)
    return a, b


def random_inputs(seed, P=7, n=4):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(P, n, n))
    g = g @ g.transpose(0, 2, 1) + n * np.eye(n)
    dg = rng.normal(size=(P, n, n, n))
    dg = dg + dg.transpose(0, 1, 3, 2)
    return (g, np.linalg.inv(g), dg, rng.normal(size=(P, n, n)), rng.normal(size=(P, n, n, n)),
            rng.normal(size=(P, n, n, n)))


@pytest.mark.parametrize("seed", range(4))
def test_backends_agree(backend, seed):
    g, g_inv, dg, J, dJ, gamma = random_inputs(seed)
    for func, args in [
        (kernels.levi_civita, (g_inv, dg)),
        (kernels.covariant_derivative_j, (gamma, J, dJ)),
        (kernels.covariant_derivative_g, (gamma, g, dg)),
        (kernels.nabla_j_combination, (dJ, J, 0.5, -1.0, 2.0)),
        (kernels.nijenhuis_bracket, (J, dJ)),
    ]:
        a, b = both(func, *args)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("name", ["norden2d", "hermitian4d", "para4d"])
def test_backends_agree_on_catalog(backend, name):
    spec = catalog_spec(name)
    g, dg, J, dJ, _ = evaluate_fields(spec, sample_points(spec, 16))
    g_inv = np.linalg.inv(g)
    a, b = both(kernels.levi_civita, g_inv, dg)
    np.testing.assert_allclose(a, b, atol=1e-13)
    Da, Db = both(kernels.covariant_derivative_j, a, J, dJ)
    np.testing.assert_allclose(Da, Db, atol=1e-13)
    na, nb = both(kernels.nijenhuis_bracket, J, dJ)
    np.testing.assert_allclose(na, nb, atol=1e-13)


def test_levi_civita_is_metric(backend):
    g, g_inv, dg, *_ = random_inputs(9)
    for name in kernels.BACKENDS:
        kernels.set_backend(name)
        gamma = kernels.levi_civita(g_inv, dg)
        assert np.max(np.abs(kernels.covariant_derivative_g(gamma, g, dg))) < 1e-10


def test_non_contiguous_inputs(backend):
    g, g_inv, dg, J, dJ, _ = random_inputs(5)
    a, b = both(kernels.nijenhuis_bracket, J.transpose(0, 2, 1), dJ[:, ::-1])
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_set_backend_validates(backend):
    with pytest.raises(ValueError):
        kernels.set_backend("cuda")
    prev = kernels.set_backend("numpy")
    assert kernels.set_backend(prev) == "numpy"
