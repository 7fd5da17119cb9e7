import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from aestruct.tensor import (
    SingularMetricError, TensorValue, ValenceError, antisymmetry_residual, contract, lower_index, raise_index,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def random_metric(rng, n, signature=None):
    """Nondegenerate symmetric matrix of the requested signature."""
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    signs = np.ones(n) if signature is None else np.array(signature, float)
    d = signs * rng.uniform(0.5, 2.0, n)
    return q @ np.diag(d) @ q.T


@pytest.mark.parametrize("valence, shape", [("", ()), ("u", (3,)), ("ul", (2, 2)), ("ull", (4, 4, 4))])
def test_construction(valence, shape):
    t = TensorValue(valence, np.zeros(shape))
    assert t.rank == len(valence)
    assert t.dim == (shape[0] if shape else 0)


@pytest.mark.parametrize("valence, shape", [("ux", (2, 2)), ("ul", (2,)), ("ul", (2, 3)), ("u", (2, 2))])
def test_construction_rejects(valence, shape):
    with pytest.raises(ValenceError):
        TensorValue(valence, np.zeros(shape))


def test_data_read_only_and_copied():
    src = np.eye(2)
    t = TensorValue("ul", src)
    src[0, 0] = 5.0
    assert t[0, 0] == 1.0
    with pytest.raises(ValueError):
        t.data[0, 0] = 2.0


def test_index_count_checked():
    t = TensorValue("ull", np.arange(8.0).reshape(2, 2, 2))
    assert t[1, 0, 1] == 5.0
    with pytest.raises(ValenceError):
        t[1, 0]


def test_contract_trace():
    a = np.arange(9.0).reshape(3, 3)
    assert contract(TensorValue("ul", a), 0, 1).scalar() == np.trace(a)


def test_contract_partial():
    data = np.random.default_rng(1).normal(size=(3, 3, 3))
    out = contract(TensorValue("ull", data), 0, 2)
    assert out.valence == "l"
    np.testing.assert_allclose(out.data, np.einsum("kik->i", data))


@pytest.mark.parametrize("valence, a, b", [("uu", 0, 1), ("ll", 0, 1), ("ul", 0, 0), ("ul", 0, 2)])
def test_contract_rejects(valence, a, b):
    with pytest.raises(ValenceError):
        contract(TensorValue(valence, np.eye(2)), a, b)


def test_lower_raise_by_hand():
    g = np.array([[2.0, 1.0], [1.0, 3.0]])
    v = np.array([1.0, -1.0])
    low = lower_index(TensorValue("u", v), 0, TensorValue("ll", g))
    np.testing.assert_allclose(low.data, [1.0, -2.0])
    back = raise_index(low, 0, TensorValue("uu", np.linalg.inv(g)))
    np.testing.assert_allclose(back.data, v)


def test_lower_middle_slot():
    rng = np.random.default_rng(2)
    g = random_metric(rng, 3)
    a = rng.normal(size=(3, 3, 3))
    out = lower_index(TensorValue("lul", a), 1, TensorValue("ll", g))
    assert out.valence == "lll"
    np.testing.assert_allclose(out.data, np.einsum("jm,imk->ijk", g, a))


def test_lower_raise_errors():
    g = TensorValue("ll", np.eye(2))
    with pytest.raises(ValenceError):
        lower_index(TensorValue("l", [1.0, 2.0]), 0, g)
    with pytest.raises(ValenceError):
        lower_index(TensorValue("u", [1.0, 2.0]), 0, TensorValue("uu", np.eye(2)))
    with pytest.raises(SingularMetricError):
        lower_index(TensorValue("u", [1.0, 2.0]), 0, TensorValue("ll", [[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(ValenceError):
        raise_index(TensorValue("u", [1.0, 2.0]), 0, TensorValue("uu", np.eye(2)))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1), st.sampled_from(["ull", "uul", "luu", "ulu"]))
def test_raise_after_lower_is_identity(n, seed, valence):
    rng = np.random.default_rng(seed)
    signature = rng.choice([-1.0, 1.0], n)
    g = random_metric(rng, n, signature)
    t = TensorValue(valence, rng.normal(size=(n,) * len(valence)))
    for slot, c in enumerate(valence):
        if c != "u":
            continue
        low = lower_index(t, slot, TensorValue("ll", g))
        back = raise_index(low, slot, TensorValue("uu", np.linalg.inv(g)))
        np.testing.assert_allclose(back.data, t.data, atol=1e-9 * max(1.0, np.abs(t.data).max()))


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (3, 3, 3), elements=finite))
def test_antisymmetrized_tensor_has_zero_residual(a):
    skew = (a - a.transpose(1, 0, 2) - a.transpose(2, 1, 0) - a.transpose(0, 2, 1)
            + a.transpose(1, 2, 0) + a.transpose(2, 0, 1))
    assert antisymmetry_residual(TensorValue("lll", skew)) < 1e-12 * max(1.0, np.abs(skew).max())


def test_antisymmetry_residual_detects():
    a = np.zeros((2, 2, 2))
    a[0, 0, 1] = 1.0
    assert antisymmetry_residual(TensorValue("lll", a)) == 2.0
    with pytest.raises(ValenceError):
        antisymmetry_residual(TensorValue("ull", a))


def test_allclose():
    a = TensorValue("ul", np.eye(2))
    assert a.allclose(TensorValue("ul", np.eye(2) + 1e-12))
    assert not a.allclose(TensorValue("lu", np.eye(2)))
    assert not a.allclose(TensorValue("ul", 2 * np.eye(2)))
