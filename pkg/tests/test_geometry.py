import numpy as np
import pytest

from hankelgd import make_geometry


@pytest.mark.parametrize(
    "n,n1,n2,weights",
    [
        (3, 2, 2, [1, 2, 1]),
        (4, 2, 3, [1, 2, 2, 1]),
        (5, 3, 3, [1, 2, 3, 2, 1]),
        (1, 1, 1, [1]),
        (2, 1, 2, [1, 1]),
    ],
)
def test_small_geometries(n, n1, n2, weights):
    g = make_geometry(n)
    assert (g.n1, g.n2, g.n) == (n1, n2, n)
    np.testing.assert_array_equal(g.weights, weights)


def test_split_rule():
    for n in range(1, 300):
        g = make_geometry(n)
        if n % 2:
            assert g.n1 == g.n2 == (n + 1) // 2
        else:
            assert g.n1 == n // 2 and g.n2 == n // 2 + 1


def test_weight_identities_all_lengths():
    for n in range(1, 2049):
        g = make_geometry(n)
        assert g.n == g.n1 + g.n2 - 1
        i = np.arange(1, n + 1)
        expected = np.minimum.reduce(
            [i, np.full(n, g.n1), np.full(n, g.n2), n - i + 1]
        )
        np.testing.assert_array_equal(g.weights, expected)
        np.testing.assert_array_equal(g.weights, g.weights[::-1])
        assert g.weights.max() == min(g.n1, g.n2)
        assert g.weights.sum() == g.n1 * g.n2
        assert g.weights.min() >= 1


def test_reweight_examples():
    g = make_geometry(3)
    np.testing.assert_allclose(
        g.reweight(np.ones(3)), [1.0, np.sqrt(2.0), 1.0], rtol=0, atol=0
    )
    np.testing.assert_allclose(
        g.unweight(np.array([1.0, np.sqrt(2.0), 1.0])), np.ones(3)
    )
    g5 = make_geometry(5)
    e3 = np.zeros(5)
    e3[2] = 1.0
    np.testing.assert_allclose(g5.reweight(e3), np.sqrt(3.0) * e3)


def test_reweight_round_trip():
    rng = np.random.default_rng(0)
    for n in (1, 2, 17, 64, 255):
        g = make_geometry(n)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        np.testing.assert_allclose(g.unweight(g.reweight(x)), x, rtol=1e-15)


def test_aspect_constant():
    g = make_geometry(125)
    assert g.aspect_constant == pytest.approx(125 / 63)
    assert 1.0 <= g.aspect_constant <= 2.0


def test_invalid_inputs():
    with pytest.raises(ValueError):
        make_geometry(0)
    g = make_geometry(5)
    with pytest.raises(ValueError):
        g.reweight(np.ones(4))
