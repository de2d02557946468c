import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import brute_dct1, brute_dst1
from smrt_cube import transforms
from smrt_cube.transforms import dct1, dst1, dst1_2d, dst1_3d


def _rel(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300)


def test_dct1_examples():
    assert np.array_equal(dct1(np.zeros(7)), np.zeros(7))
    assert np.allclose(dct1([0.0, 1.0, 0.0]), [1.0, 0.0, -1.0], atol=1e-15)
    N = 17
    k = np.arange(N)
    for l0 in (1, 5, N - 2):
        X = dct1(np.cos(np.pi * l0 * k / (N - 1)))
        assert X[l0] == pytest.approx((N - 1) / 2, rel=1e-13)


def test_dst1_examples():
    s = np.sqrt(0.5)
    assert np.allclose(dst1([1.0, 0.0, 0.0]), [s, 1.0, s], atol=1e-15)
    x = np.array([0.3, -1.2, 2.0])
    assert np.allclose(dst1(dst1(x)), 2 * x, rtol=1e-14)
    assert np.array_equal(dst1(np.zeros(5)), np.zeros(5))


@pytest.mark.parametrize("N", [2, 3, 4, 5, 8, 16, 31, 33, 63, 64])
def test_dct1_matches_brute_force(N):
    rng = np.random.default_rng(N)
    for _ in range(100):
        x = rng.standard_normal(N)
        assert _rel(dct1(x), brute_dct1(x)) <= 1e-10


@pytest.mark.parametrize("N", [1, 2, 3, 5, 7, 15, 31, 32, 63, 64])
def test_dst1_matches_brute_force(N):
    rng = np.random.default_rng(100 + N)
    for _ in range(100):
        x = rng.standard_normal(N)
        assert _rel(dst1(x), brute_dst1(x)) <= 1e-10


@pytest.mark.parametrize("N", [1, 7, 64, 126, 127, 200])
def test_dst1_involution(N):
    x = np.random.default_rng(N).standard_normal(N)
    assert _rel(dst1(dst1(x)), (N + 1) / 2 * x) <= 1e-12


@pytest.mark.parametrize("N, dense", [(126, True), (222, True), (255, False), (127, False)])
def test_dense_and_fft_paths_agree_with_brute_force(N, dense):
    # 2 * (126 + 1) = 2 * 127 has a large prime factor -> dense product
    assert transforms._dense(2 * (N + 1), N) == dense
    x = np.random.default_rng(N).standard_normal(N)
    assert _rel(dst1(x), brute_dst1(x)) <= 1e-10
    assert _rel(dct1(x), brute_dct1(x)) <= 1e-10


def test_dense_path_on_middle_axis():
    N = 126
    a = np.random.default_rng(3).standard_normal((3, N, 4))
    out = dst1(a, axis=1)
    ref = np.stack([np.stack([brute_dst1(a[i, :, j]) for j in range(4)], -1) for i in range(3)])
    assert _rel(out, ref) <= 1e-10


def test_dst1_2d_separable():
    rng = np.random.default_rng(1)
    u, v = rng.standard_normal(9), rng.standard_normal(9)
    assert np.allclose(dst1_2d(np.outer(u, v)), np.outer(dst1(u), dst1(v)), rtol=1e-12, atol=1e-13)
    assert np.array_equal(dst1_2d(np.zeros((4, 4))), np.zeros((4, 4)))


def test_dst1_3d_involution_n5():
    n = 5
    a = np.random.default_rng(2).standard_normal((n - 2,) * 3)
    assert _rel(dst1_3d(dst1_3d(a)), ((n - 1) / 2) ** 3 * a) <= 1e-12
    assert np.array_equal(dst1_3d(np.zeros((3, 3, 3))), np.zeros((3, 3, 3)))


def test_batched_axes_match_single():
    a = np.random.default_rng(4).standard_normal((2, 6, 7, 7))
    out = dst1_2d(a, axes=(-2, -1))
    for i in range(2):
        for j in range(6):
            assert np.allclose(out[i, j], dst1_2d(a[i, j]), rtol=1e-13, atol=1e-13)


def test_deterministic():
    a = np.random.default_rng(5).standard_normal((31, 31, 31))
    assert np.array_equal(dst1_3d(a), dst1_3d(a.copy()))
    b = np.random.default_rng(6).standard_normal((50, 256))
    assert np.array_equal(dct1(b), dct1(b.copy()))


@pytest.mark.parametrize("f", [dct1, dst1])
def test_rejects_non_finite(f):
    with pytest.raises(ValueError):
        f(np.array([1.0, np.nan, 2.0]))
    with pytest.raises(ValueError):
        f(np.array([1.0, np.inf, 2.0]))


def test_dct1_rejects_short():
    with pytest.raises(ValueError):
        dct1([1.0])


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(2, 40), elements=finite), finite, finite)
def test_linearity(x, a, b):
    y = np.roll(x, 1) - 0.5 * x
    scale = max(np.max(np.abs(dst1(a * x))) + np.max(np.abs(dst1(b * y))), 1.0)
    for f in (dct1, dst1):
        lhs = f(a * x + b * y)
        rhs = a * f(x) + b * f(y)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale * len(x)
