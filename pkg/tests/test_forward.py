import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from oracles import monte_carlo_cap_area
from smrt_cube.core import GridSpec
from smrt_cube.forward import (
    Ball,
    Phantom,
    ProjectionSet,
    add_noise,
    bump_phantom,
    cap_area,
    detector_positions,
    eight_ball_phantom,
    project_phantom,
    read_phantom,
    shell_integral,
    write_phantom,
)


def test_cap_area_examples():
    assert cap_area(2.0, 0.5, 0.6) == 0.0
    assert cap_area(0.1, 0.2, 0.6) == pytest.approx(4 * math.pi * 0.04, rel=1e-15)
    assert cap_area(0.1, 0.2, 0.6) == pytest.approx(0.5026548, abs=5e-8)
    assert cap_area(1.0, 0.5, 0.6) == pytest.approx(math.pi * 0.5 * 0.11, rel=1e-14)
    assert cap_area(1.0, 0.5, 0.6) == pytest.approx(0.1727876, abs=5e-8)
    # ball strictly inside the sphere
    assert cap_area(0.1, 1.0, 0.2) == 0.0


@pytest.mark.parametrize("d, r, rho", [(1.0, 0.5, 0.6), (0.3, 0.4, 0.2), (0.5, 0.45, 0.1), (0.05, 0.3, 0.3)])
def test_cap_area_monte_carlo(d, r, rho):
    exact = cap_area(d, r, rho)
    mc = monte_carlo_cap_area(d, r, rho)
    assert mc == pytest.approx(exact, rel=5e-3)


def test_cap_area_continuous_at_breakpoints():
    rho, d = 0.3, 0.5
    for r in (d - rho, d + rho):
        assert cap_area(d, r - 1e-9, rho) == pytest.approx(cap_area(d, r + 1e-9, rho), abs=1e-7)
    d = 0.1
    r = rho - d
    assert cap_area(d, r - 1e-9, rho) == pytest.approx(cap_area(d, r + 1e-9, rho), rel=1e-6)


def test_shell_integral_indicator_is_cap_area():
    b = Ball((0, 0, 0), 0.3, 2.5)
    d = np.array([0.0, 0.1, 0.4, 0.7])
    r = np.array([0.2, 0.3, 0.25, 0.5])
    assert np.allclose(shell_integral(b, d, r), 2.5 * cap_area(d, r, 0.3), rtol=1e-14)


@pytest.mark.parametrize("order", [0, 1, 2, 4])
def test_shell_integral_integrates_to_ball_mass(order):
    b = Ball((0.0, 0.0, 0.0), 0.2, 1.7, order)
    r = np.linspace(0, 2.0, 400_001)
    for d in (0.0, 0.05, 0.6):
        total = trapezoid(shell_integral(b, d, r), r)
        # the indicator jumps at r = rho - d, so the rule is only first order there
        assert total == pytest.approx(b.integral(), rel=1e-4 if order == 0 else 1e-8)


def test_ball_integral_closed_form():
    assert Ball((0, 0, 0), 0.1).integral() == pytest.approx(4 / 3 * math.pi * 1e-3, rel=1e-15)


def test_ball_rejects_bad_input():
    with pytest.raises(ValueError):
        Ball((0, 0, 0), 0.0)
    with pytest.raises(ValueError):
        Ball((0, 0), 0.1)
    with pytest.raises(ValueError):
        Ball((0, 0, 0), 0.1, 1.0, -1)


def test_empty_phantom_gives_zero():
    g = GridSpec(9)
    p = project_phantom(Phantom(()), g)
    assert p.data.shape == (6, 7, 7, g.n1)
    assert not p.data.any()


def test_single_ball_shell_identity():
    g = GridSpec(33)
    b = Ball((0.5, 0.5, 0.5), 0.1, 1.0)
    p = project_phantom(Phantom((b,)), g)
    totals = trapezoid(p.data, dx=g.dr, axis=-1)
    assert np.allclose(totals, 4.18879e-3, rtol=1e-2)
    assert np.allclose(totals, b.integral(), rtol=1e-2)


def test_eight_ball_shell_identity_and_support():
    g = GridSpec(33)
    ph = eight_ball_phantom()
    p = project_phantom(ph, g)
    mass = sum(b.integral() for b in ph.balls)
    assert np.allclose(trapezoid(p.data, dx=g.dr, axis=-1), mass, rtol=1e-2)
    assert np.all(p.data[..., 0] == 0)
    assert np.all(p.data >= 0)
    r = g.radii()
    for j in range(6):
        z = detector_positions(g, j)
        reach = np.max(
            [np.linalg.norm(z - np.array(b.center), axis=-1) + b.radius for b in ph.balls], axis=0
        )
        beyond = r[None, None, :] > reach[..., None]
        assert not p.data[j][beyond].any()


def test_eight_ball_phantom_description():
    ph = eight_ball_phantom()
    radii = [b.radius for b in ph.balls]
    assert len(ph.balls) == 8
    assert min(radii) == 0.06 and max(radii) == 0.13
    assert all(b.amplitude == 1.0 and b.center[2] == 0.5 for b in ph.balls)


def test_n129_sample_count():
    g = GridSpec(129)
    detectors = 6 * g.n_interior**2
    assert detectors == 96774  # about 97 thousand
    assert detectors * g.n1 == 6 * 127**2 * 223


def test_linearity_exact():
    g = GridSpec(9)
    a = Phantom((Ball((0.3, 0.4, 0.5), 0.1),))
    b = Phantom((Ball((0.6, 0.5, 0.4), 0.2, 0.5),))
    pa, pb, pab = (project_phantom(x, g) for x in (a, b, a + b))
    assert np.array_equal(pab.data, pa.data + pb.data)


def test_swap_symmetry_exact():
    # each ball is itself invariant under x1 <-> x2
    ph = Phantom((Ball((0.4, 0.4, 0.3), 0.15), Ball((0.6, 0.6, 0.7), 0.1, 2.0, 2)))
    p = project_phantom(ph, GridSpec(17)).data
    assert np.array_equal(p[0], p[2])
    assert np.array_equal(p[1], p[3])
    for j in (4, 5):
        assert np.array_equal(p[j], p[j].transpose(1, 0, 2))


def test_cube_origin_shift():
    g = GridSpec(9, 0.5)
    ph = Phantom((Ball((0.45, 0.5, 0.55), 0.1),))
    shift = (0.2, 0.25, 0.3)
    a = project_phantom(ph, g, shift)
    b = project_phantom(ph.shifted(tuple(-s for s in shift)), g)
    assert np.allclose(a.data, b.data, rtol=1e-12, atol=1e-15)
    assert np.allclose(detector_positions(g, 0, shift)[..., 0], 0.7)


def test_noise_calibration():
    p = project_phantom(eight_ball_phantom(), GridSpec(17))
    noisy = add_noise(p, 0.15, seed=3)
    ratio = np.linalg.norm(noisy.data - p.data) / np.linalg.norm(p.data)
    assert ratio == pytest.approx(0.15, abs=1e-12)
    assert np.array_equal(noisy.data, add_noise(p, 0.15, seed=3).data)
    assert not np.array_equal(noisy.data, add_noise(p, 0.15, seed=4).data)
    assert np.array_equal(add_noise(p, 0.0).data, p.data)
    assert np.all(noisy.data[..., 0] == 0)
    with pytest.raises(ValueError):
        add_noise(p, -0.1)


def test_projection_set_shape_check():
    with pytest.raises(ValueError):
        ProjectionSet(GridSpec(9), np.zeros((6, 7, 7, 3)))


def test_sample_indicator_and_bump():
    g = GridSpec(9)
    v = Phantom((Ball((0.5, 0.5, 0.5), 0.2),)).sample(g)
    assert v[4, 4, 4] == 1.0 and v[0, 0, 0] == 0.0
    bump = bump_phantom(center=(0.5, 0.5, 0.5)).sample(g)
    assert bump[4, 4, 4] == pytest.approx(1.0) and bump.max() <= 1.0


def test_phantom_file_round_trip(tmp_path):
    ph = eight_ball_phantom() + bump_phantom()
    path = tmp_path / "ph.txt"
    write_phantom(path, ph)
    assert read_phantom(path) == ph


def test_phantom_file_parsing(tmp_path):
    path = tmp_path / "ph.txt"
    path.write_text("# comment\n\n0.5 0.5 0.5 0.1 1.0\n  0.2 0.3 0.4 0.05 -2\n")
    ph = read_phantom(path)
    assert ph.balls[1] == Ball((0.2, 0.3, 0.4), 0.05, -2.0)
    path.write_text("0.5 0.5 0.1 1.0\n")
    with pytest.raises(ValueError, match=":1:"):
        read_phantom(path)
    path.write_text("0.5 0.5 0.5 abc 1.0\n")
    with pytest.raises(ValueError):
        read_phantom(path)
