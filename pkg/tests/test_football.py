import math

import numpy as np
import pytest

from conesolitons.errors import ClosureResidualTooLarge, DegenerateTangency
from conesolitons.football import football_profile, positive_roots, psi, psi_inverse, solve_angles, verify_orbit
from conesolitons.soliton import SolitonSpec, classify

DEG = math.pi / 180


def _dense_scan_roots(k):
    y = np.linspace(1e-9, 20.0, 2_000_001)
    g = y - k * np.exp(y - 1)
    idx = np.nonzero(np.sign(g[:-1]) != np.sign(g[1:]))[0]
    return y[idx]


def test_positive_roots_exact_case():
    y1, y2 = positive_roots(2 / math.e)
    assert y2 == pytest.approx(2.0, abs=1e-13)
    assert 0 < y1 < 1
    assert abs(y1 - (2 / math.e) * math.exp(y1 - 1)) < 1e-12


def test_positive_roots_vs_scan():
    y1, y2 = positive_roots(0.5)
    scan = _dense_scan_roots(0.5)
    assert len(scan) == 2
    assert y1 == pytest.approx(scan[0], abs=2e-5)
    assert y2 == pytest.approx(scan[1], abs=2e-5)
    for y in (y1, y2):
        assert abs(y - 0.5 * math.exp(y - 1)) <= 1e-12


def test_roots_merge_near_one():
    y1, y2 = positive_roots(1 - 1e-8)
    assert abs(y1 - 1) < 1e-3 and abs(y2 - 1) < 1e-3


@pytest.mark.parametrize("k", [1.0, 1.5, 0.0, -0.2])
def test_degenerate(k):
    with pytest.raises(DegenerateTangency):
        positive_roots(k)


def test_psi_limits_and_monotone():
    assert psi(1 - 1e-10) == pytest.approx(1.0, abs=1e-4)
    assert psi(1e-12) < 0.1
    ks = np.linspace(0.01, 0.99, 99)
    vals = np.array([psi(k) for k in ks])
    assert np.all(np.diff(vals) > 0)
    y1, _ = positive_roots(2 / math.e)
    assert psi(2 / math.e) == pytest.approx(1 - y1, abs=1e-13)


def test_psi_inverse_round_trip():
    for ratio in (0.1, 0.5, 0.9):
        assert psi(psi_inverse(ratio)) == pytest.approx(ratio, abs=1e-10)


def test_solve_figure_angles():
    sol = solve_angles(108 * DEG, 183.38 * DEG)
    assert sol.a == pytest.approx(1.0, abs=2e-3)
    assert sol.A == pytest.approx(4.56, abs=0.02)
    # The solved constant satisfies both angle relations alpha_i = pi p_i / a.
    assert math.pi * sol.p / sol.a == pytest.approx(sol.alpha1, rel=1e-9)
    assert math.pi * sol.q / sol.a == pytest.approx(sol.alpha2, rel=1e-5)
    assert verify_orbit(sol) < 1e-6


def test_equal_angles_spherical():
    sol = solve_angles(90 * DEG, 90 * DEG)
    assert sol.spherical and sol.a == 0.0
    assert verify_orbit(sol) == 0.0
    h = sol.profile_fn()
    # h = c sin(r / sqrt 2) with tip slope alpha / 2 pi.
    d = 1e-6
    assert (h(d) - h(0)) / d == pytest.approx(0.25, rel=1e-6)
    p = football_profile(sol, 257)
    assert p.grid[-1] == pytest.approx(math.pi * math.sqrt(2))


def test_ninety_two_seventy():
    sol = solve_angles(90 * DEG, 270 * DEG)
    assert sol.closure_residual < 1e-6
    assert verify_orbit(sol) < 1e-6


def test_perturbed_a_detected():
    sol = solve_angles(108 * DEG, 183.38 * DEG)
    assert verify_orbit(sol, a=sol.a * 1.01) > 1e-3


def test_symmetric_input_order():
    s1 = solve_angles(108 * DEG, 183.38 * DEG)
    s2 = solve_angles(183.38 * DEG, 108 * DEG)
    assert s1.a == s2.a and s1.A == s2.A


@pytest.mark.parametrize("a1,a2", [(108, 183.38), (90, 270), (30, 50), (200, 300)])
def test_round_trip_classify(a1, a2):
    sol = solve_angles(a1 * DEG, a2 * DEG)
    fam = classify(SolitonSpec(-1, sol.a, sol.alpha1 / (2 * math.pi)))
    assert fam.name == "Football"
    assert math.degrees(fam.angle("alpha1")) == pytest.approx(a1, abs=0.05)
    assert math.degrees(fam.angle("alpha2")) == pytest.approx(a2, abs=0.05)


def test_closure_tolerance_enforced():
    with pytest.raises(ClosureResidualTooLarge):
        solve_angles(108 * DEG, 183.38 * DEG, tol=1e-3, closure_tol=1e-14)


def test_bad_angles():
    with pytest.raises(ValueError):
        solve_angles(-1.0, 2.0)
