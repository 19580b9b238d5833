import math

import numpy as np
import pytest

from conesolitons.errors import BetaOutOfRange, GridTooCoarse, NonIntegrableFactor, NonPositiveProfile, NotEmbeddable, NoTip
from conesolitons.geometry import (
    Admissibility,
    ConeKind,
    ConformalProfile,
    ConicEuler,
    RadialProfile,
    canonical_cone_metric,
    cigar_profile,
    cone_angles,
    conformal_to_polar,
    conic_euler,
    curvature,
    embed_profile,
    flat_cone_profile,
    gauss_bonnet,
    sampled,
    sphere_profile,
    troyanov_admissible,
)
from conesolitons.soliton import SolitonSpec, integrate, orbit, trajectory_profile

TWO_PI = 2 * math.pi


def test_profile_invariants():
    with pytest.raises(ValueError):
        RadialProfile([0.0, 0.0, 1.0], [0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        RadialProfile([0.0, 1.0, 2.0], [0.5, 1.0, 2.0], angle0=1.0)


@pytest.mark.parametrize("closed", [True, False])
def test_sphere_curvature_is_one(closed):
    p = sphere_profile(2001)
    K = curvature(p if closed else sampled(p))
    tol = 1e-12 if closed else 1e-5
    assert np.max(np.abs(K - 1.0)) < tol


def test_flat_cone_curvature_zero():
    assert np.max(np.abs(curvature(flat_cone_profile(math.pi)))) < 1e-12
    assert np.max(np.abs(curvature(sampled(flat_cone_profile(math.pi))))) < 1e-9


def test_cigar_tip_curvature():
    p = cigar_profile(n=401)
    assert curvature(p)[0] == pytest.approx(1.0, abs=1e-12)
    assert curvature(sampled(p))[0] == pytest.approx(1.0, abs=1e-3)


def test_curvature_errors():
    with pytest.raises(GridTooCoarse):
        curvature(RadialProfile([0.0, 1.0], [0.0, 1.0]))
    with pytest.raises(NonPositiveProfile):
        curvature(RadialProfile([0.0, 1.0, 2.0, 3.0], [0.0, -1.0, 1.0, 2.0]))


def test_cone_angles():
    g = np.linspace(0, 1, 50)
    assert cone_angles(RadialProfile(g, g / 2))[0] == pytest.approx(math.pi)
    assert cone_angles(sphere_profile(101))[0] == pytest.approx(TWO_PI)
    traj = orbit(SolitonSpec(-1, 1.0, 0.3))
    a0, aA = cone_angles(trajectory_profile(traj, 2001))
    assert math.degrees(a0) == pytest.approx(108.0, abs=1e-3)
    assert math.degrees(aA) == pytest.approx(183.38, abs=0.1)
    with pytest.raises(NoTip):
        cone_angles(RadialProfile(g, g + 1))


def test_gauss_bonnet_sphere_second_order():
    errs = [abs(gauss_bonnet(sampled(sphere_profile(n))) - 4 * math.pi) for n in (5001, 10001)]
    assert errs[1] < 1e-6
    assert errs[0] / errs[1] >= 3.0


def test_gauss_bonnet_cigar_and_flat():
    R = 30.0
    p = cigar_profile(rho_max=R, n=60001)  # trapezoid error ~ 1e-7
    expected = TWO_PI * (1.0 - float(p.closed_form.dh(R)))
    assert gauss_bonnet(p) == pytest.approx(expected, abs=1e-6)
    assert gauss_bonnet(p) == pytest.approx(TWO_PI, abs=1e-6)
    assert gauss_bonnet(flat_cone_profile(1.0)) == pytest.approx(0.0, abs=1e-12)


def test_conic_euler():
    assert conic_euler(ConicEuler(2)) == 2
    assert conic_euler(ConicEuler(2, (-0.5,))) == 1.5
    assert conic_euler(ConicEuler(0)) == 0
    with pytest.raises(BetaOutOfRange):
        ConicEuler(2, (-1.0,))
    with pytest.raises(BetaOutOfRange):
        ConicEuler(2, (0.2,))


def test_troyanov():
    assert troyanov_admissible(ConicEuler(0)) is Admissibility.ADMISSIBLE
    assert troyanov_admissible(ConicEuler(2, (-0.5,))) is Admissibility.NOT_ADMISSIBLE
    assert troyanov_admissible(ConicEuler(2, (-0.75, -0.5))) is Admissibility.NOT_ADMISSIBLE
    assert troyanov_admissible(ConicEuler(2, (-0.5, -0.5))) is Admissibility.BOUNDARY_CASE
    assert troyanov_admissible(ConicEuler(2, (-0.5, -0.4, -0.3))) is Admissibility.ADMISSIBLE


def test_canonical_metrics():
    r = np.array([0.1, 0.5, 0.9])
    sph = canonical_cone_metric(ConeKind.SPHERICAL, 0.0)
    assert np.allclose(sph.u(r), np.log(2 / (1 + r**2)))
    euc = canonical_cone_metric("euclidean", -0.5)
    assert np.allclose(euc.u(r), math.log(0.5) - 0.5 * np.log(r))
    cusp = canonical_cone_metric("cusp")
    assert np.allclose(cusp.u(r), -np.log(r * np.abs(np.log(r))))
    hyp = canonical_cone_metric("hyperbolic", 0.0)
    assert np.allclose(hyp.u(r), np.log(2 / (1 - r**2)))
    with pytest.raises(BetaOutOfRange):
        canonical_cone_metric("euclidean", -1.2)


@pytest.mark.parametrize(
    "kind,beta,r_max",
    [("euclidean", -0.5, 1.0), ("euclidean", -0.8, 2.0), ("spherical", -0.3, 1.0), ("spherical", 0.0, 1.0), ("hyperbolic", -0.6, 0.5)],
)
def test_conformal_to_polar_recovers_angle(kind, beta, r_max):
    p = conformal_to_polar(canonical_cone_metric(kind, beta), r_max, n=10_000)
    want = TWO_PI * (beta + 1)
    assert p.angle0 == pytest.approx(want)
    from conesolitons.geometry import tip_slope

    measured = TWO_PI * tip_slope(p.grid, p.values)
    assert abs(measured - want) / want < 1e-6


def test_conformal_to_polar_examples():
    plane = ConformalProfile(0.0, lambda r: np.zeros_like(np.asarray(r, dtype=float)), a0=0.0)
    p = conformal_to_polar(plane, 1.0, 1000)
    assert np.allclose(p.values, p.grid, atol=1e-12)
    beta = -0.4
    p = conformal_to_polar(canonical_cone_metric("euclidean", beta), 1.0, 1000)
    assert np.allclose(p.values, (beta + 1) * p.grid, atol=1e-12)
    p = conformal_to_polar(canonical_cone_metric("spherical", 0.0), 1.0, 10_000)
    assert np.max(np.abs(p.values - np.sin(p.grid))) < 1e-8
    with pytest.raises(NonIntegrableFactor):
        conformal_to_polar(canonical_cone_metric("cusp"), 0.5)


def test_embed_sphere_and_cone():
    p = sphere_profile(4001)
    h, z = embed_profile(p)
    assert np.max(np.abs(z - (1 - np.cos(p.grid)))) < 1e-6
    c = flat_cone_profile(math.pi, n=101)
    h, z = embed_profile(c)
    assert np.allclose(z, math.sqrt(3) / 2 * c.grid, atol=1e-12)


def test_embed_chord_lengths():
    traj = orbit(SolitonSpec(-1, 1.0, 0.3))
    p = trajectory_profile(traj, 500)
    h, z = embed_profile(p)
    ratio = (np.diff(z) ** 2 + np.diff(h) ** 2) / np.diff(p.grid) ** 2
    assert np.max(np.abs(ratio - 1.0)) < 1e-8


def test_not_embeddable_expanding_gaussian_cone():
    a = 0.4
    b = -0.5 / a  # separatrix u = -1/(2a), |u| > 1
    traj = integrate(SolitonSpec(1, a, b), (0.0, b), (0.0, -3.0))
    p = trajectory_profile(traj, 200)
    with pytest.raises(NotEmbeddable) as info:
        embed_profile(p)
    assert info.value.index == 0
    assert abs(info.value.slope) == pytest.approx(1 / (2 * a))
