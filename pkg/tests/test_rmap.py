import numpy as np
import pytest

from skgeom import homogeneous as hom
from skgeom import rmap
from skgeom.errors import DomainError, SingularLocusError

XYZ = hom.cubic_xyz()
XXYZ = hom.cubic_x_xy_z2()
Z_CUBED = hom.HomogeneousFunction.from_records([{"powers": [3], "coeff": 1.0}], 3, [1.0], name="z^3")


def sample_z(h, c, rng, count):
    return [rng.standard_normal(h.n) + 1j * x for x in hom.sample_points(h, c, rng, count)]


def test_rigid_xyz_example():
    z = np.array([0.5, -1.0, 2.0]) + 1j * np.ones(3)
    block = -(np.ones((3, 3)) - np.eye(3))
    g = rmap.rigid_rmap_metric(XYZ, z)
    assert np.allclose(g[:3, :3], block) and np.allclose(g[3:, 3:], block)
    assert np.allclose(g[:3, 3:], 0.0)
    assert hom.signature(g) == (4, 2, 0)


def test_rigid_matches_prepotential(rng):
    for z in sample_z(XXYZ, 0.0, rng, 10):
        assert np.allclose(rmap.rigid_rmap_metric(XXYZ, z), rmap.rigid_rmap_from_prepotential(XXYZ, z), atol=1e-12)


def test_complex_structure_is_compatible(rng):
    J = rmap.complex_structure(3)
    assert np.allclose(J @ J, -np.eye(6))
    g = rmap.deformed_rmap_metric(XYZ, -0.5, sample_z(XYZ, -0.5, rng, 1)[0])
    assert np.allclose(J.T @ g @ J, g)


def test_deformed_examples():
    z = np.array([0.7, -0.2, 3.0]) + 1j * np.ones(3)
    assert np.allclose(rmap.deformed_rmap_metric(XYZ, 0.0, z), 0.25 * np.eye(6), atol=1e-12)
    M = 2 * np.ones((3, 3)) + 2 * np.eye(3)
    expected = 0.25 * np.block([[M, np.zeros((3, 3))], [np.zeros((3, 3)), M]])
    assert np.allclose(rmap.deformed_rmap_metric(XYZ, -0.5, 1j * np.ones(3)), expected, atol=1e-12)


def test_deformed_metric_independent_of_y(rng):
    x = hom.sample_points(XYZ, 0.5, rng, 1)[0]
    a = rmap.deformed_rmap_metric(XYZ, 0.5, rng.standard_normal(3) + 1j * x)
    b = rmap.deformed_rmap_metric(XYZ, 0.5, 10 * rng.standard_normal(3) + 1j * x)
    assert np.max(np.abs(a - b)) <= 1e-12


@pytest.mark.parametrize("c", [0.0, 0.5, -0.5])
def test_paths_agree(rng, c):
    for h in (XYZ, XXYZ):
        for z in sample_z(h, c, rng, 10):
            A, B = rmap.deformed_rmap_paths(h, c, z)
            assert np.max(np.abs(A - B)) <= 1e-10 * max(1.0, np.max(np.abs(A)))
            assert np.linalg.eigvalsh(A)[0] > 0


def test_domain_is_enforced():
    with pytest.raises(DomainError):
        rmap.deformed_rmap_paths(XYZ, 1.0, 1j * np.ones(3))


def test_imh_identity_hand_case():
    assert rmap.imh_identity_residual(Z_CUBED, np.array([1j])) == pytest.approx(0.0, abs=1e-15)
    # real points: every term vanishes
    assert rmap.imh_identity_residual(XYZ, np.array([0.3, -1.2, 2.0])) == 0.0


def test_imh_identity_fuzz(rng):
    for h in (XYZ, XXYZ, Z_CUBED):
        for _ in range(30):
            z = 2 * rng.standard_normal(h.n) + 2j * rng.standard_normal(h.n)
            assert rmap.imh_identity_residual(h, z) <= 1e-12


@pytest.mark.parametrize("h", [XYZ, XXYZ, hom.quartic_product(4)], ids=["xyz", "x(xy-z^2)", "x1x2x3x4"])
@pytest.mark.parametrize("c", [0.5, -0.5])
def test_elementary_deformation_holds_with_negative_f1(rng, h, c):
    for z in sample_z(h, c, rng, 5):
        x = z.imag
        scale = max(1.0, np.max(np.abs(hom.metric_gprime_c(h, c, x))))
        assert rmap.elementary_deformation_residual(h, c, z, f1_sign=-1.0) / scale <= 1e-10


def test_elementary_deformation_published_sign_differs(rng):
    z = sample_z(XYZ, -0.5, rng, 1)[0]
    assert rmap.elementary_deformation_residual(XYZ, -0.5, z, f1_sign=1.0) > 1e-3


def test_elementary_deformation_singular_level():
    # K_c = 0 exactly where h = -c, which lies outside U_c but is reachable by the formula
    z = 1j * np.ones(3)
    with pytest.raises(SingularLocusError):
        rmap.elementary_deformation(XYZ, -1.0, z)


@pytest.mark.parametrize("c", [0.5, -0.5])
@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_scaling_isometry(rng, c, lam):
    for z in sample_z(XYZ, c * lam ** -3, rng, 5):
        assert rmap.scaling_pullback_residual(XYZ, c, lam, z) <= 1e-10


def test_kahler_potential_c():
    assert rmap.kahler_potential_c(XYZ, 0.25, np.ones(3)) == pytest.approx(-5.0)
