import numpy as np
import pytest

from skgeom import curvature as curv
from skgeom import homogeneous as hom
from skgeom import jets
from skgeom.errors import InversionError
from skgeom.metric import MetricField, flat, half_plane

XYZ = hom.cubic_xyz()
XXYZ = hom.cubic_x_xy_z2()


def sphere():
    """Round unit sphere in coordinates (theta, phi)."""
    def entries(x):
        s = jets.Jet.constant(np.sin(x[0].value), 2, x[0].order)
        # sin(theta) as a jet via exp
        s = (jets.exp(1j * x[0]) - jets.exp(-1j * x[0])) * (-0.5j)
        one = x[0] * 0.0 + 1.0
        zero = x[0] * 0.0
        return [[one, zero], [zero, jets.real(s * s)]]
    return MetricField.from_entries(entries, 2)


def test_flat_is_flat():
    b = curv.curvature_bundle(flat(3), [0.3, -1.0, 2.0])
    assert np.allclose(b["christoffel"], 0.0)
    assert np.allclose(b["riemann"], 0.0)


def test_half_plane():
    g = half_plane()
    b = curv.curvature_bundle(g, [0.4, 2.0])
    assert b["scal"] == pytest.approx(-2.0, rel=1e-12)
    # Gamma^x_xy = -1/y, Gamma^y_xx = 1/y
    assert b["christoffel"][0, 0, 1] == pytest.approx(-0.5)
    assert b["christoffel"][1, 0, 0] == pytest.approx(0.5)
    Rl = curv.lowered_riemann(g, [0.4, 2.0])
    gm = b["g"]
    sectional = Rl[0, 1, 0, 1] / (gm[0, 0] * gm[1, 1] - gm[0, 1] ** 2)
    assert abs(sectional) == pytest.approx(1.0)


def test_sphere_positive():
    assert curv.scalar_curvature(sphere(), [1.1, 0.3]) == pytest.approx(2.0, rel=1e-12)


def test_christoffel_against_finite_differences():
    g = hom.gprime_c_field(XXYZ, -0.3)
    x = np.array([1.2, 2.1, 0.9])
    eps = 1e-6
    n = 3
    dg = np.zeros((n, n, n))
    for l in range(n):
        e = np.zeros(n)
        e[l] = eps
        dg[:, :, l] = (g.matrix(x + e) - g.matrix(x - e)) / (2 * eps)
    ginv = np.linalg.inv(g.matrix(x))
    gamma = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                gamma[k, i, j] = 0.5 * sum(ginv[k, l] * (dg[j, l, i] + dg[i, l, j] - dg[i, j, l]) for l in range(n))
    assert np.allclose(curv.christoffel(g, x), gamma, rtol=1e-6, atol=1e-7)


def test_scalar_curvature_against_finite_differences_of_christoffel():
    g = hom.gprime_c_field(XYZ, 0.4)
    x = np.array([1.4, 1.1, 1.5])
    eps = 1e-5
    n = 3
    gamma = curv.christoffel(g, x)
    dgamma = np.zeros((n, n, n, n))
    for m in range(n):
        e = np.zeros(n)
        e[m] = eps
        dgamma[..., m] = (curv.christoffel(g, x + e) - curv.christoffel(g, x - e)) / (2 * eps)
    R = (np.einsum("ljki->lkij", dgamma) - np.einsum("likj->lkij", dgamma)
         + np.einsum("lim,mjk->lkij", gamma, gamma) - np.einsum("ljm,mik->lkij", gamma, gamma))
    scal = np.einsum("kj,ikij->", np.linalg.inv(g.matrix(x)), R)
    assert curv.scalar_curvature(g, x) == pytest.approx(scal, rel=1e-6)


@pytest.mark.parametrize("c", [0.0, 0.3, -0.3, 1.0, -1.0])
def test_symmetries(rng, c):
    for h in (XYZ, XXYZ):
        g = hom.gprime_c_field(h, c)
        for x in hom.sample_points(h, c, rng, 10):
            res = curv.symmetry_residuals(g, x)
            for key, value in res.items():
                if key != "lowering_consistency":
                    assert value <= 1e-9, key
            # the mixed-index path loses accuracy with the conditioning of g
            assert res["lowering_consistency"] <= 1e-14 * np.linalg.cond(g.matrix(x)) ** 2


def test_xyz_c0_flat():
    R = curv.riemann(hom.gprime_c_field(XYZ, 0.0), [0.7, 1.3, 2.0])
    assert np.max(np.abs(R)) <= 1e-12


def test_example_values():
    assert curv.scalar_curvature(hom.gprime_c_field(XXYZ, 0.0), [1.0, 2.0, 1.0]) == pytest.approx(-0.75)
    # (1, 2, 1) has h = 1; the closed form at h = c = 1 gives 3
    assert curv.scal_closed_form_x_xy_z2(1.0, 1.0) == pytest.approx(3.0)
    assert curv.scalar_curvature(hom.gprime_c_field(XXYZ, 1.0), [1.0, 2.0, 1.0]) == pytest.approx(3.0, rel=1e-10)


def test_singular_metric_raises():
    def entries(x):
        one = x[0] * 0.0 + 1.0
        return [[one, one], [one, one]]
    with pytest.raises(InversionError) as info:
        curv.christoffel(MetricField.from_entries(entries, 2), [0.0, 0.0])
    assert info.value.condition_number > 1e12 or not np.isfinite(info.value.condition_number)


def test_rescaling_multiplies_scalar_curvature():
    g = hom.gprime_c_field(XXYZ, -0.3)
    quarter = MetricField.from_potential(lambda xs: 0.25 * hom.log_potential(XXYZ, -0.3)(xs), 3, sign=-1.0)
    x = [1.2, 2.1, 0.9]
    assert curv.scalar_curvature(quarter, x) == pytest.approx(4 * curv.scalar_curvature(g, x), rel=1e-12)
