"""Rigid and deformed supergravity r-map metrics on R^n + i U_c.

Points are z = y + i x with x in U_c; real matrices use the coordinate
order (y^1..y^n, x^1..x^n) and J maps d/dy^i to d/dx^i.
"""

import numpy as np

from skgeom import homogeneous as hom
from skgeom import jets
from skgeom.errors import ConventionMismatch, DegeneracyError, SingularLocusError
from skgeom.metric import hermitian_to_real
from skgeom.special_kahler import Prepotential, ask_data, psk_metric_paths

PATH_TOL = 1e-10


def split(z):
    z = np.asarray(z, dtype=complex)
    return z.real.copy(), z.imag.copy()


def complex_structure(n):
    """Matrix of J in (y, x) coordinates: J(d/dy) = d/dx, J(d/dx) = -d/dy."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def _blockdiag(m):
    zero = np.zeros_like(m)
    return np.block([[m, zero], [zero, m]])


def rigid_rmap_metric(h, z):
    """blockdiag(-d^2 h(x), -d^2 h(x)) at z = y + i x."""
    _, x = split(z)
    h.check_domain(x)
    return _blockdiag(-h.hessian(x))


def rigid_rmap_from_prepotential(h, z):
    """Real form of Im F_ij for F = -h, the special Kahler metric of the rigid r-map."""
    return hermitian_to_real(ask_data(Prepotential.cubic(h), z).g)


def deformed_rmap_paths(h, c, z):
    """(path A, path B) for the deformed metric at z.

    A: 1/4 blockdiag(g'_c(x), g'_c(x)).
    B: real form of the projective metric of F = -h - 2ic.
    """
    _, x = split(z)
    A = 0.25 * _blockdiag(hom.metric_gprime_c(h, c, x))
    paths = psk_metric_paths(Prepotential.deformed(h, c), z)
    B = hermitian_to_real(paths["hessian"])
    return A, B


def deformed_rmap_metric(h, c, z):
    """The deformed r-map metric, assembled two ways and cross-checked."""
    A, B = deformed_rmap_paths(h, c, z)
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - B)) > PATH_TOL * scale:
        raise ConventionMismatch("deformed r-map paths disagree", A, B)
    if np.linalg.eigvalsh(A).min() <= 0:
        raise DegeneracyError("deformed r-map metric is not positive definite")
    return A


def imh_identity_residual(h, z):
    """|Im h(z) - sum Im(conj(z^i) dh/dz^i) + 4 h(Im z)| for a cubic h."""
    z = np.asarray(z, dtype=complex)
    jet = jets.jet_eval(h, z, 1)
    grad = np.asarray(jet.gradient(), dtype=complex)
    x = z.imag
    terms = (complex(jet.value).imag, float(np.sum(np.imag(np.conj(z) * grad))), 4.0 * float(h(x)))
    scale = max(1.0, *(abs(t) for t in terms))
    return abs(terms[0] - terms[1] + terms[2]) / scale


def kahler_potential_c(h, c, x):
    """K_c = -4 (h(x) + c)."""
    return -4.0 * (h(x) + c)


def elementary_deformation(h, c, z, f1_sign=1.0):
    """(f1 g + f2 ((dK_c)^2 + (dK_c o J)^2)) with f1 = f1_sign / K_c, f2 = 1 / (4 K_c^2).

    ``g`` is the rigid r-map metric.  The default ``f1_sign`` is the
    published coefficient; -1 is the sign under which the identity holds
    for g = blockdiag(-d^2 h, -d^2 h).
    """
    y, x = split(z)
    n = len(x)
    Kc = kahler_potential_c(h, c, x)
    if Kc == 0:
        raise SingularLocusError("K_c = 0 on the level h = -c")
    g = rigid_rmap_metric(h, z)
    dK = np.concatenate([np.zeros(n), -4.0 * h.gradient(x)])
    dKJ = dK @ complex_structure(n)
    return f1_sign / Kc * g + (np.outer(dK, dK) + np.outer(dKJ, dKJ)) / (4.0 * Kc * Kc)


def elementary_deformation_residual(h, c, z, f1_sign=1.0):
    """Max-abs difference between the deformed metric and its elementary-deformation form."""
    _, x = split(z)
    target = 0.25 * _blockdiag(hom.metric_gprime_c(h, c, x))
    return float(np.max(np.abs(target - elementary_deformation(h, c, z, f1_sign))))


def scaling_pullback_residual(h, c, lam, z):
    """max |lam^2 gbar_c(lam z) - gbar_{lam^-k c}(z)| for the doubled metric."""
    z = np.asarray(z, dtype=complex)
    _, x = split(z)
    left = lam * lam * 0.25 * _blockdiag(hom.metric_gprime_c(h, c, lam * x))
    right = 0.25 * _blockdiag(hom.metric_gprime_c(h, c * lam ** (-h.k), x))
    return float(np.max(np.abs(left - right)))
