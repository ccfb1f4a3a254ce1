"""Prepotentials, affine special Kahler data and their conification.

A prepotential F on a domain of C^n determines

* phi = (z, w) with w_i = dF/dz^i,
* K = sum_i Im(conj(z^i) F_i),
* the Lagrangian potential f = 2F - z^T w,
* the metric g = Im F_ij.

The conified prepotential F_hat(Z) = (Z^0)^2 F(Z/Z^0) is homogeneous of
degree two, and K_hat = sum_I Im(conj(Z^I) F_hat_I) restricts to
K + Im f on the slice Z^0 = 1.  The projective metric has Kahler
potential -log|K + Im f|.
"""

from dataclasses import dataclass

import numpy as np

from skgeom import jets
from skgeom.errors import (ConventionMismatch, DegeneracyError, DomainError, GroupError,
                           InversionError)
from skgeom.homogeneous import HomogeneousFunction
from skgeom.metric import CONDITION_LIMIT

KINDS = ("cubic", "quadratic", "conified", "general")
PATH_TOL = 1e-10


class Prepotential:
    """Holomorphic F(z) = func(z) + shift on a domain of C^n.

    ``func`` takes a sequence of (holomorphic) jets and returns a jet; it is
    only ever evaluated through jets so that derivatives come for free.
    """

    def __init__(self, n, func, shift=0.0, kind="general", data=None, name=""):
        if kind not in KINDS:
            raise ValueError(f"unknown prepotential kind {kind!r}")
        self.n = int(n)
        self.func = func
        self.shift = complex(shift)
        self.kind = kind
        self.data = data
        self.name = name

    def full(self, zs):
        return self.func(zs) + self.shift

    def __repr__(self):
        return f"Prepotential(kind={self.kind!r}, n={self.n}, shift={self.shift!r}, name={self.name!r})"

    # constructors

    @classmethod
    def cubic(cls, h, shift=0.0):
        """F = -h(z) + shift for a real polynomial h extended holomorphically."""
        return cls(h.n, lambda zs: -h(zs), shift, "cubic", h, name=f"-{h.name or 'h'}")

    @classmethod
    def deformed(cls, h, c):
        """F = -h - 2ic, the prepotential whose shift carries the deformation c."""
        return cls.cubic(h, -2j * c)

    @classmethod
    def quadratic(cls, a, C=0.0):
        """F = sum_ij a_ij z^i z^j + C/2."""
        a = np.asarray(a, dtype=complex)
        a = 0.5 * (a + a.T)
        n = a.shape[0]

        def func(zs):
            return sum(a[i, j] * zs[i] * zs[j] for i in range(n) for j in range(n))

        return cls(n, func, 0.5 * complex(C), "quadratic", a, name="quadratic")

    @classmethod
    def from_function(cls, func, n, shift=0.0, name=""):
        return cls(n, func, shift, "general", None, name)

    @classmethod
    def from_spec(cls, spec):
        """Build from {"kind", "coeffs", "shift_real", "shift_imag"}.

        * cubic: coeffs is a list of {"powers", "coeff"} records of h; F = -h + shift.
        * quadratic: coeffs is {"real": a_re, "imag": a_im}; F = sum a_ij z^i z^j + shift.
        * conified: coeffs is the record of the inner prepotential.
        """
        kind = spec.get("kind")
        shift = complex(spec.get("shift_real", 0.0), spec.get("shift_imag", 0.0))
        coeffs = spec.get("coeffs")
        if kind == "cubic":
            h = HomogeneousFunction.from_records(coeffs, 3, base_point=None, name="h")
            return cls.cubic(h, shift)
        if kind == "quadratic":
            re = np.asarray(coeffs.get("real", 0.0), dtype=float)
            im = np.asarray(coeffs.get("imag", np.zeros_like(re)), dtype=float)
            out = cls.quadratic(re + 1j * im, 0.0)
            out.shift = shift
            return out
        if kind == "conified":
            inner = cls.from_spec(coeffs)
            inner.shift += shift
            return inner.conify()
        raise ValueError(f"prepotential spec kind must be cubic, quadratic or conified, got {kind!r}")

    def conify(self):
        """F_hat(Z^0, ..., Z^n) = (Z^0)^2 F(Z / Z^0)."""
        inner = self

        def func(Zs):
            Z0 = Zs[0]
            inv = 1.0 / Z0
            return Z0 * Z0 * inner.full([Zi * inv for Zi in Zs[1:]])

        return Prepotential(self.n + 1, func, 0.0, "conified", inner, name=f"conified({self.name})")

    # evaluation

    def jet(self, z, order):
        z = np.asarray(z, dtype=complex)
        if z.shape != (self.n,):
            raise DomainError(f"expected a point of C^{self.n}, got shape {z.shape}")
        return jets.jet_eval(self.full, z, order)

    def value(self, z):
        return complex(self.jet(z, 0).value)

    def gradient(self, z):
        return np.asarray(self.jet(z, 1).gradient(), dtype=complex)

    def hessian(self, z):
        return np.asarray(self.jet(z, 2).hessian(), dtype=complex)

    def gradient_jets(self, zs):
        """Jets of dF/dz^i composed with the jets ``zs``."""
        order = next(z.order for z in zs if isinstance(z, jets.Jet))
        base = np.array([z.value if isinstance(z, jets.Jet) else z for z in zs], dtype=complex)
        outer = self.jet(base, order + 1)
        return [jets.compose(jets.deriv(outer, i), zs) for i in range(self.n)]


@dataclass(frozen=True)
class AskData:
    z: np.ndarray
    phi: np.ndarray
    F: complex
    K: float
    f: complex
    g: np.ndarray
    degenerate: bool


def ask_data(F, z):
    z = np.asarray(z, dtype=complex)
    jet = F.jet(z, 2)
    w = np.asarray(jet.gradient(), dtype=complex)
    hess = np.asarray(jet.hessian(), dtype=complex)
    K = float(np.sum(np.imag(np.conj(z) * w)))
    f = 2.0 * complex(jet.value) - complex(z @ w)
    g = hess.imag
    degenerate = not np.any(g) or np.linalg.cond(g) > CONDITION_LIMIT
    return AskData(z, np.concatenate([z, w]), complex(jet.value), K, f, g, bool(degenerate))


def _slice_potential(F):
    """K + Im f as a function of jets z = y + i x with complex coefficients.

    ``F`` is evaluated on these non-holomorphic jets; since F is holomorphic,
    dF/dz^i equals the y^i-derivative.  One order is lost in the process.
    """
    def fn(zs):
        Fz = F.full(zs)
        w = [jets.deriv(Fz, i) for i in range(len(zs))]
        K = sum(jets.imag(jets.conj(zs[i]) * w[i]) for i in range(len(zs)))
        f = 2.0 * Fz - sum(zs[i] * w[i] for i in range(len(zs)))
        return K + jets.imag(f)
    return fn


def _log_potential(F, sign):
    inner = _slice_potential(F)
    return lambda zs: -jets.log(sign * inner(zs))


@dataclass(frozen=True)
class ConicalValue:
    Khat: float
    factorization_residual: float


def conical_potential(Fhat, Z):
    """K_hat(Z) for a conified prepotential and its factorization residual.

    The residual is |K_hat(Z) - |Z^0|^2 (K + Im f)(Z / Z^0)| computed from
    the inner prepotential.
    """
    if Fhat.kind != "conified":
        raise ValueError("conical_potential needs a conified prepotential")
    Z = np.asarray(Z, dtype=complex)
    if Z[0] == 0:
        raise DomainError("Z^0 = 0 is outside the cone domain")
    grad = Fhat.gradient(Z)
    Khat = float(np.sum(np.imag(np.conj(Z) * grad)))
    data = ask_data(Fhat.data, Z[1:] / Z[0])
    other = abs(Z[0]) ** 2 * (data.K + data.f.imag)
    return ConicalValue(Khat, abs(Khat - other))


def cone_vector(F, z, Z0=1.0):
    """Phi = Z^0 (1, f, z, w) on the Lagrangian cone, ordered (Z^0, W_0, Z, W)."""
    d = ask_data(F, z)
    return Z0 * np.concatenate([[1.0, d.f], d.phi])


def cone_hessian(F, z):
    """Im d^2 F_hat at (1, z): the (n+1) x (n+1) cone metric on the slice."""
    Fhat = F.conify()
    return Fhat.hessian(np.concatenate([[1.0], np.asarray(z, dtype=complex)])).imag


def cone_metric_residual(F, z):
    """max |Im F_hat_IJ - d^2 K_hat / dZ^I dZbar^J| at (1, z)."""
    Fhat = F.conify()
    Z = np.concatenate([[1.0], np.asarray(z, dtype=complex)])

    def Khat(Zs):
        Fz = Fhat.full(Zs)
        return sum(jets.imag(jets.conj(Zs[i]) * jets.deriv(Fz, i)) for i in range(len(Zs)))

    H = jets.complex_hessian(Khat, Z, order=3)
    M = Fhat.hessian(Z).imag
    return float(np.max(np.abs(H - M)))


def nondegeneracy(F, z):
    """Verdicts {kahlerian, Khat_nonzero, omega_bar_nondeg} plus the sign of K + Im f."""
    z = np.asarray(z, dtype=complex)
    M = cone_hessian(F, z)
    kahlerian = bool(np.linalg.cond(M) < CONDITION_LIMIT)
    d = ask_data(F, z)
    total = d.K + d.f.imag
    scale = max(1.0, abs(d.K), abs(d.f.imag))
    nonzero = bool(abs(total) > 1e-12 * scale)
    nondeg = False
    if nonzero:
        H = jets.complex_hessian(_log_potential(F, np.sign(total)), z, order=3)
        nondeg = bool(np.linalg.cond(H) < CONDITION_LIMIT)
    return {"kahlerian": kahlerian, "Khat_nonzero": nonzero, "omega_bar_nondeg": nondeg,
            "sign": float(np.sign(total))}


def psk_metric_paths(F, z):
    """The projective metric at z computed two ways.

    ``hessian``: the complex Hessian of -log|K + Im f| in real jets.
    ``slice``:   -Im F_hat_ij / K_hat + K_hat_i conj(K_hat_j) / K_hat^2 at (1, z).
    """
    z = np.asarray(z, dtype=complex)
    n = len(z)
    d = ask_data(F, z)
    total = d.K + d.f.imag
    if abs(total) <= 1e-12 * max(1.0, abs(d.K), abs(d.f.imag)):
        raise DegeneracyError("K + Im f vanishes; the projective metric is undefined")
    H1 = jets.complex_hessian(_log_potential(F, np.sign(total)), z, order=3)
    Z = np.concatenate([[1.0], z])
    jet = F.conify().jet(Z, 2)
    dF = np.asarray(jet.gradient(), dtype=complex)
    ddF = np.asarray(jet.hessian(), dtype=complex)
    Khat = float(np.sum(np.imag(np.conj(Z) * dF)))
    Kd = (ddF @ np.conj(Z) - np.conj(dF)) / 2j
    H2 = -ddF.imag[1:, 1:] / Khat + np.outer(Kd[1:], np.conj(Kd[1:])) / Khat ** 2
    return {"hessian": H1, "slice": H2, "K_plus_Imf": total, "Khat": Khat}


def psk_metric(F, z):
    """Hermitian matrix d^2(-log|K + Im f|)/dz^i dzbar^j, cross-checked on the cone slice."""
    verdict = nondegeneracy(F, z)
    if not verdict["Khat_nonzero"]:
        raise DegeneracyError("K + Im f vanishes at z")
    paths = psk_metric_paths(F, z)
    H1, H2 = paths["hessian"], paths["slice"]
    scale = max(1.0, float(np.max(np.abs(H1))))
    if np.max(np.abs(H1 - H2)) > PATH_TOL * scale:
        raise ConventionMismatch("projective metric paths disagree", H1, H2)
    if not verdict["omega_bar_nondeg"]:
        raise InversionError("projective metric is degenerate", float(np.linalg.cond(H1)))
    return H1


def totally_complex_rank(F, z, tol=1e-10):
    """Real rank of d(Re phi) at z, in real coordinates (Re z, Im z)."""
    H = F.hessian(z)
    n = F.n
    J = np.block([[np.eye(n), np.zeros((n, n))], [H.real, -H.imag]])
    return int(np.linalg.matrix_rank(J, tol=tol * max(1.0, float(np.max(np.abs(J))))))


def normalize_pair(F, z0):
    """Element (I, s, v) moving phi(z0) to the real point 0 with Im f = 1 there.

    v = -phi(z0); then (x.f)(0) = f(z0) - 2s, so s = i (Im f(z0) - 1) / 2.
    """
    from skgeom.symplectic import GroupElement

    d = ask_data(F, z0)
    n = F.n
    s = 0.5j * (d.f.imag - 1.0)
    return GroupElement(np.eye(2 * n), s, -d.phi, "G_SK")


def translated_prepotential(F, a):
    """Prepotential of phi' = phi + v for a translation a = (I, s, v) in G_SK.

    F'(z') = F(z) - z.w/2 + z'.w'/2 + Omega(phi', v)/2 - s with z = z' - v_z.
    """
    n = F.n
    if not np.allclose(a.X, np.eye(2 * n), rtol=0.0, atol=0.0):
        raise GroupError("only translations (X = I) are supported")
    vz, vw = a.v[:n], a.v[n:]

    def func(zs2):
        zs = [zs2[i] - vz[i] for i in range(n)]
        w = F.gradient_jets(zs)
        Fz = F.full(zs)
        w2 = [w[i] + vw[i] for i in range(n)]
        out = Fz - 0.5 * sum(zs[i] * w[i] for i in range(n)) + 0.5 * sum(zs2[i] * w2[i] for i in range(n))
        om = sum(zs2[i] * vw[i] for i in range(n)) - sum(w2[i] * vz[i] for i in range(n))
        return out + 0.5 * om - a.s

    return Prepotential(n, func, 0.0, "general", None, name=f"translated({F.name})")


def potential_sample(F, z):
    """Lagrangian potential sample on the graph of dF at z, with tangents d phi / dz^j."""
    from skgeom.symplectic import PotentialSample

    d = ask_data(F, z)
    n = F.n
    hess = F.hessian(z)
    tangents = np.concatenate([np.eye(n), hess], axis=1)
    w = d.phi[n:]
    df = w - hess @ np.asarray(z, dtype=complex)
    return PotentialSample(d.phi, d.f, tangents, df)
