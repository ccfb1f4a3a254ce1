"""Extended affine symplectic groups and their actions.

Elements are triples x = (X, s, v) with X in Sp(2n), s a scalar and v a
2n-vector, multiplied as

    (X, s, v)(X', s', v') = (XX', s + s' + Omega(v, Xv')/2, Xv' + v).

Three nested groups are distinguished by the reality of the entries:

* ``G``    : X, s, v real,
* ``G_SK`` : X real, s and v complex,
* ``G_C``  : everything complex.

Vectors in C^{2n} are ordered (z^1..z^n, w_1..w_n) and Omega(a, b) = a^T Omega0 b
with Omega0 = [[0, I], [-I, 0]].  The linear representation rho acts on
C^{2n+2} ordered (z^0, w_0, z^1..z^n, w_1..w_n).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import expm

from skgeom import jets
from skgeom.errors import DegeneracyError, GroupError

SYMPLECTIC_TOL = 1e-12
GROUPS = ("G", "G_SK", "G_C")


def omega0(n):
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def omega(a, b):
    """Omega(a, b) = a^T Omega0 b (bilinear, no conjugation)."""
    a = np.asarray(a)
    b = np.asarray(b)
    n = len(a) // 2
    return a[:n] @ b[n:] - a[n:] @ b[:n]


def omega_hat(n):
    """Form on C^{2n+2}: [[0, 1, 0], [-1, 0, 0], [0, 0, Omega0]]."""
    out = np.zeros((2 * n + 2, 2 * n + 2))
    out[0, 1] = 1.0
    out[1, 0] = -1.0
    out[2:, 2:] = omega0(n)
    return out


def _is_real(a):
    return not np.iscomplexobj(a) or np.all(np.imag(a) == 0)


def _smallest_group(X, s, v):
    if not _is_real(X):
        return "G_C"
    if not (_is_real(s) and _is_real(v)):
        return "G_SK"
    return "G"


def symplectic_residual(X):
    n = X.shape[0] // 2
    O = omega0(n)
    scale = max(1.0, float(np.max(np.abs(X))) ** 2)
    return float(np.max(np.abs(X.T @ O @ X - O))) / scale


@dataclass(frozen=True)
class GroupElement:
    """(X, s, v) in the group named by ``group``; validated on construction."""

    X: np.ndarray
    s: complex
    v: np.ndarray
    group: str = ""
    n: int = field(init=False)

    def __post_init__(self):
        X = np.array(self.X)
        v = np.array(self.v).reshape(-1)
        if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] % 2:
            raise GroupError("X must be a square matrix of even size")
        if v.shape != (X.shape[0],):
            raise GroupError(f"v has length {v.size}, expected {X.shape[0]}")
        res = symplectic_residual(X)
        if res > SYMPLECTIC_TOL:
            raise GroupError(f"X is not symplectic (residual {res:.3e})")
        least = _smallest_group(X, self.s, v)
        group = self.group or least
        if group not in GROUPS:
            raise GroupError(f"unknown group {group!r}")
        if GROUPS.index(group) < GROUPS.index(least):
            raise GroupError(f"entries require at least {least}, flagged {group}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "n", X.shape[0] // 2)

    @classmethod
    def identity(cls, n, group="G"):
        return cls(np.eye(2 * n), 0.0, np.zeros(2 * n), group)

    @classmethod
    def center(cls, n, s):
        return cls(np.eye(2 * n), s, np.zeros(2 * n))

    @classmethod
    def translation(cls, v, s=0.0):
        v = np.asarray(v)
        return cls(np.eye(len(v)), s, v)

    def distance(self, other):
        """Max-abs difference of all components."""
        return max(float(np.max(np.abs(self.X - other.X))), abs(self.s - other.s),
                   float(np.max(np.abs(self.v - other.v))))


def group_mul(a, b):
    if a.n != b.n:
        raise GroupError(f"dimension mismatch: n={a.n} and n={b.n}")
    Xv = a.X @ b.v
    group = GROUPS[max(GROUPS.index(a.group), GROUPS.index(b.group))]
    return GroupElement(a.X @ b.X, a.s + b.s + 0.5 * omega(a.v, Xv), Xv + a.v, group)


def group_inv(a):
    Xi = np.linalg.inv(a.X)
    return GroupElement(Xi, -a.s, -(Xi @ a.v), a.group)


def rho(a):
    """Matrix of the linear symplectic representation on C^{2n+2}."""
    n = a.n
    dtype = np.result_type(a.X, a.v, np.asarray(a.s))
    out = np.zeros((2 * n + 2, 2 * n + 2), dtype=dtype)
    out[0, 0] = 1.0
    out[1, 0] = -2.0 * a.s
    out[1, 1] = 1.0
    out[1, 2:] = a.X.T @ omega0(n) @ a.v
    out[2:, 0] = a.v
    out[2:, 2:] = a.X
    return out


def random_symplectic(n, rng, scale=0.5, complex_=False):
    """exp(Omega0 S) for a random symmetric S with entries in [-scale, scale]."""
    S = rng.uniform(-scale, scale, (2 * n, 2 * n))
    if complex_:
        S = S + 1j * rng.uniform(-scale, scale, (2 * n, 2 * n))
    S = 0.5 * (S + S.T)
    return expm(omega0(n) @ S)


def random_element(n, rng, group="G", scale=0.5):
    X = random_symplectic(n, rng, scale, complex_=(group == "G_C"))
    s = rng.uniform(-1, 1)
    v = rng.uniform(-1, 1, 2 * n)
    if group != "G":
        s = s + 1j * rng.uniform(-1, 1)
        v = v + 1j * rng.uniform(-1, 1, 2 * n)
    return GroupElement(X, s, v, group)


@dataclass(frozen=True)
class PotentialSample:
    """A point q of a Lagrangian subspace with the potential value f(q).

    ``tangents`` (rows) span tangent directions at q and ``df`` holds the
    derivative of f along each of them.
    """

    q: np.ndarray
    f: complex
    tangents: Optional[np.ndarray] = None
    df: Optional[np.ndarray] = None

    def potential_residual(self):
        """max |df(t) + Omega(q, t)| over the carried tangents."""
        if self.tangents is None:
            return 0.0
        eta = np.array([omega(self.q, t) for t in self.tangents])
        return float(np.max(np.abs(self.df + eta)))


def act_potential(a, sample):
    """x.f at q' = Xq + v: f(q) + Omega(q', v) - 2s."""
    q2 = a.X @ sample.q + a.v
    f2 = sample.f + omega(q2, a.v) - 2.0 * a.s
    tangents = df = None
    if sample.tangents is not None:
        tangents = sample.tangents @ a.X.T
        df = sample.df + np.array([omega(t, a.v) for t in tangents])
    return PotentialSample(q2, f2, tangents, df)


@dataclass(frozen=True)
class PrepotentialAction:
    phi: np.ndarray
    phi_prime: np.ndarray
    F: complex
    F_prime: complex
    dewit_residual: float
    symplectic_residual: Optional[float]
    prepotential_residual: float
    coordinate_condition: float


def _transform(a, F, zs):
    """Jets of (phi', F') over the variables of ``zs``."""
    n = a.n
    w = F.gradient_jets(zs)
    phi = list(zs) + list(w)
    phi2 = [sum(a.X[i, j] * phi[j] for j in range(2 * n)) + a.v[i] for i in range(2 * n)]
    z2, w2 = phi2[:n], phi2[n:]
    half_zw = 0.5 * sum(zs[i] * w[i] for i in range(n))
    half_zw2 = 0.5 * sum(z2[i] * w2[i] for i in range(n))
    om = 0.5 * (sum(phi2[i] * a.v[n + i] for i in range(n)) - sum(phi2[n + i] * a.v[i] for i in range(n)))
    Fz = F.func(zs) + F.shift
    F2 = Fz - half_zw + half_zw2 + om - a.s
    return phi, phi2, Fz, F2, half_zw, half_zw2, om


def act_prepotential(a, F, z):
    """Transform the prepotential ``F`` by ``a`` at the point ``z``.

    Returns the transformed point phi' = X phi(z) + v, the value F', the
    residual of F' - z'w'/2 against F - zw/2 + Omega(phi', v)/2 - s, the
    symplectic invariance residual (for s = v = 0), and the residual of
    dF' = w' dz' along the coordinate directions of z.
    """
    from skgeom.special_kahler import totally_complex_rank

    z = np.asarray(z, dtype=complex)
    n = a.n
    if len(z) != n:
        raise GroupError(f"point has {len(z)} coordinates, element acts on n={n}")
    if a.group not in ("G", "G_SK"):
        raise GroupError("prepotentials transform under G_SK")
    rank = totally_complex_rank(F, z)
    if rank < 2 * n:
        raise DegeneracyError(f"phi is not totally complex at z (rank {rank} < {2 * n})")
    zs = jets.variables(z, 1, complex)
    phi, phi2, Fz, F2, hzw, hzw2, om = _transform(a, F, zs)
    val = lambda j: complex(j.value) if isinstance(j, jets.Jet) else complex(j)
    lhs = val(F2) - val(hzw2)
    rhs = val(Fz) - val(hzw) + val(om) - a.s
    dewit = abs(lhs - rhs)
    sympl = None
    if abs(a.s) == 0 and np.all(a.v == 0):
        sympl = abs(lhs - (val(Fz) - val(hzw)))
    # dF'/dz_j = sum_i w'_i dz'_i/dz_j
    dz2 = np.array([[complex(phi2[i].gradient()[j]) for j in range(n)] for i in range(n)])
    w2 = np.array([val(phi2[n + i]) for i in range(n)])
    dF2 = np.asarray(F2.gradient(), dtype=complex)
    pre = float(np.max(np.abs(dF2 - w2 @ dz2)))
    return PrepotentialAction(
        phi=np.array([val(p) for p in phi]),
        phi_prime=np.array([val(p) for p in phi2]),
        F=val(Fz),
        F_prime=val(F2),
        dewit_residual=dewit,
        symplectic_residual=sympl,
        prepotential_residual=pre,
        coordinate_condition=float(np.linalg.cond(dz2)),
    )


def cone_form(Phi):
    """K_hat = sum_I Im(conj(Z^I) W_I) for Phi ordered (Z^0, W_0, Z^1..Z^n, W_1..W_n)."""
    Phi = np.asarray(Phi, dtype=complex)
    n = (len(Phi) - 2) // 2
    Z = np.concatenate([Phi[:1], Phi[2:2 + n]])
    W = np.concatenate([Phi[1:2], Phi[2 + n:]])
    return float(np.sum(np.imag(np.conj(Z) * W)))


def lift(sample, Z0=1.0):
    """Cone vector Z0 (1, f(q), q) of a Lagrangian potential sample."""
    return Z0 * np.concatenate([[1.0, sample.f], sample.q])


def reduce(Phi):
    """Inverse of ``lift`` on the slice: (q, f(q)) from Phi with Z^0 != 0."""
    Phi = np.asarray(Phi, dtype=complex)
    if Phi[0] == 0:
        raise GroupError("cone vector has Z^0 = 0")
    Phi = Phi / Phi[0]
    return PotentialSample(Phi[2:], Phi[1])
