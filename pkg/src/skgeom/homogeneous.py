"""Homogeneous functions on cones and their Hessian metrics.

For a positive homogeneous h of degree k > 1 on a cone U we work with

* ``g_U = -d^2 h`` (Lorentzian on hyperbolic cones),
* ``g'_c = -d^2 log(h + c)`` on ``U_c`` (Riemannian),
* ``g_check = g_U - g_U(xi, .)^2 / g_U(xi, xi)`` with xi the position field.
"""

from dataclasses import dataclass, field

import numpy as np

from skgeom import jets
from skgeom.errors import DegeneracyError, DomainError, SingularLocusError
from skgeom.metric import MetricField

SEGMENT_SAMPLES = 64


class HomogeneousFunction:
    """A degree-k homogeneous function h on a cone U containing ``base_point``.

    Polynomials are given as ``terms``: a list of (powers, coeff) pairs.  A
    non-polynomial h may be passed as ``func``, a callable on sequences of
    jets or numbers; its homogeneity is then the caller's responsibility.
    The cone U is the connected component of {h > 0} containing the base
    point, probed along the straight segment from the base point.
    """

    def __init__(self, n, k, terms=None, base_point=None, func=None, name=""):
        if (terms is None) == (func is None):
            raise ValueError("give exactly one of terms or func")
        if k <= 1:
            raise ValueError("homogeneity degree must exceed 1")
        self.n = int(n)
        self.k = k
        self.name = name
        self.func = func
        self.terms = None
        if terms is not None:
            powers = np.array([p for p, _ in terms], dtype=int).reshape(-1, self.n)
            coeffs = np.array([c for _, c in terms], dtype=float)
            if np.any(powers < 0):
                raise ValueError("negative exponent in polynomial term")
            bad = powers.sum(axis=1) != k
            if np.any(bad):
                raise ValueError(f"term degrees {powers.sum(axis=1)[bad].tolist()} differ from k={k}")
            self.terms = (powers, coeffs)
        self.base_point = None if base_point is None else np.asarray(base_point, dtype=float)
        if self.base_point is not None and not self(self.base_point) > 0:
            raise DomainError("h must be positive at the base point")

    @classmethod
    def from_records(cls, records, k, base_point, name=""):
        """Build from [{"powers": [...], "coeff": float}, ...]."""
        if not records:
            raise ValueError("polynomial needs at least one term")
        n = len(records[0]["powers"])
        terms = []
        for rec in records:
            if len(rec["powers"]) != n:
                raise ValueError("inconsistent number of variables in polynomial terms")
            terms.append((rec["powers"], float(rec["coeff"])))
        return cls(n, k, terms=terms, base_point=base_point, name=name)

    def to_records(self):
        powers, coeffs = self.terms
        return [{"powers": p.tolist(), "coeff": float(c)} for p, c in zip(powers, coeffs)]

    @classmethod
    def from_symmetric_tensor(cls, C, scale=1.0, base_point=None, name=""):
        """Cubic h = scale * C_ijk x^i x^j x^k from a symmetric 3-tensor."""
        C = np.asarray(C, dtype=float)
        n = C.shape[0]
        coeffs = {}
        for i in range(n):
            for j in range(n):
                for l in range(n):
                    p = [0] * n
                    p[i] += 1
                    p[j] += 1
                    p[l] += 1
                    coeffs[tuple(p)] = coeffs.get(tuple(p), 0.0) + scale * C[i, j, l]
        terms = [(list(p), c) for p, c in coeffs.items() if c != 0.0]
        return cls(n, 3, terms=terms, base_point=base_point, name=name)

    def __call__(self, x):
        if self.func is not None:
            return self.func(x)
        powers, coeffs = self.terms
        cache = {}

        def pw(i, e):
            if (i, e) not in cache:
                cache[(i, e)] = x[i] if e == 1 else pw(i, e - 1) * x[i]
            return cache[(i, e)]

        total = 0.0
        for p, c in zip(powers, coeffs):
            term = None
            for i, e in enumerate(p):
                if e:
                    term = pw(i, e) if term is None else term * pw(i, e)
            total = total + c * term
        return total

    def jet(self, x, order):
        return jets.jet_eval(self, x, order)

    def value(self, x):
        return self(np.asarray(x))

    def gradient(self, x):
        return self.jet(np.asarray(x, dtype=float), 1).gradient()

    def hessian(self, x):
        return self.jet(np.asarray(x, dtype=float), 2).hessian()

    def cubic_tensor(self, x=None):
        """Third derivatives d^3 h (constant for cubics)."""
        x = np.ones(self.n) if x is None else x
        return self.jet(np.asarray(x, dtype=float), 3).derivative_tensor(3)

    def in_domain(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,) or not np.all(np.isfinite(x)):
            return False
        if not self(x) > 0:
            return False
        if self.base_point is None:
            return True
        for t in np.linspace(0.0, 1.0, SEGMENT_SAMPLES + 1)[1:-1]:
            if not self((1 - t) * self.base_point + t * x) > 0:
                return False
        return True

    def check_domain(self, x):
        if not self.in_domain(x):
            raise DomainError(f"point {np.asarray(x).tolist()} is outside the cone U of {self.name or 'h'}")

    def __repr__(self):
        return f"HomogeneousFunction(n={self.n}, k={self.k}, name={self.name!r})"


def cubic_xyz():
    return HomogeneousFunction(3, 3, terms=[([1, 1, 1], 1.0)], base_point=[1.0, 1.0, 1.0], name="xyz")


def cubic_x_xy_z2():
    """h = x(xy - z^2) = x^2 y - x z^2."""
    return HomogeneousFunction(3, 3, terms=[([2, 1, 0], 1.0), ([1, 0, 2], -1.0)],
                               base_point=[1.0, 2.0, 1.0], name="x(xy-z^2)")


def quartic_product(n=4):
    return HomogeneousFunction(n, n, terms=[([1] * n, 1.0)], base_point=[1.0] * n,
                               name="x1...x%d" % n)


def boundary_level(h, c):
    """Level of h on the boundary of U_c: -c for c <= 0, c(k-1) for c > 0."""
    return -c if c <= 0 else c * (h.k - 1)


def domain_Uc_contains(h, c, x):
    h.check_domain(x)
    hx = h.value(x)
    if c <= 0:
        return bool(hx + c > 0)
    return bool(hx - c * (h.k - 1) > 0)


def _require_Uc(h, c, x):
    h.check_domain(x)
    hx = h.value(x)
    if hx + c == 0:
        raise SingularLocusError(f"h + c vanishes at {np.asarray(x).tolist()}")
    if not domain_Uc_contains(h, c, x):
        raise DomainError(f"point {np.asarray(x).tolist()} is outside U_c for c={c}")
    return hx


def _sym(m):
    return 0.5 * (m + m.T)


def metric_gU(h, x):
    h.check_domain(x)
    return _sym(-h.hessian(x))


def log_potential(h, c):
    return lambda xs: jets.log(h(xs) + c)


def metric_gprime_c(h, c, x):
    x = np.asarray(x, dtype=float)
    _require_Uc(h, c, x)
    return _sym(-jets.jet_eval(log_potential(h, c), x, 2).hessian())


def gprime_c_field(h, c):
    """g'_c as a MetricField with the distance-to-boundary margin of U_c."""
    level = boundary_level(h, c)
    return MetricField.from_potential(log_potential(h, c), h.n, sign=-1.0,
                                      descriptor=f"g'_c of {h.name or 'h'}, c={c}",
                                      margin=lambda x: h.value(x) - level)


def gU_field(h):
    return MetricField.from_potential(h, h.n, sign=-1.0, descriptor=f"g_U of {h.name or 'h'}")


def signature(m, tol=1e-10):
    """(n_plus, n_minus, n_zero) with the tolerance scaled by the spectral radius."""
    eig = np.linalg.eigvalsh(_sym(np.asarray(m, dtype=float)))
    scale = max(1.0, float(np.max(np.abs(eig)))) if eig.size else 1.0
    t = tol * scale
    return int(np.sum(eig > t)), int(np.sum(eig < -t)), int(np.sum(np.abs(eig) <= t))


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(b))))


@dataclass
class ConeDecomposition:
    xi: np.ndarray
    g_check: np.ndarray
    residuals: dict = field(default_factory=dict)
    kernel_eigenvalue: float = 0.0
    kernel_alignment: float = 0.0
    other_eigenvalues: np.ndarray = None


def cone_decomposition(h, c, x):
    """Split g_U, g' and g'_c along the position field and report identity residuals.

    ``residuals`` holds relative max-norm residuals of
    ``gu``:      g_U = g_check - (k-1)/(k h) dh^2,
    ``gprime``:  g'  = g_check / h + dh^2 / (k h^2),
    ``gprime_c``: g'_c = g_check/(h+c) + (h - c(k-1))/(k h) dh^2/(h+c)^2,
    and the Euler identities dh(xi) = k h, g_U(xi, .) = -(k-1) dh, g_U(xi, xi) = -k(k-1) h.
    """
    x = np.asarray(x, dtype=float)
    hx = _require_Uc(h, c, x)
    k = h.k
    jet = h.jet(x, 2)
    dh = jet.gradient()
    gU = _sym(-jet.hessian())
    xi = x.copy()
    gxi = gU @ xi
    gxixi = float(xi @ gxi)
    if gxixi == 0:
        raise DegeneracyError("g_U(xi, xi) vanishes")
    g_check = _sym(gU - np.outer(gxi, gxi) / gxixi)
    dh2 = np.outer(dh, dh)
    g_prime = metric_gprime_c(h, 0.0, x) if hx > 0 else None
    g_prime_c = metric_gprime_c(h, c, x)
    res = {
        "gu": _rel(g_check - (k - 1) / (k * hx) * dh2, gU),
        "gprime": _rel(g_check / hx + dh2 / (k * hx ** 2), g_prime),
        "gprime_c": _rel(g_check / (hx + c) + (hx - c * (k - 1)) / (k * hx) * dh2 / (hx + c) ** 2,
                         g_prime_c),
        "euler_dh": abs(dh @ xi - k * hx) / max(1.0, abs(k * hx)),
        "euler_gU_xi": _rel(gxi, -(k - 1) * dh),
        "euler_gU_xixi": abs(gxixi + k * (k - 1) * hx) / max(1.0, abs(k * (k - 1) * hx)),
    }
    w, v = np.linalg.eigh(g_check)
    idx = int(np.argmin(np.abs(w)))
    unit_xi = xi / np.linalg.norm(xi)
    return ConeDecomposition(
        xi=xi,
        g_check=g_check,
        residuals=res,
        kernel_eigenvalue=float(w[idx]),
        kernel_alignment=float(abs(v[:, idx] @ unit_xi)),
        other_eigenvalues=np.delete(w, idx),
    )


def scaling_pullback_residual(h, c, lam, x):
    """Max-norm of lam^2 g'_c(lam x) - g'_{lam^-k c}(x): zero when scaling is an isometry."""
    if lam <= 0:
        raise ValueError("scale factor must be positive")
    x = np.asarray(x, dtype=float)
    lhs = lam ** 2 * metric_gprime_c(h, c, lam * x)
    rhs = metric_gprime_c(h, lam ** (-h.k) * c, x)
    return float(np.max(np.abs(lhs - rhs)))


def deformation_estimate_gap(h, c, x):
    """Smallest eigenvalue of g'_c - g' - (1/k)(1/(h+c)^2 - 1/h^2) dh^2 (nonnegative for c < 0)."""
    x = np.asarray(x, dtype=float)
    hx = _require_Uc(h, c, x)
    dh = h.gradient(x)
    diff = (metric_gprime_c(h, c, x) - metric_gprime_c(h, 0.0, x)
            - (1.0 / h.k) * (1.0 / (hx + c) ** 2 - 1.0 / hx ** 2) * np.outer(dh, dh))
    return float(np.linalg.eigvalsh(_sym(diff))[0])


def log_gradient_bound_gap(h, c, x):
    """Smallest eigenvalue of g'_c - (1/k) (d log(h+c))^2."""
    x = np.asarray(x, dtype=float)
    hx = _require_Uc(h, c, x)
    dlog = h.gradient(x) / (hx + c)
    diff = metric_gprime_c(h, c, x) - np.outer(dlog, dlog) / h.k
    return float(np.linalg.eigvalsh(_sym(diff))[0])


def cone_margin(h, x):
    """Scale-invariant h(x)/|x|^k relative to its value at the base point; 0 on the cone boundary."""
    b = h.base_point
    x = np.asarray(x, dtype=float)
    return (h.value(x) / np.linalg.norm(x) ** h.k) / (h.value(b) / np.linalg.norm(b) ** h.k)


def sample_points(h, c, rng, count, spread=0.3, level_span=(0.05, 5.0), min_cone_margin=0.05):
    """Random points of U_c: perturb the base point, then rescale onto a random level.

    The target level is ``boundary + s * (1 + |c|)`` with s log-uniform in ``level_span``.
    Directions with ``cone_margin`` below ``min_cone_margin`` are rejected: next to
    the boundary of the cone, curvature loses accuracy like cond(g)^2 * eps.
    """
    if h.base_point is None:
        raise ValueError("sampling needs a base point")
    level = max(boundary_level(h, c), 0.0)
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise RuntimeError("could not sample enough domain points")
        y = h.base_point * (1.0 + spread * rng.standard_normal(h.n))
        if not h.in_domain(y) or cone_margin(h, y) < min_cone_margin:
            continue
        s = np.exp(rng.uniform(np.log(level_span[0]), np.log(level_span[1])))
        target = level + s * (1.0 + abs(c))
        x = y * (target / h.value(y)) ** (1.0 / h.k)
        if h.in_domain(x) and domain_Uc_contains(h, c, x):
            out.append(x)
    return np.array(out)
