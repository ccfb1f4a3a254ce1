"""Truncated multivariate Taylor expansions (jets) up to total order 4.

A :class:`Jet` stores the Taylor coefficients ``c[alpha] = d^alpha f(p) / alpha!``
of a scalar function at a point, for every multi-index with ``|alpha| <= order``,
in a dense array laid out by a graded index table shared per ``(nvars, order)``.
Coefficients are real (float64) or complex (complex128).

Complex jets over holomorphic variables are obtained by seeding complex values;
jets over real variables with complex coefficients are used for functions of
``z = y + i x`` where conjugation acts coefficientwise (see :func:`conj`).

The truncated product is the only hot kernel.  A compiled version is used when
the extension module is available; set ``SKGEOM_PURE_PYTHON=1`` to force the
numpy fallback.
"""

import functools
import itertools
import math
import os
from typing import NamedTuple

import numpy as np

from skgeom import _jetcore_py
from skgeom.errors import EvaluationError, OrderExceededError

MAX_ORDER = 4

try:
    if os.environ.get("SKGEOM_PURE_PYTHON"):
        raise ImportError("pure python requested")
    from skgeom import _jetcore as _compiled
except ImportError:
    _compiled = None

KERNEL = "cython" if _compiled is not None else "python"
_convolve = _compiled.convolve if _compiled is not None else _jetcore_py.convolve


def set_kernel(name):
    """Select the product kernel ("cython" or "python"); returns the previous name."""
    global KERNEL, _convolve
    previous = KERNEL
    if name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled jet kernel is not available")
        _convolve = _compiled.convolve
    elif name == "python":
        _convolve = _jetcore_py.convolve
    else:
        raise ValueError(f"unknown kernel {name!r}")
    KERNEL = name
    return previous


def compiled_available():
    return _compiled is not None


class IndexTable(NamedTuple):
    nvars: int
    order: int
    indices: tuple
    lookup: dict
    degree: np.ndarray
    factorial: np.ndarray
    mul: tuple


@functools.lru_cache(maxsize=None)
def index_table(nvars, order):
    if nvars < 1:
        raise ValueError("nvars must be positive")
    if not 0 <= order <= MAX_ORDER:
        raise OrderExceededError(f"jet order must lie in 0..{MAX_ORDER}, got {order}")
    indices = []
    for d in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            alpha = [0] * nvars
            for i in combo:
                alpha[i] += 1
            indices.append(tuple(alpha))
    lookup = {alpha: k for k, alpha in enumerate(indices)}
    degree = np.array([sum(a) for a in indices], dtype=np.intp)
    factorial = np.array([math.prod(math.factorial(e) for e in a) for a in indices], dtype=float)
    ia, ib, ic = [], [], []
    for i, a in enumerate(indices):
        for j, b in enumerate(indices):
            if degree[i] + degree[j] > order:
                continue
            ia.append(i)
            ib.append(j)
            ic.append(lookup[tuple(x + y for x, y in zip(a, b))])
    mul = tuple(np.ascontiguousarray(v, dtype=np.intp) for v in (ia, ib, ic))
    return IndexTable(nvars, order, tuple(indices), lookup, degree, factorial, mul)


@functools.lru_cache(maxsize=None)
def _deriv_map(nvars, order, var):
    """Source positions and weights so that d/dx_var maps order -> order-1."""
    src_table = index_table(nvars, order)
    dst_table = index_table(nvars, order - 1)
    src = np.empty(len(dst_table.indices), dtype=np.intp)
    weight = np.empty(len(dst_table.indices))
    for k, beta in enumerate(dst_table.indices):
        alpha = list(beta)
        alpha[var] += 1
        src[k] = src_table.lookup[tuple(alpha)]
        weight[k] = alpha[var]
    return src, weight


@functools.lru_cache(maxsize=None)
def _tensor_map(nvars, order, m):
    table = index_table(nvars, order)
    kmap = np.empty((nvars,) * m, dtype=np.intp)
    for idx in itertools.product(range(nvars), repeat=m):
        alpha = [0] * nvars
        for i in idx:
            alpha[i] += 1
        kmap[idx] = table.lookup[tuple(alpha)]
    return kmap, table.factorial[kmap]


@functools.lru_cache(maxsize=None)
def _truncate_map(nvars, order):
    return np.arange(len(index_table(nvars, order).indices))


class Jet:
    """Truncated Taylor expansion of a scalar function in ``nvars`` variables."""

    __slots__ = ("nvars", "order", "coeffs")
    __array_priority__ = 1000

    def __init__(self, nvars, order, coeffs):
        self.nvars = nvars
        self.order = order
        self.coeffs = coeffs

    @classmethod
    def constant(cls, value, nvars, order, dtype=None):
        table = index_table(nvars, order)
        dtype = dtype or (complex if isinstance(value, complex) or np.iscomplexobj(value) else float)
        coeffs = np.zeros(len(table.indices), dtype=dtype)
        coeffs[0] = value
        return cls(nvars, order, coeffs)

    @classmethod
    def variable(cls, var, value, nvars, order, dtype=None):
        jet = cls.constant(value, nvars, order, dtype)
        if order >= 1:
            jet.coeffs[1 + var] = 1.0
        return jet

    @property
    def table(self):
        return index_table(self.nvars, self.order)

    @property
    def value(self):
        return self.coeffs[0]

    @property
    def is_complex(self):
        return np.iscomplexobj(self.coeffs)

    def coefficient(self, alpha):
        alpha = tuple(alpha)
        if sum(alpha) > self.order:
            raise OrderExceededError(f"|alpha| = {sum(alpha)} exceeds jet order {self.order}")
        return self.coeffs[self.table.lookup[alpha]]

    def partial(self, alpha):
        """The partial derivative d^alpha f at the expansion point."""
        alpha = tuple(alpha)
        return math.prod(math.factorial(e) for e in alpha) * self.coefficient(alpha)

    def gradient(self):
        if self.order < 1:
            raise OrderExceededError("gradient needs order >= 1")
        return self.coeffs[1:1 + self.nvars].copy()

    def hessian(self):
        return self.derivative_tensor(2)

    def derivative_tensor(self, m):
        """Symmetric array of all m-th partial derivatives."""
        if m > self.order:
            raise OrderExceededError(f"order-{m} derivatives requested from an order-{self.order} jet")
        kmap, weight = _tensor_map(self.nvars, self.order, m)
        return self.coeffs[kmap] * weight

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError("jets over different numbers of variables")
            if other.order == self.order:
                return self, other
            order = min(self.order, other.order)
            return truncate(self, order), truncate(other, order)
        return None

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            coeffs = self.coeffs.astype(np.result_type(self.coeffs, other), copy=True)
            coeffs[0] += other
            return Jet(self.nvars, self.order, coeffs)
        a, b = pair
        return Jet(a.nvars, a.order, a.coeffs + b.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.nvars, self.order, -self.coeffs)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return Jet(self.nvars, self.order, self.coeffs * other)
        a, b = pair
        ia, ib, ic = a.table.mul
        return Jet(a.nvars, a.order, _convolve(a.coeffs, b.coeffs, ia, ib, ic, len(a.coeffs)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * reciprocal(other)
        if other == 0:
            raise EvaluationError("division of a jet by zero")
        return Jet(self.nvars, self.order, self.coeffs / other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            result = Jet.constant(1.0, self.nvars, self.order, self.coeffs.dtype)
            base = self
            while p:
                if p & 1:
                    result = result * base
                p >>= 1
                if p:
                    base = base * base
            return result
        return power(self, p)

    def __repr__(self):
        return f"Jet(nvars={self.nvars}, order={self.order}, value={self.value!r})"


def truncate(jet, order):
    if order == jet.order:
        return jet
    if order > jet.order:
        raise OrderExceededError("cannot raise the order of a jet")
    keep = _truncate_map(jet.nvars, order)
    return Jet(jet.nvars, order, jet.coeffs[keep].copy())


def deriv(jet, var):
    """Jet of d f / d x_var, one order lower."""
    if jet.order < 1:
        raise OrderExceededError("cannot differentiate an order-0 jet")
    src, weight = _deriv_map(jet.nvars, jet.order, var)
    return Jet(jet.nvars, jet.order - 1, jet.coeffs[src] * weight)


def conj(x):
    """Coefficientwise conjugate; the conjugate function when the jet variables are real."""
    if isinstance(x, Jet):
        return Jet(x.nvars, x.order, np.conj(x.coeffs))
    return np.conj(x)


def real(x):
    if isinstance(x, Jet):
        return Jet(x.nvars, x.order, np.ascontiguousarray(x.coeffs.real))
    return np.real(x)


def imag(x):
    if isinstance(x, Jet):
        return Jet(x.nvars, x.order, np.ascontiguousarray(x.coeffs.imag))
    return np.imag(x)


def _series(jet, head, coefficients):
    """head + sum_m coefficients[m] * u^m with u = (jet - jet.value) / jet.value."""
    a0 = jet.value
    u = Jet(jet.nvars, jet.order, jet.coeffs / a0)
    u.coeffs[0] = 0.0
    out = Jet.constant(head, jet.nvars, jet.order, np.result_type(u.coeffs, head))
    term = None
    for m in range(1, jet.order + 1):
        term = u if term is None else term * u
        out = out + term * coefficients[m]
    if not np.all(np.isfinite(out.coeffs)):
        raise EvaluationError("non-finite jet coefficients")
    return out


def _is_zero(a0):
    return a0 == 0 or not np.isfinite(a0)


def log(x):
    if not isinstance(x, Jet):
        if np.iscomplexobj(x):
            if x == 0:
                raise EvaluationError("log(0)")
            return np.log(x)
        if x <= 0:
            raise EvaluationError(f"log of non-positive value {x!r}")
        return math.log(x)
    a0 = x.value
    if x.is_complex:
        if _is_zero(a0):
            raise EvaluationError("log of a jet with zero value")
        head = np.log(a0)
    else:
        if not a0 > 0:
            raise EvaluationError(f"log of a jet with non-positive value {a0!r}")
        head = math.log(a0)
    coefficients = [0.0] + [(-1.0) ** (m + 1) / m for m in range(1, MAX_ORDER + 1)]
    return _series(x, head, coefficients)


def power(x, p):
    """x**p for real p; real jets must be positive unless p is an integer."""
    if isinstance(p, (int, np.integer)) and p >= 0:
        return x ** int(p)
    if not isinstance(x, Jet):
        if not np.iscomplexobj(x) and x <= 0 and not float(p).is_integer():
            raise EvaluationError(f"non-integer power of non-positive value {x!r}")
        if x == 0 and p < 0:
            raise EvaluationError("negative power of zero")
        return x ** p
    a0 = x.value
    if _is_zero(a0):
        raise EvaluationError("power of a jet with zero value")
    if not x.is_complex and a0 < 0 and not float(p).is_integer():
        raise EvaluationError(f"non-integer power of a negative jet value {a0!r}")
    coefficients = [1.0]
    for m in range(1, MAX_ORDER + 1):
        coefficients.append(coefficients[-1] * (p - m + 1) / m)
    return _series(x, 1.0, coefficients) * (a0 ** p)


def reciprocal(x):
    if isinstance(x, Jet):
        if _is_zero(x.value):
            raise EvaluationError("division by a jet with zero constant term")
        return power(x, -1)
    if x == 0:
        raise EvaluationError("division by zero")
    return 1.0 / x


def sqrt(x):
    return power(x, 0.5)


def exp(x):
    if not isinstance(x, Jet):
        return np.exp(x)
    a0 = x.value
    u = Jet(x.nvars, x.order, x.coeffs.copy())
    u.coeffs[0] = 0.0
    out = Jet.constant(1.0, x.nvars, x.order, x.coeffs.dtype)
    term = None
    for m in range(1, x.order + 1):
        term = u if term is None else term * u
        out = out + term * (1.0 / math.factorial(m))
    return out * np.exp(a0)


def compose(outer, inner):
    """Substitute jets for the variables of a Taylor polynomial.

    ``outer`` is the jet of g at p; ``inner[i]`` are jets (in other variables)
    whose constant terms are p_i.  Returns the jet of g(inner) to the order of
    the inner jets, which must not exceed ``outer.order``.
    """
    if len(inner) != outer.nvars:
        raise ValueError("need one inner jet per outer variable")
    ref = next(j for j in inner if isinstance(j, Jet))
    if ref.order > outer.order:
        raise OrderExceededError("inner jets exceed the order of the outer jet")
    dtype = np.result_type(outer.coeffs, *[j.coeffs for j in inner if isinstance(j, Jet)])
    deltas = []
    for j in inner:
        if not isinstance(j, Jet):
            j = Jet.constant(j, ref.nvars, ref.order, dtype)
        d = Jet(j.nvars, j.order, j.coeffs.astype(dtype))
        d.coeffs[0] = 0.0
        deltas.append(d)
    # powers[i][e] = deltas[i] ** e
    powers = []
    for d in deltas:
        row = [Jet.constant(1.0, ref.nvars, ref.order, dtype)]
        for _ in range(ref.order):
            row.append(row[-1] * d)
        powers.append(row)
    out = np.zeros(len(index_table(ref.nvars, ref.order).indices), dtype=dtype)
    for k, alpha in enumerate(outer.table.indices):
        if sum(alpha) > ref.order or outer.coeffs[k] == 0:
            continue
        term = None
        for i, e in enumerate(alpha):
            if e:
                term = powers[i][e] if term is None else term * powers[i][e]
        if term is None:
            out[0] += outer.coeffs[k]
        else:
            out += outer.coeffs[k] * term.coeffs
    return Jet(ref.nvars, ref.order, out)


def variables(point, order, dtype=None):
    point = np.asarray(point)
    if dtype is None:
        dtype = complex if np.iscomplexobj(point) else float
    n = len(point)
    return [Jet.variable(i, point[i], n, order, dtype) for i in range(n)]


def jet_eval(f, point, order):
    """Jet of ``f`` at ``point``; ``f`` takes a sequence of jets and returns a jet or scalar.

    Complex points produce holomorphic jets (complex coefficients in z only).
    """
    point = np.asarray(point)
    if point.ndim != 1:
        raise ValueError("point must be one-dimensional")
    xs = variables(point, order)
    try:
        with np.errstate(divide="raise", invalid="raise", over="raise"):
            out = f(xs)
    except (FloatingPointError, ZeroDivisionError) as exc:
        raise EvaluationError(f"evaluation failed at {point.tolist()}: {exc}") from exc
    if not isinstance(out, Jet):
        out = Jet.constant(out, len(point), order)
    if not np.all(np.isfinite(out.coeffs)):
        raise EvaluationError(f"non-finite jet at {point.tolist()}")
    return out


def extract_partial(jet, alpha):
    return jet.partial(alpha)


def complex_hessian(fn, z, order=2):
    """Hermitian matrix d^2 f / dz^i dzbar^j of a real-valued function of z in C^n.

    ``fn`` receives jets ``z_i = y_i + 1j*x_i`` over the 2n real variables
    (y, x) and must return a real-valued jet (its imaginary part is dropped).
    Raise ``order`` when ``fn`` differentiates its input internally.
    The Wirtinger combination
    ``(f_yy + f_xx)/4 + 1j*(f_yx - f_xy)/4`` gives the result.
    """
    z = np.asarray(z, dtype=complex)
    n = len(z)
    base = np.concatenate([z.real, z.imag])
    vs = variables(base, order, complex)
    zs = [vs[i] + 1j * vs[n + i] for i in range(n)]
    out = fn(zs)
    hess = real(out).hessian() if isinstance(out, Jet) else np.zeros((2 * n, 2 * n))
    f_yy = hess[:n, :n]
    f_xx = hess[n:, n:]
    f_yx = hess[:n, n:]
    return 0.25 * (f_yy + f_xx) + 0.25j * (f_yx - f_yx.T)
