"""Metric fields whose components are evaluated as jets."""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from skgeom import jets
from skgeom.errors import InversionError

CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class MetricField:
    """A symmetric-matrix-valued field on an open subset of R^n.

    Either ``potential`` is given (the metric is ``sign * Hess(potential)``) or
    ``entries`` maps jet variables to an n x n nested list of jets.
    ``margin`` is positive inside the domain and tends to zero at its boundary.
    """

    n: int
    entries: Optional[Callable] = None
    potential: Optional[Callable] = None
    sign: float = -1.0
    descriptor: str = ""
    margin: Optional[Callable] = None

    @classmethod
    def from_potential(cls, potential, n, sign=-1.0, descriptor="", margin=None):
        return cls(n=n, potential=potential, sign=sign, descriptor=descriptor, margin=margin)

    @classmethod
    def from_entries(cls, entries, n, descriptor="", margin=None):
        return cls(n=n, entries=entries, descriptor=descriptor, margin=margin)

    def eval(self, x, order=2):
        """n x n nested list of jets of the metric components at ``x``."""
        x = np.asarray(x, dtype=float)
        if self.potential is not None:
            pot = jets.jet_eval(self.potential, x, order + 2)
            return [[self.sign * jets.deriv(jets.deriv(pot, i), j) for j in range(self.n)]
                    for i in range(self.n)]
        xs = jets.variables(x, order)
        rows = self.entries(xs)
        return [[e if isinstance(e, jets.Jet) else jets.Jet.constant(e, self.n, order) for e in row]
                for row in rows]

    def derivatives(self, x, order=2):
        """Arrays (g, dg, ddg) with dg[i, j, l] = d_l g_ij and ddg[i, j, l, m] = d_l d_m g_ij.

        Only the first ``order + 1`` entries are meaningful; missing ones are None.
        """
        x = np.asarray(x, dtype=float)
        out = [None, None, None]
        if self.potential is not None:
            pot = jets.jet_eval(self.potential, x, order + 2)
            for m in range(order + 1):
                out[m] = self.sign * np.real(pot.derivative_tensor(m + 2))
            return tuple(out)
        comps = self.eval(x, order)
        n = self.n
        for m in range(order + 1):
            arr = np.empty((n, n) + (n,) * m)
            for i in range(n):
                for j in range(n):
                    arr[i, j] = np.real(comps[i][j].derivative_tensor(m))
            out[m] = arr
        out[0] = 0.5 * (out[0] + out[0].T)
        return tuple(out)

    def matrix(self, x):
        return self.derivatives(x, 0)[0]


def inverse(g):
    """Inverse of a symmetric matrix with a condition-number guard."""
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise InversionError("metric is singular", cond)
    return np.linalg.solve(g, np.eye(len(g)))


def flat(n):
    return MetricField.from_potential(lambda x: 0.5 * sum(xi * xi for xi in x), n, sign=1.0,
                                      descriptor=f"euclidean R^{n}")


def half_plane():
    """Poincare half-plane metric (dx^2 + dy^2) / y^2 on y > 0."""
    def entries(x):
        inv = 1.0 / (x[1] * x[1])
        zero = inv * 0.0
        return [[inv, zero], [zero, inv]]

    return MetricField.from_entries(entries, 2, descriptor="hyperbolic half-plane",
                                    margin=lambda p: p[1])


def hermitian_to_real(H):
    """Real 2n x 2n matrix of sum H_ij dz^i dzbar^j in coordinates (y, x), z = y + i x."""
    H = np.asarray(H, dtype=complex)
    re, im = H.real, H.imag
    return np.block([[re, im], [-im, re]])
