"""Geodesic integration, curve lengths and completeness probes."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from skgeom import homogeneous as hom
from skgeom.curvature import _connection
from skgeom.errors import DomainError, SkgeomError

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])

TIME_EXHAUSTED = "time_exhausted"
BOUNDARY_PROXIMITY = "boundary_proximity"
STEP_UNDERFLOW = "step_underflow"


@dataclass
class GeodesicOptions:
    rtol: float = 1e-11
    atol: float = 1e-13
    first_step: float = 1e-3
    min_step: float = 1e-12
    max_steps: int = 100_000
    boundary_ratio: float = 1e-8
    safety: float = 0.9


@dataclass
class Path:
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    length: np.ndarray
    energy: np.ndarray
    termination: str
    margin: np.ndarray = None

    @property
    def samples(self):
        return list(zip(self.t, self.x, self.v))

    @property
    def total_length(self):
        return float(self.length[-1])

    def energy_drift(self):
        e0 = self.energy[0]
        return float(np.max(np.abs(self.energy - e0)) / abs(e0))


class _OutOfDomain(SkgeomError):
    pass


def _rhs(g, state):
    n = g.n
    x, v = state[:n], state[n:]
    try:
        g0, dg, _ = g.derivatives(x, 1)
        gamma = _connection(g0, dg)[1]
    except SkgeomError as exc:
        raise _OutOfDomain(str(exc)) from exc
    acc = -np.einsum("kij,i,j->k", gamma, v, v)
    return np.concatenate([v, acc])


def _energy(g, x, v):
    return float(v @ g.matrix(x) @ v)


def integrate_geodesic(g, x0, v0, t_max, opts=None):
    """Integrate x'' + Gamma(x', x') = 0 from (x0, v0) with an adaptive DP5(4) pair.

    Stops when t_max is reached, when the field's margin falls below
    ``boundary_ratio`` times its initial value, or when the step size
    underflows ``min_step``.
    """
    opts = opts or GeodesicOptions()
    n = g.n
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if not np.any(v0):
        raise ValueError("initial velocity must be nonzero")
    margin0 = None
    if g.margin is not None:
        margin0 = g.margin(x0)
        if not margin0 > 0:
            raise DomainError(f"initial point {x0.tolist()} lies outside the metric's domain")
    try:
        y = np.concatenate([x0, v0])
        k1 = _rhs(g, y)
        e0 = _energy(g, x0, v0)
    except _OutOfDomain as exc:
        raise DomainError(f"metric cannot be evaluated at the initial point: {exc}") from exc

    ts, xs, vs, energies, margins = [0.0], [x0], [v0], [e0], [margin0 if margin0 is not None else np.nan]
    lengths = [0.0]
    t = 0.0
    step = min(opts.first_step, t_max)
    err_prev = 1.0
    termination = TIME_EXHAUSTED
    for _ in range(opts.max_steps):
        if t >= t_max:
            break
        step = min(step, t_max - t)
        if step < opts.min_step:
            termination = STEP_UNDERFLOW
            break
        try:
            ks = [k1]
            for s in range(1, 7):
                ys = y + step * sum(a * kk for a, kk in zip(_A[s], ks))
                if g.margin is not None and not g.margin(ys[:n]) > 0:
                    raise _OutOfDomain("stage left the domain")
                ks.append(_rhs(g, ys))
            y5 = y + step * sum(b * kk for b, kk in zip(_B5, ks))
            y4 = y + step * sum(b * kk for b, kk in zip(_B4, ks))
        except _OutOfDomain:
            step *= 0.25
            continue
        scale = opts.atol + opts.rtol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.sqrt(np.mean(((y5 - y4) / scale) ** 2)))
        if err <= 1.0:
            t += step
            x_new, v_new = y5[:n], y5[n:]
            e_new = _energy(g, x_new, v_new)
            lengths.append(lengths[-1] + 0.5 * step * (math.sqrt(abs(energies[-1])) + math.sqrt(abs(e_new))))
            y = y5
            k1 = ks[6]
            ts.append(t)
            xs.append(x_new)
            vs.append(v_new)
            energies.append(e_new)
            m = g.margin(x_new) if g.margin is not None else np.nan
            margins.append(m)
            err_eff = max(err, 1e-10)
            factor = opts.safety * err_eff ** (-0.7 / 5) * err_prev ** (0.4 / 5)
            step *= min(5.0, max(0.2, factor))
            err_prev = err_eff
            if margin0 is not None and m < opts.boundary_ratio * margin0:
                termination = BOUNDARY_PROXIMITY
                break
        else:
            step *= max(0.1, opts.safety * err ** (-1 / 5))
    else:
        termination = STEP_UNDERFLOW if t < t_max else TIME_EXHAUSTED
    return Path(t=np.array(ts), x=np.array(xs), v=np.array(vs), length=np.array(lengths),
                energy=np.array(energies), termination=termination, margin=np.array(margins))


def _velocity(curve, t):
    from skgeom import jets

    tj = jets.Jet.variable(0, float(t), 1, 1)
    out = curve(tj)
    return np.array([o.coeffs[1] if isinstance(o, jets.Jet) else 0.0 for o in out], dtype=float)


def curve_length(g, curve, t0, t1, velocity=None, rtol=1e-10, improper=False, cap=1e6):
    """Riemannian length of ``curve`` on [t0, t1] by adaptive quadrature.

    ``curve`` maps a parameter to a point and must accept a jet parameter
    unless ``velocity`` is given.  With ``improper=True`` the endpoint t1 may
    lie on the domain boundary; the integral is then accumulated over
    intervals shrinking towards t1 and ``math.inf`` is returned once the
    running value exceeds ``cap``.
    """
    vel = velocity or (lambda t: _velocity(curve, t))

    def speed(t):
        x = np.asarray(curve(t), dtype=float)
        if g.margin is not None and not g.margin(x) > 0:
            raise DomainError(f"curve leaves the domain at t={t}")
        v = vel(t)
        return math.sqrt(max(0.0, float(v @ g.matrix(x) @ v)))

    if not improper:
        value, _ = integrate.quad(speed, t0, t1, epsrel=rtol, epsabs=0.0, limit=400)
        return float(value)
    total = 0.0
    a = t0
    for j in range(1, 60):
        b = t1 - (t1 - t0) * 2.0 ** (-j)
        piece, _ = integrate.quad(speed, a, b, epsrel=rtol, epsabs=0.0, limit=400)
        total += piece
        if total > cap:
            return math.inf
        if abs(piece) <= rtol * total:
            break
        a = b
    return float(total)


@dataclass
class ProbeSpec:
    start: np.ndarray
    direction: object  # ndarray or "scaling_ray"
    t_max: float = 10.0
    boundary_ratio: float = 1e-8
    divergence_bound: float = 20.0
    length_cap: float = 1e6
    c: float = None

    @classmethod
    def from_dict(cls, d):
        if "start" not in d or "direction" not in d:
            raise ValueError("probe needs 'start' and 'direction'")
        direction = d["direction"]
        if isinstance(direction, str):
            if direction != "scaling_ray":
                raise ValueError(f"unknown direction {direction!r}")
        else:
            direction = np.asarray(direction, dtype=float)
        th = d.get("thresholds", {})
        return cls(
            start=np.asarray(d["start"], dtype=float),
            direction=direction,
            t_max=float(d.get("t_max", 10.0)),
            boundary_ratio=float(th.get("boundary_ratio", 1e-8)),
            divergence_bound=float(th.get("divergence_bound", 20.0)),
            length_cap=float(th.get("length_cap", 1e6)),
            c=d.get("c"),
        )


@dataclass
class ProbeReport:
    kind: str
    c: float
    checkpoints: list = field(default_factory=list)
    length: float = 0.0
    final_margin: float = 0.0
    bound: float = None
    verdict: str = ""
    termination: str = ""
    energy_drift: float = None

    def to_dict(self):
        return {
            "kind": self.kind,
            "c": self.c,
            "length": self.length,
            "final_margin": self.final_margin,
            "bound": self.bound,
            "verdict": self.verdict,
            "termination": self.termination,
            "energy_drift": self.energy_drift,
            "checkpoints": self.checkpoints,
        }


def log_bound(h, c, margin_start, margin_end):
    """(1/sqrt(k)) |log(h+c) at end - log(h+c) at start| from the margins h + c."""
    return abs(math.log(margin_end) - math.log(margin_start)) / math.sqrt(h.k)


def _probe_verdict(c, checkpoints, bound, spec, reached_boundary):
    if c <= 0 and bound is not None:
        if any(cp["length"] < cp["bound"] for cp in checkpoints):
            return "bound_violated"
        if c < 0:
            if bound > spec.divergence_bound:
                return "length_exceeds_diverging_bound"
            return "length_exceeds_bound"
    if c > 0 and reached_boundary:
        return "incomplete_witness"
    return "boundary_reached" if reached_boundary else "no_boundary_reached"


def _scaling_ray_probe(h, c, spec):
    x0 = spec.start
    h0 = h.value(x0)
    level = hom.boundary_level(h, c)
    field_ = hom.gprime_c_field(h, c)
    margin0 = h0 - level
    if not margin0 > 0:
        raise DomainError("probe start lies outside U_c")
    curve = lambda s: s * x0
    vel = lambda s: x0
    checkpoints = []
    if c > 0:
        s_b = (level / h0) ** (1.0 / h.k)
        # inward ray r -> (1 - r) x0, improper at the boundary r = 1 - s_b
        length = curve_length(field_, lambda r: (1.0 - r) * x0, 0.0, 1.0 - s_b,
                              velocity=lambda r: -x0, improper=True, cap=spec.length_cap)
        checkpoints.append({"s": s_b, "length": length, "margin": 0.0, "bound": None})
        return ProbeReport(kind="scaling_ray", c=c, checkpoints=checkpoints, length=length,
                           final_margin=0.0, bound=None,
                           verdict="incomplete_witness" if math.isfinite(length) else "diverging",
                           termination=BOUNDARY_PROXIMITY)
    # c <= 0: walk towards the boundary by decades of the margin h + c
    length = 0.0
    s_prev = 1.0
    bound = 0.0
    margin = margin0
    j = 0
    while True:
        j += 1
        target = margin0 * 10.0 ** (-j)
        if target < spec.boundary_ratio * margin0:
            break
        s = ((level + target) / h0) ** (1.0 / h.k)
        length += curve_length(field_, curve, s, s_prev, velocity=vel)
        margin = h.value(curve(s)) - level
        bound = log_bound(h, c, margin0, margin)
        checkpoints.append({"s": s, "length": length, "margin": margin, "bound": bound})
        s_prev = s
        if bound > spec.divergence_bound:
            break
    report = ProbeReport(kind="scaling_ray", c=c, checkpoints=checkpoints, length=length,
                         final_margin=margin, bound=bound, termination=BOUNDARY_PROXIMITY)
    report.verdict = _probe_verdict(c, checkpoints, bound, spec, True)
    return report


def _geodesic_probe(h, c, spec):
    field_ = hom.gprime_c_field(h, c)
    opts = GeodesicOptions(boundary_ratio=spec.boundary_ratio)
    path = integrate_geodesic(field_, spec.start, spec.direction, spec.t_max, opts)
    level = hom.boundary_level(h, c)
    margin0 = h.value(spec.start) - level
    stride = max(1, len(path.t) // 50)
    checkpoints = []
    bound = None
    for i in list(range(0, len(path.t), stride)) + [len(path.t) - 1]:
        m = float(path.margin[i])
        b = log_bound(h, c, margin0, m) if c <= 0 else None
        checkpoints.append({"t": float(path.t[i]), "length": float(path.length[i]), "margin": m, "bound": b})
        bound = b
    reached = path.termination == BOUNDARY_PROXIMITY
    report = ProbeReport(kind="geodesic", c=c, checkpoints=checkpoints, length=path.total_length,
                         final_margin=float(path.margin[-1]), bound=bound, termination=path.termination)
    report.verdict = _probe_verdict(c, checkpoints, bound, spec, reached)
    report.energy_drift = path.energy_drift()
    return report


def completeness_probe(h, c, spec):
    """Probe (U_c, g'_c) along one curve; ``spec`` is a ProbeSpec or its dict form."""
    if isinstance(spec, dict):
        spec = ProbeSpec.from_dict(spec)
    if spec.c is not None:
        c = float(spec.c)
    h.check_domain(spec.start)
    if not hom.domain_Uc_contains(h, c, spec.start):
        raise DomainError("probe start lies outside U_c")
    if isinstance(spec.direction, str):
        return _scaling_ray_probe(h, c, spec)
    return _geodesic_probe(h, c, spec)
