"""Batch experiment runner: ``skgeom --command <name> [--config cfg.json] [--seed N] [--out DIR]``.

Every command writes a JSON report (and ``curvature-table`` also a CSV) into
``--out``.  Exit status is 0 when all residuals are within tolerance, 1 when
any is not, and 2 on usage or configuration errors.  Random sampling uses
numpy's Philox counter-based generator keyed by the seed, so reports are
byte-identical for identical (config, seed).
"""

import argparse
import csv
import io
import json
import math
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
from scipy import integrate

from skgeom import curvature as curv
from skgeom import geodesics as geo
from skgeom import homogeneous as hom
from skgeom import rmap
from skgeom import special_kahler as sk
from skgeom import symplectic as sym
from skgeom.errors import ConfigError, SkgeomError

COMMANDS = ("curvature-table", "group-fuzz", "conify-check", "rmap-check", "completeness-probe")
DIGITS = 12

DEFAULTS = {
    "curvature-table": {"tolerance": 1e-8, "relative_tolerance": 1e-6, "samples": 25,
                        "polynomials": ["x(xy-z^2)", "xyz"], "c_values": [0.0, 1.0, -1.0, 0.3, -0.3]},
    "group-fuzz": {"tolerance": 1e-10, "samples": 200, "n_values": [1, 2, 3],
                   "groups": ["G", "G_SK", "G_C"]},
    "conify-check": {
        "tolerance": 1e-12, "samples": 100,
        "prepotentials": [
            {"kind": "cubic", "coeffs": [{"powers": [1, 1, 1], "coeff": 1.0}], "shift_imag": 1.0,
             "sample_base": [1.0, 1.0, 1.0]},
            {"kind": "cubic", "coeffs": [{"powers": [2, 1, 0], "coeff": 1.0}, {"powers": [1, 0, 2], "coeff": -1.0}],
             "shift_imag": -1.0, "sample_base": [1.0, 2.0, 1.0]},
            {"kind": "quadratic", "coeffs": {"real": [[1.0, 0.2], [0.2, -0.5]], "imag": [[1.0, 0.0], [0.0, 2.0]]},
             "shift_imag": 0.5, "sample_base": [0.3, 0.3]},
        ],
        "quadratic_imC": [-1.0, -1e-3, 0.0, 1e-3, 1.0],
    },
    "rmap-check": {"tolerance": 1e-10, "samples": 50, "polynomials": ["xyz", "x(xy-z^2)"],
                   "c_values": [0.0, 0.5, -0.5], "elementary_polynomials": ["x1x2x3x4"],
                   "elementary_f1_sign": 1},
    "completeness-probe": {
        "tolerance": 1e-4,
        "probes": [
            {"name": "scaling_ray_c_positive", "polynomial": "xyz", "c": 0.5, "start": [2.0, 2.0, 2.0],
             "direction": "scaling_ray", "thresholds": {"oracle_rtol": 1e-4}},
            {"name": "boundary_approach_c_negative", "polynomial": "xyz", "c": -0.5,
             "start": [464.1588833612779] * 3, "direction": "scaling_ray",
             "thresholds": {"boundary_ratio": 1e-17, "divergence_bound": 20.0}},
            {"name": "geodesic_energy", "polynomial": "xyz", "c": -0.5, "start": [1.0, 1.0, 1.0],
             "direction": [0.3, -0.2, 0.5], "t_max": 10.0, "thresholds": {"energy_drift": 1e-6}},
        ],
    },
}

CLOSED_FORMS = {
    "x(xy-z^2)": curv.scal_closed_form_x_xy_z2,
    "xyz": curv.scal_closed_form_xyz,
}


def load_schema():
    text = resources.files("skgeom").joinpath("schemas/config.schema.json").read_text()
    return json.loads(text)


def rng_for(seed):
    return np.random.Generator(np.random.Philox(seed))


def polynomial(spec):
    if isinstance(spec, str):
        builtin = {"xyz": hom.cubic_xyz, "x(xy-z^2)": hom.cubic_x_xy_z2, "x1x2x3x4": hom.quartic_product}
        return builtin[spec]()
    try:
        return hom.HomogeneousFunction.from_records(spec["terms"], spec["k"], spec["base_point"],
                                                    name=spec.get("name", "h"))
    except (ValueError, SkgeomError) as exc:
        raise ConfigError(f"bad polynomial: {exc}") from exc


def _name(spec):
    return spec if isinstance(spec, str) else spec.get("name", "h")


def clean(obj):
    """JSON-safe copy with floats rounded to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [clean(obj.real), clean(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{DIGITS}g}")
    return obj


def fmt(x):
    return f"{float(x):.{DIGITS}g}"


class Tracker:
    """Running maxima of named residuals and the list of tolerance failures."""

    def __init__(self, tol):
        self.tol = tol
        self.maxima = {}
        self.failures = []

    def record(self, name, value, case=None, tol=None):
        tol = self.tol if tol is None else tol
        value = float(value)
        self.maxima[name] = max(self.maxima.get(name, 0.0), value)
        if not value <= tol:
            self.failures.append({"check": name, "case": case, "value": value, "tolerance": tol})

    def fail(self, name, case, detail):
        self.failures.append({"check": name, "case": case, "detail": detail})


# commands


def run_curvature_table(cfg, rng):
    tr = Tracker(cfg["tolerance"])
    rows = []
    for pspec in cfg["polynomials"]:
        h = polynomial(pspec)
        closed = CLOSED_FORMS.get(_name(pspec)) if isinstance(pspec, str) else None
        for c in cfg["c_values"]:
            field = hom.gprime_c_field(h, c)
            for idx, x in enumerate(hom.sample_points(h, c, rng, cfg["samples"])):
                hx = h.value(x)
                scal = curv.scalar_curvature(field, x)
                ref = closed(hx, c) if closed else float("nan")
                err = abs(scal - ref) if closed else float("nan")
                if closed and c == 0:
                    tr.record("scal_abs_error_c0", err, case=[_name(pspec), c, idx])
                elif closed:
                    tr.record("scal_rel_error", err / max(abs(ref), 1e-300), case=[_name(pspec), c, idx],
                              tol=cfg["relative_tolerance"])
                rows.append([_name(pspec), fmt(c), ";".join(fmt(v) for v in x), fmt(hx), fmt(scal),
                             fmt(ref), fmt(err)])
    header = ["polynomial", "c", "point", "h", "scal_numeric", "scal_closed_form", "abs_err"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return {"rows": len(rows), "max_residuals": tr.maxima}, tr, {"curvature_table.csv": buf.getvalue()}


def _rel(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) / max(1.0, float(np.max(np.abs(b))))


def _random_quadratic(n, rng):
    a = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
    return sk.Prepotential.quadratic(0.5 * (a + a.T), 1j)


def run_group_fuzz(cfg, rng):
    tr = Tracker(cfg["tolerance"])
    ns, groups = cfg["n_values"], cfg["groups"]
    for i in range(cfg["samples"]):
        n = ns[i % len(ns)]
        group = groups[i % len(groups)]
        a, b, c = (sym.random_element(n, rng, group) for _ in range(3))
        ab = sym.group_mul(a, b)
        tr.record("associativity", sym.group_mul(ab, c).distance(sym.group_mul(a, sym.group_mul(b, c))), i)
        e = sym.GroupElement.identity(n)
        ainv = sym.group_inv(a)
        tr.record("inverse", max(sym.group_mul(a, ainv).distance(e), sym.group_mul(ainv, a).distance(e)), i)
        ra, rb = sym.rho(a), sym.rho(b)
        tr.record("rho_homomorphism", _rel(ra @ rb, sym.rho(ab)), i)
        Oh = sym.omega_hat(n)
        tr.record("rho_symplectic", _rel(ra.T @ Oh @ ra, Oh), i)
        basis = np.eye(2 * n + 2)
        tr.record("rho_fixes_z0", float(np.max(np.abs(ra[0] - basis[0]))), i)
        tr.record("rho_fixes_dw0", float(np.max(np.abs(ra[:, 1] - basis[1]))), i)
        back = sym.GroupElement(ra[2:, 2:], -0.5 * ra[1, 0], ra[2:, 0])
        tr.record("rho_faithful", back.distance(a), i)
        F = _random_quadratic(n, rng)
        z = rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)
        sample = sk.potential_sample(F, z)
        left = sym.act_potential(a, sym.act_potential(b, sample))
        right = sym.act_potential(ab, sample)
        tr.record("action_law", max(_rel(left.q, right.q), abs(left.f - right.f) / max(1.0, abs(right.f))), i)
        tr.record("potential_property", left.potential_residual() / max(1.0, float(np.max(np.abs(left.q)))), i)
    # symplectic invariance of F - z.w/2 for near-identity Sp elements
    cases = [("z^3", sk.Prepotential.from_function(lambda zs: zs[0] ** 3, 1), None),
             ("-xyz", sk.Prepotential.cubic(hom.cubic_xyz()), hom.cubic_xyz())]
    count = max(1, cfg["samples"] // 4)
    for name, F, h in cases:
        for i in range(count):
            X = sym.random_symplectic(F.n, rng)
            a = sym.GroupElement(X, 0.0, np.zeros(2 * F.n))
            if h is None:
                z = rng.uniform(-1, 1, 1) + 1j * rng.uniform(0.2, 1.0, 1)
            else:
                z = rng.normal(size=h.n) + 1j * hom.sample_points(h, 0.0, rng, 1)[0]
            res = sym.act_prepotential(a, F, z)
            scale = max(1.0, abs(res.F))
            tr.record("dewit_invariance", res.symplectic_residual / scale, [name, i])
            tr.record("prepotential_residual", res.prepotential_residual / scale, [name, i])
            sa = sym.random_element(F.n, rng, "G_SK")
            res = sym.act_prepotential(sa, F, z)
            tr.record("prepotential_transform", res.dewit_residual / max(1.0, abs(res.F_prime)), [name, i])
    return {"max_residuals": tr.maxima}, tr, {}


def _sample_z(spec, n, rng):
    base = np.asarray(spec.get("sample_base", [1.0] * n), dtype=float)
    x = base * np.exp(0.2 * rng.standard_normal(n))
    return rng.standard_normal(n) * 0.5 + 1j * x


def run_conify_check(cfg, rng):
    tol = cfg["tolerance"]
    tr = Tracker(tol)
    verdicts = []
    for pi, spec in enumerate(cfg["prepotentials"]):
        try:
            F = sk.Prepotential.from_spec(spec)
        except (ValueError, KeyError, TypeError, SkgeomError) as exc:
            raise ConfigError(f"bad prepotential spec #{pi}: {exc}") from exc
        if F.kind == "conified":
            F = F.data
        Fhat = F.conify()
        counts = {"kahlerian": 0, "Khat_nonzero": 0, "omega_bar_nondeg": 0}
        for i in range(cfg["samples"]):
            z = _sample_z(spec, F.n, rng)
            Z0 = np.exp(rng.uniform(-0.7, 0.7) + 1j * rng.uniform(-np.pi, np.pi))
            Z = Z0 * np.concatenate([[1.0], z])
            lam = np.exp(rng.uniform(-0.7, 0.7) + 1j * rng.uniform(-np.pi, np.pi))
            val = Fhat.value(Z)
            tr.record("homogeneity", abs(Fhat.value(lam * Z) - lam ** 2 * val) / max(1.0, abs(lam ** 2 * val)), [pi, i])
            cone = sk.conical_potential(Fhat, Z)
            tr.record("factorization", cone.factorization_residual / max(1.0, abs(cone.Khat)), [pi, i])
            tr.record("cone_metric", sk.cone_metric_residual(F, z), [pi, i], tol=1e-10)
            v = sk.nondegeneracy(F, z)
            for key in counts:
                counts[key] += int(v[key])
            if v["Khat_nonzero"]:
                paths = sk.psk_metric_paths(F, z)
                tr.record("psk_paths", _rel(paths["hessian"], paths["slice"]), [pi, i], tol=1e-10)
            g = sym.random_element(F.n, rng, "G")
            Phi = sk.cone_vector(F, z)
            before = sym.cone_form(Phi)
            tr.record("G_invariance", abs(sym.cone_form(sym.rho(g) @ Phi) - before) / max(1.0, abs(before)),
                      [pi, i], tol=1e-10)
        verdicts.append({"index": pi, "kind": F.kind, "counts": counts, "samples": cfg["samples"]})
    flips = []
    a = np.diag([1j, 2j]) + np.array([[1.0, 0.2], [0.2, -0.5]])
    for imC in cfg["quadratic_imC"]:
        F = sk.Prepotential.quadratic(a, 0.3 + 1j * imC)
        k = sk.nondegeneracy(F, np.array([0.3 + 0.1j, -0.2 + 0.4j]))["kahlerian"]
        flips.append({"imC": imC, "kahlerian": k})
        if k != (imC != 0):
            tr.fail("quadratic_flip", imC, f"kahlerian={k}")
    return {"max_residuals": tr.maxima, "verdicts": verdicts, "quadratic_flip": flips}, tr, {}


def run_rmap_check(cfg, rng):
    tr = Tracker(cfg["tolerance"])
    min_eig = {}
    for pspec in cfg["polynomials"]:
        h = polynomial(pspec)
        name = _name(pspec)
        for c in cfg["c_values"]:
            for i, x in enumerate(hom.sample_points(h, c, rng, cfg["samples"])):
                z = rng.standard_normal(h.n) + 1j * x
                A, B = rmap.deformed_rmap_paths(h, c, z)
                tr.record("path_agreement", _rel(B, A), [name, c, i])
                key = f"{name} c={fmt(c)}"
                min_eig[key] = min(min_eig.get(key, np.inf), float(np.linalg.eigvalsh(A)[0]))
                z2 = rng.standard_normal(h.n) + 1j * x
                A2, _ = rmap.deformed_rmap_paths(h, c, z2)
                tr.record("y_invariance", float(np.max(np.abs(A - A2))), [name, c, i])
                for lam in (0.5, 2.0):
                    # x must lie in U_{lam^-k c} so that lam x lies in U_c
                    xs = hom.sample_points(h, c * lam ** (-h.k), rng, 1)[0]
                    zs = rng.standard_normal(h.n) + 1j * xs
                    tr.record("scaling_isometry", rmap.scaling_pullback_residual(h, c, lam, zs), [name, c, lam, i])
        if h.k == 3:
            for i in range(cfg["samples"]):
                z = rng.standard_normal(h.n) + 1j * rng.standard_normal(h.n)
                tr.record("imh_identity", rmap.imh_identity_residual(h, z), [name, i], tol=1e-12)
    for key, value in min_eig.items():
        if not value > 0:
            tr.fail("positive_definite", key, f"min eigenvalue {value}")
    sign = cfg["elementary_f1_sign"]
    elementary = {}
    for pspec in list(cfg["polynomials"]) + list(cfg["elementary_polynomials"]):
        h = polynomial(pspec)
        name = _name(pspec)
        for c in cfg["c_values"]:
            for i, x in enumerate(hom.sample_points(h, c, rng, max(1, cfg["samples"] // 5))):
                z = rng.standard_normal(h.n) + 1j * x
                scale = max(1.0, float(np.max(np.abs(hom.metric_gprime_c(h, c, x)))))
                tr.record("elementary_deformation", rmap.elementary_deformation_residual(h, c, z, sign) / scale,
                          [name, c, i])
                other = rmap.elementary_deformation_residual(h, c, z, -sign) / scale
                elementary[f"f1_sign={-sign}"] = max(elementary.get(f"f1_sign={-sign}", 0.0), other)
    return {"max_residuals": tr.maxima, "min_eigenvalue": min_eig, "elementary_f1_sign": sign,
            "elementary_other_sign_max": elementary}, tr, {}


def ray_length_oracle(h, c, x0):
    """Length of s -> s x0 from s = 1 down to the boundary of U_c, by 1-d quadrature.

    Along the ray, g'_c(x0, x0) = -(log u)'' with u(s) = h(x0) s^k + c.
    """
    k, h0 = h.k, h.value(x0)
    s_b = (hom.boundary_level(h, c) / h0) ** (1.0 / k)

    def speed(s):
        u = h0 * s ** k + c
        return math.sqrt(max(k * h0 * s ** (k - 2) * (h0 * s ** k - (k - 1) * c), 0.0)) / u

    return integrate.quad(speed, s_b, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)[0]


def run_completeness_probe(cfg, rng):
    tr = Tracker(cfg["tolerance"])
    reports = []
    for i, p in enumerate(cfg["probes"]):
        h = polynomial(p["polynomial"])
        name = p.get("name", f"probe{i}")
        try:
            rep = geo.completeness_probe(h, p["c"], p)
        except SkgeomError as exc:
            raise ConfigError(f"probe {name}: {exc}") from exc
        th = p.get("thresholds", {})
        entry = {"name": name, "report": rep.to_dict()}
        if rep.kind == "scaling_ray" and p["c"] > 0:
            oracle = ray_length_oracle(h, p["c"], np.asarray(p["start"], dtype=float))
            rel = abs(rep.length - oracle) / oracle
            entry["oracle_length"] = oracle
            entry["oracle_rel_err"] = rel
            tr.record("ray_length_vs_oracle", rel, name, tol=th.get("oracle_rtol", cfg["tolerance"]))
            if rep.verdict != "incomplete_witness":
                tr.fail("verdict", name, rep.verdict)
        if rep.kind == "scaling_ray" and p["c"] <= 0:
            if rep.verdict != "length_exceeds_diverging_bound":
                tr.fail("verdict", name, rep.verdict)
        if rep.energy_drift is not None:
            tr.record("energy_drift", rep.energy_drift, name, tol=th.get("energy_drift", 1e-6))
        reports.append(entry)
    return {"max_residuals": tr.maxima, "probes": reports}, tr, {}


RUNNERS = {
    "curvature-table": run_curvature_table,
    "group-fuzz": run_group_fuzz,
    "conify-check": run_conify_check,
    "rmap-check": run_rmap_check,
    "completeness-probe": run_completeness_probe,
}


def build_parser():
    p = argparse.ArgumentParser(prog="skgeom", description="Special Kahler geometry experiment runner.")
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--seed", type=int, help="64-bit seed (overrides the config)")
    p.add_argument("--out", default=".", help="output directory for reports")
    p.add_argument("--tol", type=float, help="main tolerance (overrides the config)")
    p.add_argument("--command", choices=COMMANDS, help="experiment to run (overrides the config)")
    return p


def resolve_config(args):
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    try:
        jsonschema.validate(cfg, load_schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {exc.message}") from exc
    command = args.command or cfg.get("command")
    if command is None:
        raise ConfigError("no command given (use --command or the config 'command' key)")
    merged = dict(DEFAULTS[command])
    merged.update({k: v for k, v in cfg.items() if k != "command"})
    merged["command"] = command
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        merged["seed"] = args.seed
    merged.setdefault("seed", 0)
    if args.tol is not None:
        if not args.tol > 0:
            raise ConfigError("--tol must be positive")
        merged["tolerance"] = args.tol
    return merged


def run(cfg, out_dir):
    """Run one configured command, write its reports, and return the exit status."""
    command = cfg["command"]
    results, tracker, extra = RUNNERS[command](cfg, rng_for(cfg["seed"]))
    report = {
        "command": command,
        "seed": cfg["seed"],
        "config": cfg,
        "tolerance": tracker.tol,
        "results": results,
        "failures": tracker.failures,
        "passed": not tracker.failures,
    }
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = command.replace("-", "_")
    (out / f"{stem}.json").write_text(json.dumps(clean(report), indent=2, sort_keys=True) + "\n")
    for fname, text in extra.items():
        (out / fname).write_text(text)
    return report


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        report = run(cfg, args.out)
    except ConfigError as exc:
        print(f"skgeom: error: {exc}", file=sys.stderr)
        return 2
    status = "PASS" if report["passed"] else f"FAIL ({len(report['failures'])} failures)"
    print(f"{report['command']}: {status}")
    for f in report["failures"][:20]:
        print(f"  {json.dumps(clean(f), sort_keys=True)}")
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
