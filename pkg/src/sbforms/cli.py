"""Batch front-end: ``sbforms <command> --job <file.json> [--out DIR] ...``.

A job file is ``{"command": ..., "params": {...}}``; command-line flags
override the matching ``params`` fields.  Every run writes ``report.json``
to the output directory, even when the job is rejected.

Exit codes: 0 all checks pass, 1 a check failed, 2 schema violation,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import fourier as fr
from . import group as grp
from . import satake as st
from . import verify as vf
from .domain import DomainError, PoleError, Realization, Region
from .fourier import CuspData, FourierMode
from .superfunc import component_from_spec, function_from_spec

COMMANDS = ("verify", "fourier-expand", "koecher-check", "satake-classify", "measure-check")
CSV_HEADER = ["I", "m", "base_re", "base_im", "value_re", "value_im"]
EXIT_PASS, EXIT_FAIL, EXIT_SCHEMA, EXIT_NUMERIC = 0, 1, 2, 3
NUMERIC_ERRORS = (DomainError, PoleError, FloatingPointError, OverflowError, ZeroDivisionError, np.linalg.LinAlgError)


class SchemaError(ValueError):
    pass


def load_schema(command):
    text = resources.files("sbforms").joinpath("schemas", f"{command}.json").read_text()
    return json.loads(text)


def job_hash(job):
    canon = json.dumps(job, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


def _complex(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def _point(rows):
    return np.array([_complex(v) for v in rows], dtype=complex)


def _s_value(s):
    return math.inf if s == "inf" else float(s)


def _index_label(I):
    return " ".join(str(i) for i in I.indices)


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


# ----------------------------------------------------------------------------
# commands: each takes (params, out_dir, plot) and returns (passed, tolerances, result)

def run_verify(params, out, plot):
    n, r, k = params["n"], params["r"], params.get("k", 3)
    suites = tuple(params.get("suites", vf.SUITES))
    unknown = [s for s in suites if s not in vf.SUITES]
    if unknown:
        raise SchemaError(f"unknown suites {unknown}")
    tol = dict(params.get("tolerances", {}))
    if "tol" in params:
        tol = {name: params["tol"] for name in suites}
    results = vf.run_suites(n, r, k, params.get("seed", 0), params.get("samples", 200), suites, tol)
    tolerances = {res.name: res.tol for res in results}
    passed = all(res.passed for res in results)
    return passed, tolerances, {"suites": [res.to_dict() for res in results]}


def run_measure_check(params, out, plot):
    n, r = params["n"], params["r"]
    rng = np.random.default_rng(params.get("seed", 0))
    g = None
    if "element" in params:
        try:
            g = grp.element_from_dict(params["element"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad group element: {exc}") from exc
        if (g.n, g.r) != (n, r) or g.realization is not Realization.BALL:
            raise SchemaError("element must be a ball element with the job's n and r")
        if not grp.is_member(g):
            raise SchemaError("element is not in the group")
    tol = params.get("tol", 1e-6)
    res = vf.density_invariance(n, r, params.get("samples", 20000), rng, params.get("half_width", 0.05), tol, g)
    return res.passed, {"density_invariance": tol}, {"suites": [res.to_dict()]}


def _fourier_inputs(params):
    try:
        f = function_from_spec(params["function"])
        cusp = CuspData.from_dict(params["cusp"])
        bases = [_point(b) for b in params["bases"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(str(exc)) from exc
    if f.realization is not Realization.HALF_PLANE:
        raise SchemaError("Fourier jobs need a half_plane function")
    if cusp.r != f.r:
        raise SchemaError(f"cusp D has {cusp.r} entries, function has r = {f.r}")
    if any(b.shape != (f.n,) for b in bases):
        raise SchemaError(f"base points must have {f.n} coordinates")
    window = params["window"]
    if window[0] > window[1]:
        raise SchemaError("window must be [lo, hi] with lo <= hi")
    return f, cusp, bases, window


def _declared_modes(spec):
    return [
        (item.get("odd_index", []), item["m"])
        for item in spec["components"]
        if item["kind"] == "fourier_mode"
    ]


def _plot_coefficients(path, records):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    by_index = {}
    for rec in records:
        by_index.setdefault(_index_label(rec.I) or "{}", []).append((rec.m, abs(rec.coefficient)))
    for label, pts in by_index.items():
        m, mag = zip(*pts)
        ax.semilogy(m, np.maximum(mag, 1e-300), "o", label=f"I = {label}")
    ax.set_xlabel("m")
    ax.set_ylabel("|c_{I,m}|")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def run_fourier_expand(params, out, plot):
    f, cusp, bases, window = _fourier_inputs(params)
    quad = params.get("quad_points", fr.DEFAULT_QUAD_POINTS)
    off = []
    for idx, m in _declared_modes(params["function"]):
        if not fr.on_lattice(cusp, idx, f.k, m, atol=1e-9):
            off.append({"I": list(idx), "m": m, "j": fr.lattice_index(cusp, idx, f.k, m)})
    table = fr.coefficient_table(f, cusp, window, bases, quad, params.get("threads", 1))
    with open(out / "coefficients.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in table:
            writer.writerow([
                _index_label(rec.I),
                repr(rec.m),
                ";".join(repr(float(v.real)) for v in rec.base),
                ";".join(repr(float(v.imag)) for v in rec.base),
                repr(rec.value.real),
                repr(rec.value.imag),
            ])
    if plot:
        _plot_coefficients(out / "coefficients.png", table)
    result = {
        "cusp": cusp.to_dict(),
        "window": list(window),
        "quad_points": quad,
        "off_lattice_modes": off,
        "coefficients": [dict(rec.to_dict(), coefficient=_pair(rec.coefficient)) for rec in table],
    }
    return not off, {"lattice_atol": 1e-9}, result


def run_koecher_check(params, out, plot):
    f, cusp, bases, window = _fourier_inputs(params)
    tol = params.get("tol", 1e-10)
    quad = params.get("quad_points", fr.DEFAULT_QUAD_POINTS)
    report = fr.koecher_check(f, cusp, window, bases, tol, quad, params.get("threads", 1))
    liouville = []
    for item in params.get("liouville", []):
        try:
            c = component_from_spec(item["c"]) if "c" in item else component_from_spec({"kind": "constant"})
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(str(exc)) from exc
        rep = fr.liouville_bound_check(c, item["m"], item["bound"], item["radii"], dim=f.n - 1)
        liouville.append({"m": item["m"], "bound": item["bound"], **rep.to_dict()})
    passed = report.passed and all(item["passed"] for item in liouville)
    result = {"koecher": report.to_dict(), "liouville": liouville}
    return passed, {"koecher": tol, "liouville_rtol": 1e-12}, result


def _plot_partials(path, norms):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for label, res in norms.items():
        ax.semilogx(res.x_maxes, res.partials, "o-", label=f"s = {label}")
    ax.set_xlabel("x_max")
    ax.set_ylabel("partial value")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def run_satake_classify(params, out, plot):
    n, k, rho = params["n"], params["k"], params["rho"]
    try:
        region = Region.from_dict(params["region"]) if "region" in params else None
        modes = [
            FourierMode(md["I"], md["m"], component_from_spec(md.get("c", {"kind": "constant"})))
            for md in params.get("modes", [])
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(str(exc)) from exc
    if region is not None and region.n != n:
        raise SchemaError(f"region has n = {region.n}, job has n = {n}")
    if any(len(md.I) != rho for md in modes):
        raise SchemaError("every mode must have |I| = rho")
    if "profile" in params:
        try:
            profile = st.GrowthProfile(**params["profile"])
        except (TypeError, ValueError) as exc:
            raise SchemaError(str(exc)) from exc
    elif modes:
        profile = st.profile_from_modes(modes, region)
    else:
        raise SchemaError("satake-classify needs a profile or a list of modes")

    x0 = params.get("x0", region.x_min if region is not None else 1.0)
    volume = region.cross_section_volume() if region is not None else 1.0
    s_values = [_s_value(s) for s in params.get("s_values", [1, 2, "inf"])]
    try:
        cls = st.classify(profile, n, k, rho, x0=x0, volume=volume)
    except ValueError as exc:
        result = {"verdict": None, "error": str(exc), "profile": profile.to_dict()}
        return False, {"stable_rtol": st.STABLE_RTOL}, result
    extra = [s for s in s_values if s not in cls.tails]
    for s in extra:
        if cls.verdict is st.Verdict.CUSP_LIKE and profile.M0 is not None:
            cls.tails[s] = st.tail_dichotomy(profile.M0, k, rho, n, s, x0, profile.C_bound, volume)
        elif cls.verdict is not st.Verdict.KOECHER_VIOLATION:
            M0 = 0.0 if cls.verdict is st.Verdict.CONSTANT_TERM_OBSTRUCTION else profile.M0
            if M0 is not None:
                cls.tails[s] = st.tail_dichotomy(M0, k, rho, n, s, x0)

    norms = {}
    if region is not None and modes:
        q = fr.synthesize(modes)
        comp = next(iter(q.values())) if len(q) == 1 else None
        if comp is None:
            raise SchemaError("modes must belong to a single multi-index")
        index = modes[0].I
        for s in s_values:
            norms[st._s_label(s)] = st.ls_norm(comp, k, index, s, region, params.get("doublings", st.DEFAULT_DOUBLINGS))
        cls.partials = [dict(res.to_dict(), s=label) for label, res in norms.items()]
    if plot and norms:
        _plot_partials(out / "partials.png", norms)

    result = cls.to_dict()
    result["profile"] = profile.to_dict()
    passed = True
    if "expect" in params:
        result["expect"] = params["expect"]
        passed = cls.verdict.value == params["expect"]
    return passed, {"stable_rtol": st.STABLE_RTOL, "x0": x0}, result


RUNNERS = {
    "verify": run_verify,
    "fourier-expand": run_fourier_expand,
    "koecher-check": run_koecher_check,
    "satake-classify": run_satake_classify,
    "measure-check": run_measure_check,
}


# ----------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="sbforms", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--job", required=True, help="JSON job file")
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.add_argument("--threads", type=int, help="worker cap for coefficient quadrature")
    p.add_argument("--seed", type=int, help="seed for random suites")
    p.add_argument("--tol", type=float, help="override the command's check tolerance")
    p.add_argument("--plot", action="store_true", help="also write static PNG plots")
    p.add_argument("--version", action="version", version=f"sbforms {__version__}")
    return p


def run(command, job, out, overrides=None, plot=False):
    """Run a parsed job; returns ``(exit_code, report)`` and writes ``report.json``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    report = {
        "tool": "sbforms",
        "version": __version__,
        "command": command,
        "job_hash": job_hash(job) if job is not None else None,
        "tolerances": {},
        "result": None,
    }
    code = EXIT_PASS
    try:
        if not isinstance(job, dict) or not isinstance(job.get("params", {}), dict):
            raise SchemaError("job must be a JSON object with a params object")
        if job.get("command", command) != command:
            raise SchemaError(f"job is for {job['command']!r}, not {command!r}")
        params = dict(job.get("params", {}))
        for key, val in (overrides or {}).items():
            if val is not None:
                params[key] = val
        jsonschema.validate({"command": command, "params": params}, load_schema(command))
        report["params"] = params
        passed, tolerances, result = RUNNERS[command](params, out, plot)
        report["tolerances"] = tolerances
        report["result"] = result
        code = EXIT_PASS if passed else EXIT_FAIL
    except (SchemaError, jsonschema.ValidationError, TypeError, AttributeError) as exc:
        code = EXIT_SCHEMA
        report["error"] = f"schema: {getattr(exc, 'message', None) or exc}"
    except NUMERIC_ERRORS as exc:
        code = EXIT_NUMERIC
        report["error"] = f"numerical: {type(exc).__name__}: {exc}"
    report["exit_code"] = code
    report["status"] = {EXIT_PASS: "pass", EXIT_FAIL: "fail", EXIT_SCHEMA: "schema_error", EXIT_NUMERIC: "numerical_error"}[code]
    _write_json(out / "report.json", report)
    return code, report


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        job = json.loads(Path(args.job).read_text())
    except (OSError, json.JSONDecodeError):
        job = None
    overrides = {"threads": args.threads, "seed": args.seed, "tol": args.tol}
    code, report = run(args.command, job, args.out, overrides, args.plot)
    print(f"sbforms {args.command}: {report['status']} -> {Path(args.out) / 'report.json'}")
    if "error" in report:
        print(report["error"], file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
