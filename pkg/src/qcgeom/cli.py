"""Command-line driver: every verification as a subcommand with a JSON (or text) report.

Exit status is 0 when every verdict passes, 1 when any fails and 2 on bad
arguments.  Reports are deterministic for a given command line and seed; wall
time is only included with ``--timing``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__

SCHEMA = "qcgeom.report/1"

# closed forms checked by default, per metric kind
_CLOSED_FORMS = {
    "qk": ("Phi",),
    "spin7": ("Psi",),
    "hk4": ("F1", "F2", "F3"),
    "hk8": ("F1", "F2", "F3"),
    "hpk4": ("Omega1", "Omega2", "Omega3"),
}
# parallel forms whose annihilation by the holonomy surrogate is reported
_PARALLEL_FORMS = {
    "qk": ("Phi",),
    "spin7": ("Psi",),
    "hk4": ("F1", "F2", "F3"),
    "hk8": ("F1", "F2", "F3"),
    "hpk4": ("Omega1", "Omega2", "Omega3"),
}


class UsageError(Exception):
    """Bad arguments detected after parsing."""


def _verdict(name: str, passed: bool, residual=None, exact: bool = False, seed=None, witness=None) -> dict:
    v = {"name": name, "passed": bool(passed), "exact": exact, "seed": seed}
    if witness is not None:
        v["witness"] = witness
    else:
        v["residual"] = residual
    return v


def _exact_verdicts(checks, seed=None) -> List[dict]:
    return [_verdict(c.name, c.passed, c.residual, exact=True, seed=seed) for c in checks]


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        f = float(x)
        return f if math.isfinite(f) else str(f)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if x is None or isinstance(x, str):
        return x
    return str(x)


# -- parameter plumbing ----------------------------------------------------------------------


def _metric_params(args) -> Dict[str, float]:
    p = {}
    for k in ("a", "a1", "a2", "a3", "b", "c", "C", "tau"):
        v = getattr(args, k, None)
        if v is not None:
            p[k] = v
    if getattr(args, "n", None) is not None:
        p["n"] = args.n
    for item in getattr(args, "param", None) or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        try:
            p[key.strip()] = float(val)
        except ValueError:
            raise UsageError(f"--param {key}: not a number: {val!r}") from None
    return p


def _build_metric(args):
    from .metrics import build

    if not args.metric:
        raise UsageError("--metric is required")
    try:
        return build(args.metric, **_metric_params(args))
    except (KeyError, TypeError) as e:
        raise UsageError(str(e)) from None


def _coord(m):
    from .curvature import CoordMetric

    if m.chart is None:
        raise UsageError(f"{m.name} has no coordinate chart")
    return CoordMetric.from_cohom(m)


def _floats(text: str, what: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None


# -- subcommands ------------------------------------------------------------------------------


def cmd_verify_example(args):
    from .qcexamples import verify_example

    rep = verify_example(args.example)
    return _exact_verdicts(rep.checks), {"target": rep.target, "algebra": rep.algebra, "info": rep.info}


def cmd_verify_heisenberg(args):
    from .qcexamples import verify_heisenberg

    rep = verify_heisenberg(args.n or 1)
    return _exact_verdicts(rep.checks), {"target": rep.target, "algebra": rep.algebra, "info": rep.info}


def cmd_jacobi_all(args):
    from .lie import REGISTRY, get_algebra, jacobi_check, load_algebra_file

    algebras = [get_algebra(k) for k in REGISTRY]
    if args.algebra:
        try:
            algebras.append(load_algebra_file(args.algebra))
        except (OSError, ValueError) as e:
            raise UsageError(f"--algebra: {e}") from None
    verdicts, details = [], {}
    for L in algebras:
        r = jacobi_check(L)
        witness = None if r.passed else r.as_dict()["residuals"]
        verdicts.append(_verdict(f"d^2 = 0 on {L.name}", r.passed, "0" if r.passed else None, exact=True,
                                 witness=witness))
        details[L.name] = {"dim": L.dim}
    return verdicts, {"algebras": details}


def cmd_build_metric(args):
    from .metrics import export_json

    m = _build_metric(args)
    doc = json.loads(export_json(m, samples=args.samples if args.samples is not None else 3, seed=args.seed))
    worst = 0.0
    for s in doc["samples"]:
        g = np.array(s["g"])
        worst = max(worst, float(np.linalg.cond(g)))
    ok = bool(doc["samples"]) and worst < 1e12
    return [_verdict("metric nondegenerate at sample points", ok, worst, seed=args.seed)], {"metric": doc}


def cmd_check_closed(args):
    from .metrics import closedness_check

    m = _build_metric(args)
    tol = args.tol if args.tol is not None else 1e-8
    samples = args.samples if args.samples is not None else 20
    forms = [args.form] if args.form else list(_CLOSED_FORMS.get(m.kind, ()))
    for f in forms:
        if f not in m.forms:
            raise UsageError(f"{m.name} has no form {f!r}; known: {sorted(m.forms)}")
    exact = m.exact_frame is not None
    verdicts, details = [], {}
    for f in forms:
        r = closedness_check(m, f, samples=samples, seed=args.seed, exact=exact)
        verdicts.append(_verdict(f"d{f} = 0", r.max_residual <= tol, r.max_residual, exact=exact, seed=args.seed))
        details[f] = r.as_dict()
    return verdicts, {"metric": m.name, "params": m.params, "tol": tol, "forms": details}


def cmd_check_einstein(args):
    from .curvature import einstein_fit

    m = _build_metric(args)
    tol = args.tol if args.tol is not None else 1e-5
    fit = einstein_fit(_coord(m), samples=args.samples if args.samples is not None else 20, seed=args.seed)
    verdicts = [_verdict("Ric = lambda g", fit.residual <= tol, fit.residual, seed=args.seed)]
    expected = args.expect_lambda
    if expected is None:
        expected = m.expected.get("einstein_constant")
    if expected is not None:
        err = abs(fit.lam - expected) / max(1.0, abs(expected))
        verdicts.append(_verdict(f"lambda = {expected:g}", err <= tol, err, seed=args.seed))
    details = fit.as_dict()
    details["params"] = m.params
    details["expected_lambda"] = expected
    if "einstein_constant_stated" in m.expected:
        details["stated_lambda"] = m.expected["einstein_constant_stated"]
    return verdicts, details


def cmd_check_ricci_flat(args):
    from .curvature import ricci_flat_check

    m = _build_metric(args)
    tol = args.tol if args.tol is not None else 1e-6
    r = ricci_flat_check(_coord(m), samples=args.samples if args.samples is not None else 20, seed=args.seed)
    verdicts = [_verdict("Ric = 0", r["max_ricci"] <= tol, r["max_ricci"], seed=args.seed)]
    if m.expected.get("flat"):
        verdicts.append(_verdict("Riemann = 0", r["max_riemann"] <= tol, r["max_riemann"], seed=args.seed))
    r["params"] = m.params
    return verdicts, r


def cmd_holonomy(args):
    from .curvature import holonomy_estimate

    m = _build_metric(args)
    tol = args.tol if args.tol is not None else 1e-8
    names = [args.form] if args.form else list(_PARALLEL_FORMS.get(m.kind, ()))
    forms = {k: m.forms[k] for k in names if k in m.forms}
    rep = holonomy_estimate(_coord(m), samples=args.samples if args.samples is not None else 4, seed=args.seed,
                            forms=forms)
    verdicts = [_verdict("rank gaps resolved", not rep.unstable, min(rep.span_gap, rep.closure_gap), seed=args.seed)]
    for k, v in rep.annihilation.items():
        verdicts.append(_verdict(f"holonomy surrogate annihilates {k}", v <= tol, v, seed=args.seed))
    if m.expected.get("holonomy") == "spin7":
        verdicts.append(_verdict("curvature span rank >= 16", rep.span_rank >= 16, rep.span_rank, seed=args.seed))
        verdicts.append(_verdict("closure dimension = 21", rep.closure_dim == 21, rep.closure_dim, seed=args.seed))
    details = rep.as_dict()
    details["params"] = m.params
    return verdicts, details


def cmd_solve_ode(args):
    from .evolution import convergence_order, get_family, get_system, integrate, oracle_compare

    tol = args.tol if args.tol is not None else 1e-10
    if args.family:
        try:
            fam = get_family(args.family)
            p = fam.params(**_family_params(args, fam))
        except KeyError as e:
            raise UsageError(str(e.args[0])) from None
        oc = oracle_compare(fam, tol=tol, **p)
        verdicts = [
            _verdict("integration reached the end of the span", oc["status"] == "ok", oc["status"]),
            _verdict("RK4 matches the closed form", oc["max_deviation"] <= 1e-6, oc["max_deviation"]),
        ]
        details = {"oracle": oc}
        co = convergence_order(fam, **p)
        if co["exact_to_roundoff"]:
            verdicts.append(_verdict("RK4 exact to roundoff (order not observable)", True, max(co["errors"])))
        else:
            verdicts.append(_verdict("observed RK4 order >= 3.8", co["order"] >= 3.8, co["order"]))
        details["convergence"] = co
        return verdicts, details
    if not args.system:
        raise UsageError("solve-ode needs --family or --system")
    if args.y0 is None or args.t_span is None:
        raise UsageError("solve-ode --system needs --y0 and --t-span")
    try:
        sysm = get_system(args.system, args.tau)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    y0 = _floats(args.y0, "--y0")
    span = _floats(args.t_span, "--t-span")
    if len(span) != 2:
        raise UsageError("--t-span expects t0,t1")
    n_state = len(sysm.state_names) - (1 if sysm.kind == "4d" else 0)
    if len(y0) != n_state:
        raise UsageError(f"{sysm.id} expects {n_state} initial values")
    tr = integrate(sysm, y0, (span[0], span[1]), tol=tol)
    details = {
        "system": sysm.id,
        "tau": sysm.tau,
        "status": tr.status,
        "message": tr.message,
        "last_t": tr.last_t,
        "steps": tr.n_steps,
        "rejected": tr.n_rejected,
        "final_state": tr.y[-1],
    }
    return [_verdict("integration reached t1", tr.ok, tr.status)], details


def _family_params(args, fam) -> Dict[str, float]:
    p = _metric_params(args)
    unknown = [k for k in p if k not in fam.defaults]
    if unknown:
        raise UsageError(f"family {fam.id} has no parameter(s) {unknown}; known: {sorted(fam.defaults)}")
    return p


def cmd_family_residuals(args):
    from .evolution import FAMILIES, family_residuals, get_family

    tol = args.tol if args.tol is not None else 1e-10
    n = args.samples if args.samples is not None else 100
    if args.family:
        try:
            fams = [get_family(args.family)]
        except KeyError as e:
            raise UsageError(str(e.args[0])) from None
    else:
        fams = list(FAMILIES.values())
    verdicts, details = [], {}
    for fam in fams:
        p = _family_params(args, fam) if args.family else {}
        r = family_residuals(fam, n=n, **p)
        verdicts.append(_verdict(f"{fam.id} solves {r['system']}", r["max_residual"] <= tol, r["max_residual"]))
        details[fam.id] = r
    return verdicts, {"families": details, "tol": tol}


def cmd_appendix_crosscheck(args):
    from .appendix import appendix_crosscheck

    a = args.a if args.a is not None else 1.0
    rep = appendix_crosscheck(args.which, a=a, samples=args.samples if args.samples is not None else 3,
                              seed=args.seed, corrected=args.corrected)
    verdicts = [_verdict("table metric matches the frame metric", rep.metric_ok, rep.max_metric_error,
                         seed=args.seed)]
    if args.which == 2:
        worst = max(rep.curvature_entries.values()) if rep.curvature_entries else 0.0
        verdicts.append(_verdict("printed curvature forms match", rep.curvature_ok, worst, seed=args.seed))
    return verdicts, rep.as_dict()


def cmd_report_all(args):
    """The acceptance battery in one report."""
    from . import evolution as ev
    from .metrics import build

    seed = args.seed
    out: List[dict] = []
    sections: Dict[str, object] = {}

    def run(label, fn, ns):
        v, d = fn(ns)
        for x in v:
            x["name"] = f"{label}: {x['name']}"
        out.extend(v)
        sections[label] = d

    base = dict(seed=seed, tol=None, samples=None, form=None, param=None, n=None, a=None, a1=None, a2=None,
                a3=None, b=None, c=None, C=None, tau=None, metric=None, expect_lambda=None, algebra=None)
    ns = lambda **kw: argparse.Namespace(**{**base, **kw})
    for k in (1, 2, 3):
        run(f"example {k}", cmd_verify_example, ns(example=k))
    run("heisenberg", cmd_verify_heisenberg, ns())
    run("jacobi", cmd_jacobi_all, ns())
    for a in (1.0, 2.0):
        run(f"appendix1 a={a:g}", cmd_check_einstein, ns(metric="appendix1", a=a))
    run("qk_heisenberg", cmd_check_einstein, ns(metric="qk_heisenberg", a=1.0, n=1, expect_lambda=-16.0))
    run("non-QK closed", cmd_check_closed, ns(metric="qk_nonQK_family", a1=0.0, a2=1.0, a3=2.0))
    nq = cmd_check_einstein(ns(metric="qk_nonQK_family", a1=0.0, a2=1.0, a3=2.0))[1]
    out.append(_verdict("non-QK: Einstein residual >= 1e-3", nq["residual"] >= 1e-3, nq["residual"], seed=seed))
    run("appendix2 Ricci", cmd_check_ricci_flat, ns(metric="appendix2", a=1.0))
    run("appendix2 holonomy", cmd_holonomy, ns(metric="appendix2", a=1.0))
    run("families", cmd_family_residuals, ns(family=None))
    for fam in ev.FAMILIES:
        run(f"ode {fam}", cmd_solve_ode, ns(family=fam, system=None, y0=None, t_span=None))
    for name in ("hk4_eguchi_hanson", "hk4_bgpp_triaxial", "hk4_heis", "hk4_gibbons_hawking", "hk4_bianchi_vii0",
                 "hk4_bianchi_vi0", "hpk4_su2", "hpk4_su11", "hpk4_heis", "hpk4_e2", "hpk4_e11"):
        run(f"{name} closed", cmd_check_closed, ns(metric=name))
        run(f"{name} Ricci", cmd_check_ricci_flat, ns(metric=name))
    for name in ("hk8_G7", "hk8_G7_flat"):
        run(f"{name} closed", cmd_check_closed, ns(metric=name))
        run(f"{name} flat", cmd_check_ricci_flat, ns(metric=name, tol=1e-8))
    sections["metrics_used"] = {k: build(k).params for k in ("appendix1", "appendix2")}
    return out, sections


# -- listing -----------------------------------------------------------------------------------


def _listing() -> dict:
    from .evolution import FAMILIES, SYSTEMS
    from .lie import list_algebras
    from .metrics import list_metrics

    return {
        "algebras": [{"name": n, "dim": d, "anchor": a} for n, d, a in list_algebras()],
        "metrics": [{"name": n, "description": d} for n, d in list_metrics()],
        "systems": [{"name": s.id, "kind": s.kind, "signature": s.signature, "description": s.description}
                    for s in SYSTEMS.values()],
        "families": [{"name": f.id, "system": f.system, "params": f.defaults, "description": f.description}
                     for f in FAMILIES.values()],
    }


# -- parser ------------------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--metric", help="registered metric name (see --list)")
    for k in ("a", "a1", "a2", "a3", "b", "c", "C", "tau"):
        g.add_argument(f"--{k}", type=float, dest=k, metavar="F")
    g.add_argument("--n", type=int, metavar="N", help="quaternionic dimension where applicable")
    g.add_argument("--param", action="append", metavar="KEY=VALUE", help="any other metric or family parameter")
    g.add_argument("--samples", type=int, metavar="N")
    g.add_argument("--seed", type=int, default=0, metavar="N")
    g.add_argument("--tol", type=float, metavar="F")
    g.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    g.add_argument("--format", choices=("json", "text"), default="json")
    g.add_argument("--algebra", metavar="PATH", help="extra algebra file (lines 'de^k = ...')")
    g.add_argument("--timing", action="store_true", help="include wall time in the report")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="qcgeom", description="Exact and numerical checks for qc geometry "
                                     "and special-holonomy metrics.")
    parser.add_argument("--version", action="version", version=f"qcgeom {__version__}")
    parser.add_argument("--list", action="store_true", help="list algebras, metrics, ODE systems and families")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("verify-example", cmd_verify_example, "exact pipeline on one of the three example groups")
    sp.add_argument("example", type=int, choices=(1, 2, 3))
    add("verify-heisenberg", cmd_verify_heisenberg, "flatness of the quaternionic Heisenberg model")
    add("jacobi-all", cmd_jacobi_all, "d^2 = 0 on every registry algebra")
    add("build-metric", cmd_build_metric, "export a metric as JSON")
    sp = add("check-closed", cmd_check_closed, "closedness of the metric's calibrating forms")
    sp.add_argument("--form", help="a single form name")
    sp = add("check-einstein", cmd_check_einstein, "fit Ric = lambda g from finite differences")
    sp.add_argument("--lambda", dest="expect_lambda", type=float, metavar="F", help="expected Einstein constant")
    add("check-ricci-flat", cmd_check_ricci_flat, "Ricci (and for flat metrics Riemann) at sample points")
    sp = add("holonomy", cmd_holonomy, "curvature span and bracket closure")
    sp.add_argument("--form", help="a single form whose annihilation is checked")
    sp = add("solve-ode", cmd_solve_ode, "integrate a system, or compare a family with RK4")
    sp.add_argument("--family")
    sp.add_argument("--system")
    sp.add_argument("--y0", metavar="V,V,..")
    sp.add_argument("--t-span", dest="t_span", metavar="T0,T1")
    sp = add("family-residuals", cmd_family_residuals, "closed-form families against their systems")
    sp.add_argument("--family")
    sp = add("appendix-crosscheck", cmd_appendix_crosscheck, "transcribed tables against the frame metric")
    sp.add_argument("which", type=int, choices=(1, 2))
    sp.add_argument("--corrected", action="store_true", help="use the corrected first table")
    add("report-all", cmd_report_all, "the acceptance battery")
    return parser


def _text(report: dict) -> str:
    lines = [f"{report['command'][0] if report['command'] else ''}: "
             f"{'PASS' if report['passed'] else 'FAIL'}"]
    for v in report["verdicts"]:
        val = v.get("residual", v.get("witness"))
        lines.append(f"{'PASS' if v['passed'] else 'FAIL'}  {v['name']}  [{val}]")
    return "\n".join(lines) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.list:
        print(json.dumps(_jsonable({"schema": SCHEMA, "list": _listing()}), indent=2))
        return 0
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return 2
    t0 = time.perf_counter()
    try:
        verdicts, details = args.func(args)
    except UsageError as e:
        print(f"qcgeom: error: {e}", file=sys.stderr)
        return 2
    report = {
        "schema": SCHEMA,
        "version": __version__,
        "command": argv,
        "seed": args.seed,
        "passed": all(v["passed"] for v in verdicts),
        "verdicts": verdicts,
        "details": details,
    }
    if args.timing:
        report["wall_time_s"] = time.perf_counter() - t0
    report = _jsonable(report)
    text = _text(report) if args.format == "text" else json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
