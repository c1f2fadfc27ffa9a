"""Command-line front end: ``ymforms <command> [scenario] [flags]``.

Exit codes: 0 every asserted check passed, 1 some check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys

import numpy as np

from .checks import CHECKS, Context, perturbed_bpst_profile, run_checks
from .forms import basis, basis_name
from .hodge import QuadratureSpec, build_star_table, get_metric
from .scenario import CheckResult, Report, ScenarioError, bundled_scenarios, load_scenario
from .variational import (
    ConvergenceError,
    directional_derivative,
    eb_inner,
    extract_eb,
    functional,
    optimize_profile,
    random_bump_direction,
)
from .yang_mills import current, curvature, residual_report_csv

COMMANDS = ("verify", "star-table", "current", "fields", "functional", "critical-check", "optimize-profile")


class InputError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ymforms", description="Yang-Mills checks on matrix-valued forms over C^2.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("scenario", nargs="?", help="scenario JSON file or bundled name (%s)" % ", ".join(bundled_scenarios()))
    p.add_argument("--metric", choices=("euclidean", "minkowski"))
    p.add_argument("--tolerance", type=float, help="override every check tolerance")
    p.add_argument("--points", type=int, help="number of sample points")
    p.add_argument("--radius", type=float, help="quadrature half-width R")
    p.add_argument("--nodes", type=int, help="quadrature nodes per axis")
    p.add_argument("--trace", choices=("matrix", "state"))
    p.add_argument("--seed", type=int)
    p.add_argument("--json", action="store_true", help="structured summary on stdout")
    p.add_argument("--checks", help="comma-separated subset of checks for verify")
    p.add_argument("--output", help="write CSV output here instead of stdout")
    p.add_argument("--directions", type=int, default=5, help="bump directions for critical-check")
    p.add_argument("--mu", type=float, default=1.0, help="BPST scale for optimize-profile")
    p.add_argument("--perturb", type=float, default=0.1, help="relative knot perturbation for optimize-profile")
    return p


def _scenario(args):
    if args.scenario is None:
        raise InputError(f"command {args.command!r} needs a scenario")
    sc = load_scenario(args.scenario)
    if args.metric:
        sc.metric = get_metric(args.metric).name
    if args.points is not None:
        if args.points < 1:
            raise InputError("--points must be positive")
        sc.points = args.points
    if args.seed is not None:
        sc.seed = args.seed
    if args.trace:
        sc.trace = type(sc.trace).parse(args.trace)
    if args.radius is not None or args.nodes is not None:
        q = sc.quadrature
        try:
            sc.quadrature = dataclasses.replace(
                q,
                radius=q.radius if args.radius is None else args.radius,
                nodes_per_axis=q.nodes_per_axis if args.nodes is None else args.nodes,
            )
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    if args.tolerance is not None:
        sc.tolerance = args.tolerance
    return sc


def _emit_csv(text: str, args, out) -> None:
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)


def _summary_stream(args, out):
    """CSV owns stdout unless it goes to a file or the summary is JSON."""
    return out if (args.json or args.output) else sys.stderr


def _csv_stream(args, out):
    return io.StringIO() if args.json and not args.output else out


def _finish(rep: Report, args, out, extra: dict | None = None) -> int:
    if args.json:
        data = rep.to_json()
        if extra:
            data.update(extra)
        out.write(json.dumps(data, indent=2, default=str) + "\n")
    else:
        out.write(rep.summary() + "\n")
    return rep.exit_code


def cmd_verify(args, out) -> int:
    sc = _scenario(args)
    names = sc.checks
    if args.checks:
        names = [c.strip() for c in args.checks.split(",") if c.strip()]
        bad = [c for c in names if c not in CHECKS]
        if bad:
            raise InputError(f"unknown checks {bad}; known: {sorted(CHECKS)}")
    if not names:
        raise InputError("scenario lists no checks")
    rep = run_checks(Context(sc), names)
    return _finish(rep, args, out)


def cmd_star_table(args, out) -> int:
    m = get_metric(args.metric or (load_scenario(args.scenario).metric if args.scenario else "euclidean"))
    table = build_star_table(m)
    rows = []
    for p in range(5):
        for b in basis(p):
            img = table.image(b)
            terms = [f"{_fmt(c)} {basis_name(k) or '1'}" for k, c in img.items()]
            rows.append({"degree": p, "form": basis_name(b) or "1", "star": " + ".join(terms)})
    if args.json:
        out.write(json.dumps({"metric": m.name, "vol": _fmt(table.vol), "rows": rows}, indent=2) + "\n")
    else:
        out.write(f"Hodge star, {m.name} metric (vol = {_fmt(table.vol)} dz1^dz2^dzb1^dzb2)\n")
        for r in rows:
            out.write(f"  *({r['form']}) = {r['star']}\n")
    return 0


def _fmt(c: complex) -> str:
    c = complex(c)
    re, im = round(c.real, 12) + 0.0, round(c.imag, 12) + 0.0
    if im == 0:
        return f"{re:g}"
    if re == 0:
        return f"{im:g}i"
    return f"({re:g}{im:+g}i)"


def cmd_current(args, out) -> int:
    sc = _scenario(args)
    ctx = Context(sc)
    A = ctx.connection
    if A is None:
        raise InputError("scenario has no connection")
    z1, z2 = ctx.points()
    Jg = current(A, sc.metric, "generic").form(z1, z2)
    Jc = current(A, sc.metric, "closed-form").form(z1, z2)
    names = ["J1", "J2", "J1b", "J2b"]
    cols = {f"|{n}|": np.linalg.norm(Jg.data[:, k], axis=(-2, -1)) for k, n in enumerate(names)}
    gap = np.max(np.abs(Jg.data - Jc.data), axis=(-3, -2, -1))
    cols["closed_form_gap"] = gap
    _emit_csv(residual_report_csv(z1, z2, cols), args, _csv_stream(args, out))
    rel = float(np.max(gap) / max(1.0, np.max(np.abs(Jg.data))))
    tol = sc.tolerance or 1e-12
    rep = Report(sc.name, sc.seed, sc.metric, [
        CheckResult("current-crosscheck", "pass" if rel <= tol else "fail", rel, tol, z1.size,
                    "closed form vs generic, relative"),
        CheckResult("current-norm", "info", float(np.max(Jg.norm())), None, z1.size, "max ||J||"),
    ])
    return _finish(rep, args, _summary_stream(args, out))


def cmd_fields(args, out) -> int:
    sc = _scenario(args)
    ctx = Context(sc)
    A = ctx.connection
    if A is None:
        raise InputError("scenario has no connection")
    z1, z2 = ctx.points()
    fp = extract_eb(curvature(A), z1, z2)
    eb = eb_inner(fp, sc.trace)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["x0", "x1", "x2", "x3"] + [f"|E{j}|" for j in (1, 2, 3)] + [f"|B{j}|" for j in (1, 2, 3)]
               + ["EB_re", "EB_im"])
    for i in range(z1.size):
        row = [z1[i].real, z1[i].imag, z2[i].real, z2[i].imag]
        row += [np.linalg.norm(fp.E[j][i]) for j in range(3)] + [np.linalg.norm(fp.B[j][i]) for j in range(3)]
        row += [eb[i].real, eb[i].imag]
        w.writerow([f"{x:.12g}" for x in row])
    _emit_csv(buf.getvalue(), args, _csv_stream(args, out))
    rep = Report(sc.name, sc.seed, sc.metric, [
        CheckResult("eb-inner", "info", float(np.max(np.abs(eb))), None, z1.size, "max |<E,B>|"),
    ])
    return _finish(rep, args, _summary_stream(args, out))


def cmd_functional(args, out) -> int:
    sc = _scenario(args)
    ctx = Context(sc)
    A = ctx.connection
    if A is None:
        raise InputError("scenario has no connection")
    try:
        val = functional(A, None, sc.metric, sc.quadrature, sc.trace)
    except ConvergenceError as exc:
        rep = Report(sc.name, sc.seed, sc.metric, [CheckResult("functional", "fail", float("inf"), None, 0, str(exc))])
        return _finish(rep, args, out)
    tol = sc.tolerance or 1e-8
    scale = max(1.0, abs(val.value))
    rep = Report(sc.name, sc.seed, sc.metric, [
        CheckResult("functional", "info", abs(val.value), None, 0,
                    f"H = {val.value.real:.10g}{val.value.imag:+.3g}i, field term {val.field_term.real:.10g}"),
        CheckResult("functional-split", "pass" if val.split_gap <= tol * scale else "fail", val.split_gap / scale,
                    tol, 0, "H against (A, -J) + 1/2 (F, F), relative"),
    ])
    return _finish(rep, args, out, {"H": [val.value.real, val.value.imag], "quadrature": sc.quadrature.to_json()})


def cmd_critical_check(args, out) -> int:
    sc = _scenario(args)
    ctx = Context(sc)
    A = ctx.connection
    if A is None:
        raise InputError("scenario has no connection")
    if args.directions < 1:
        raise InputError("--directions must be positive")
    tol = sc.tolerance or 1e-3
    q = sc.quadrature
    quad = QuadratureSpec(q.radius, q.nodes_per_axis, "midpoint")
    rep = Report(sc.name, sc.seed, sc.metric)
    for k in range(args.directions):
        B = random_bump_direction(A.dim, sc.seed * 100 + k, radius=q.radius, degree=1, scale=0.3)
        d = directional_derivative(A, B, None, sc.metric, quad, sc.trace)
        worst = max(abs(d.finite_difference), abs(d.finite_difference - d.inner)) / d.scale
        rep.checks.append(CheckResult(f"direction-{k}", "pass" if worst <= tol else "fail", worst, tol, 0,
                                      f"dH/dt {d.finite_difference.real:.4g}, (B, D*F - J) {d.inner.real:.4g}, "
                                      f"||D_A B|| ||F|| {d.scale:.4g}"))
    return _finish(rep, args, out)


def cmd_optimize_profile(args, out) -> int:
    if not args.mu > 0:
        raise InputError("--mu must be positive")
    init = perturbed_bpst_profile(args.mu, args.perturb)
    res = optimize_profile(init)
    _emit_csv(res.history_csv(), args, _csv_stream(args, out))
    H = [h["H"] for h in res.history]
    mono = bool(np.all(np.diff(H) <= 0))
    ratio = res.initial_residual / max(res.final_residual, 1e-300)
    rep = Report("optimize-profile", 0, "euclidean", [
        CheckResult("residual-drop", "pass" if ratio >= 10 else "fail", 1 / ratio, 0.1, len(H),
                    f"{res.initial_residual:.3g} -> {res.final_residual:.3g}"),
        CheckResult("H-monotone", "pass" if mono else "fail", 0.0 if mono else 1.0, 0.0, len(H),
                    f"{H[0]:.6g} -> {H[-1]:.6g}"),
    ])
    extra = {"knots": res.profile.knots.tolist(), "values": res.profile.values.tolist(), "stalled": res.stalled}
    return _finish(rep, args, _summary_stream(args, out), extra)


HANDLERS = {
    "verify": cmd_verify,
    "star-table": cmd_star_table,
    "current": cmd_current,
    "fields": cmd_fields,
    "functional": cmd_functional,
    "critical-check": cmd_critical_check,
    "optimize-profile": cmd_optimize_profile,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return HANDLERS[args.command](args, out)
    except (InputError, ScenarioError, FileNotFoundError) as exc:
        problems = getattr(exc, "problems", [str(exc)])
        if args.json:
            out.write(json.dumps({"status": "input-error", "problems": problems}, indent=2) + "\n")
        else:
            for p in problems:
                print(f"ymforms: error: {p}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
