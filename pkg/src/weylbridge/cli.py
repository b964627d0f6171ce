"""``petrov``: evaluate, solve, classify and verify from the command line.

Exit codes: 0 success, 2 parse error, 3 evaluation-domain error,
4 contract violation, 5 borderline classification or failed verification.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .annihilator import NormalFormParams, SolverConfig, solve_frame_tensor, solve_lorentzian, solve_riemannian
from .chart import evaluate_vector, load_chart
from .curvature import curvature_at, frame_components, orthonormal_frame
from .errors import ChartSyntaxError, ContractViolation, EvaluationDomainError
from .petrov import classify, normal_form_fixture, random_fixture_params
from .quadform import berger_thorpe_normal_form, count_spacelike_critical_points, lorentz_weyl_via_riemann_bridge
from .registry import builtin
from .verify import SUITES, run_suite
from .weylop import WeylOperator6, annihilates, blocks, bridge_operator, build_operator

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_CONTRACT, EXIT_BORDERLINE = 0, 2, 3, 4, 5
FIXTURE_TYPES = ("I", "D", "II", "N", "III", "O")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"petrov: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _floats(text, n=None, what="value"):
    try:
        vals = [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ChartSyntaxError(f"cannot read {what} {text!r} as comma-separated numbers") from None
    if n is not None and len(vals) != n:
        raise ChartSyntaxError(f"{what} needs {n} numbers, got {len(vals)}")
    return vals


def _clean(x):
    """JSON-friendly copy with -0.0 folded to 0.0."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _clean(float(x.real)), "im": _clean(float(x.imag))}
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isinf(v):
            return "inf"
        return 0.0 if v == 0.0 else v
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _fmt(v):
    v = 0.0 if abs(v) < 1e-12 else v
    return f"{v: .9g}"


def _matrix_lines(M, indent="  "):
    return [indent + "  ".join(f"{_fmt(v):>16}" for v in row) for row in np.asarray(M)]


class Report:
    """Collects named sections and renders them as text or JSON."""

    def __init__(self):
        self.data = {}
        self.lines = []

    def add(self, key, value, text=None):
        self.data[key] = value
        if text is None:
            if isinstance(value, np.ndarray) and value.ndim == 2:
                self.lines.append(f"{key}:")
                self.lines += _matrix_lines(value)
                return
            if isinstance(value, np.ndarray):
                text = "[" + ", ".join(_fmt(v).strip() for v in value) + "]"
            else:
                text = str(value)
        self.lines.append(f"{key}: {text}")

    def note(self, text):
        self.data.setdefault("notes", []).append(text)
        self.lines.append(f"note: {text}")

    def render(self, fmt):
        if fmt == "json":
            return json.dumps(_clean(self.data), sort_keys=True, indent=2)
        return "\n".join(self.lines)


# Input resolution.

def _chart(args):
    if args.chart and args.builtin:
        raise ChartSyntaxError("give either --chart or --builtin, not both")
    if args.chart:
        return load_chart(args.chart)
    if args.builtin:
        return builtin(args.builtin)
    raise ChartSyntaxError("a chart is required: --chart FILE or --builtin NAME")


def _point(args):
    if args.point is None:
        raise ChartSyntaxError("--point is required")
    return np.array(_floats(args.point, 4, "--point"))


def _T(args, chart, point):
    if not args.t:
        return None
    parts = [p.strip() for p in args.t.split(",")]
    if len(parts) != 4:
        raise ChartSyntaxError(f"--t needs 4 comma-separated expressions, got {len(parts)}")
    return evaluate_vector(parts, chart.coords, point)


def _params(args):
    parts = args.params.split(";")
    if len(parts) != 2:
        raise ChartSyntaxError("--params takes 'l1,l2,l3;m1,m2,m3'")
    return NormalFormParams(_floats(parts[0], 3, "lambda"), _floats(parts[1], 3, "mu"))


def _fixture(args):
    t = args.fixture
    lam = mu = None
    if args.params:
        parts = args.params.split(";")
        lam = _floats(parts[0], None, "lambda")
        mu = _floats(parts[1], None, "mu") if len(parts) > 1 else None
        if t in ("II", "N"):
            lam = lam[0] if lam else None
            mu = mu[0] if mu else None
    elif t in ("I", "D", "II"):
        lam, mu, _ = random_fixture_params(t, np.random.default_rng(args.seed))
    return normal_form_fixture(t, lam, mu)


def _solver(args):
    cfg = SolverConfig(seed=args.seed)
    if args.tol is not None:
        cfg.tol = args.tol
    return cfg


def _tol(args, default):
    return args.tol if args.tol is not None else default


def _solutions(report, sols, E=None, key="solutions"):
    if not sols:
        report.add(key, [], "continuum" if sols.continuum else "none")
        return
    rows = []
    for s in sols:
        row = {"frame": s.c, "residual": s.residual, "causal": s.causal}
        if E is not None:
            row["coordinates"] = E @ s.c
        rows.append(row)
    report.data[key] = rows
    report.data[key + "_continuum"] = sols.continuum
    report.lines.append(f"{key}: {len(rows)} pair(s) up to sign" + (" (continuum detected)" if sols.continuum else ""))
    for r in rows:
        extra = "" if E is None else "  coords [" + ", ".join(_fmt(v).strip() for v in r["coordinates"]) + "]"
        report.lines.append("  +/- [" + ", ".join(_fmt(v).strip() for v in r["frame"]) + f"]  residual {r['residual']:.1e}{extra}")


def _weyl_setup(args):
    chart = _chart(args)
    point = _point(args)
    pc = curvature_at(chart, point)
    fb = orthonormal_frame(chart, point)
    op = build_operator(pc.weyl, fb)
    return chart, point, pc, fb, op


def _is_flat(pc, op):
    return float(np.linalg.norm(op.mat)) <= 1e-10 * max(1.0, pc.riemann.norm())


# Commands.

def cmd_weyl(args, report):
    chart, point, pc, fb, op = _weyl_setup(args)
    report.add("chart", chart.name or "<file>")
    report.add("signature", chart.signature)
    report.add("point", point)
    report.add("frame (columns)", fb.vectors)
    report.add("scalar curvature", float(pc.scal), _fmt(pc.scal).strip())
    report.add("operator", op.mat)
    A, B = blocks(op)
    report.add("A", A)
    report.add("B", B)
    scale = pc.riemann.norm()
    sym = pc.weyl.symmetry_residual(scale)
    tr = pc.weyl.trace_residual(pc.g, scale)
    report.add("symmetry/Bianchi residual", sym, f"{sym:.1e}")
    report.add("trace residual", tr, f"{tr:.1e}")
    if _is_flat(pc, op):
        report.note("conformally flat (Type O)")
        return EXIT_OK
    Wf = frame_components(pc.weyl.comps, fb.vectors)
    if chart.signature == "riemannian":
        sols = solve_frame_tensor(Wf, "riemannian", config=_solver(args))
        _solutions(report, sols, fb.vectors, key="annihilator")
        return EXIT_OK
    cw = classify(op)
    report.add("petrov type", cw.petrov)
    return EXIT_BORDERLINE if cw.borderline else EXIT_OK


def cmd_solve_t(args, report):
    if args.params:
        p = _params(args)
        report.add("lambda", np.array(p.lam))
        report.add("mu", np.array(p.mu))
        _solutions(report, solve_riemannian(p, _solver(args)))
        return EXIT_OK
    if args.fixture:
        op = _fixture(args)
        report.add("fixture", args.fixture)
        _solutions(report, solve_lorentzian(op, True, _solver(args)))
        return EXIT_OK
    chart, point, pc, fb, op = _weyl_setup(args)
    if _is_flat(pc, op):
        report.note("Weyl tensor vanishes: every T annihilates it")
        report.data["solutions"] = "all"
        return EXIT_OK
    if chart.signature == "lorentzian":
        report.note("Lorentzian chart: searching unit timelike T with e1 timelike")
        _solutions(report, solve_lorentzian(op, True, _solver(args)), fb.vectors)
        return EXIT_OK
    form = berger_thorpe_normal_form(op, tol=1e-7)
    report.add("lambda", np.array(form.params.lam))
    report.add("mu", np.array(form.params.mu))
    sols = solve_riemannian(form.params, _solver(args))
    # back from the normal-form frame to the chart frame
    moved = type(sols)([type(s)(form.rotation @ s.c, s.residual, s.causal) for s in sols], sols.continuum, sols.converged)
    _solutions(report, moved, fb.vectors)
    return EXIT_OK


def _lorentz_operator(args, report):
    """Lorentzian operator from a fixture, a Lorentzian chart, or a Riemannian chart bridged by T."""
    if args.fixture:
        report.add("fixture", args.fixture)
        return _fixture(args), None, None
    chart, point, pc, fb, op = _weyl_setup(args)
    T = _T(args, chart, point)
    if chart.signature == "lorentzian":
        if T is not None:
            chk = annihilates(pc.weyl.comps, T, pc.g, _tol(args, 1e-9))
            report.add("annihilation residual", chk.residual, f"{chk.residual:.1e}")
            if not chk:
                raise ContractViolation("T does not annihilate the Weyl tensor", residual=chk.residual)
        return op, pc, None
    if _is_flat(pc, op):
        return WeylOperator6(np.zeros((6, 6)), "lorentzian"), pc, None
    if T is None:
        Wf = frame_components(pc.weyl.comps, fb.vectors)
        sols = solve_frame_tensor(Wf, "riemannian", config=_solver(args))
        if not sols:
            raise ContractViolation("no annihilating unit vector T exists at this point; pass --t to choose one")
        T = fb.vectors @ sols[0].c
        report.note("T discovered by the annihilator solver")
    report.add("T", T)
    chk = annihilates(pc.weyl.comps, T, pc.g, _tol(args, 1e-9))
    report.add("annihilation residual", chk.residual, f"{chk.residual:.1e}")
    if not chk:
        raise ContractViolation("T does not annihilate the Weyl tensor", residual=chk.residual)
    opL, gL, E = bridge_operator(pc.weyl.comps, pc.g, T, "riemannian", 1)
    report.add("bridged metric", gL)
    return opL, pc, T


def cmd_classify(args, report):
    op, pc, T = _lorentz_operator(args, report)
    report.add("lorentzian operator", op.mat)
    cw = classify(op)
    report.add("petrov type", cw.petrov)
    clusters = [{"eigenvalue": c.eigenvalue, "algebraic": c.algebraic, "geometric": c.geometric}
                for c in cw.clusters]
    report.add("eigenvalues", clusters, "; ".join(
        f"{_fmt(c.eigenvalue.real).strip()}{'+' if c.eigenvalue.imag >= 0 else '-'}{_fmt(abs(c.eigenvalue.imag)).strip()}i"
        f" (x{c.algebraic}, {c.geometric} eigenvector{'s' if c.geometric > 1 else ''})" for c in cw.clusters))
    if cw.petrov != "O":
        cc = count_spacelike_critical_points(op, cw=cw)
        report.add("spacelike critical points", cc.label)
    if T is not None:
        report.add("type in {I, D}", cw.petrov in ("I", "D"), str(cw.petrov in ("I", "D")))
    if cw.petrov in ("II", "N", "III"):
        report.note("no timelike annihilator exists for this type")
    for n in cw.notes:
        report.note(n)
    if cw.borderline:
        report.note("eigenstructure is within tolerance of a different type")
        return EXIT_BORDERLINE
    return EXIT_OK


def cmd_critical_points(args, report):
    op, pc, T = _lorentz_operator(args, report)
    cc = count_spacelike_critical_points(op, oracle=args.oracle, seed=args.seed)
    report.add("petrov type", cc.petrov)
    report.add("spacelike critical points", cc.label)
    if cc.oracle is not None:
        lab = "inf" if math.isinf(cc.oracle) else str(int(cc.oracle))
        report.add("search oracle", lab)
        report.add("oracle agrees", cc.agrees, str(cc.agrees))
    wit = [{"plane": w.plane, "value": w.value, "a": w.lagrange[0], "b": w.lagrange[1]} for w in cc.witnesses]
    report.data["witnesses"] = wit
    for w in wit:
        report.lines.append("  plane [" + ", ".join(_fmt(v).strip() for v in w["plane"]) +
                            f"]  value {_fmt(w['value']).strip()}  (a, b) = ({_fmt(w['a']).strip()}, {_fmt(w['b']).strip()})")
    if cc.borderline or not cc.agrees:
        return EXIT_BORDERLINE
    return EXIT_OK


def cmd_normal_form(args, report):
    chart, point, pc, fb, op = _weyl_setup(args)
    if chart.signature == "riemannian":
        form = berger_thorpe_normal_form(op, pairing=args.pairing, tol=1e-7)
        report.add("rotation", form.rotation)
        report.add("lambda", np.array(form.params.lam))
        report.add("mu", np.array(form.params.mu))
        report.add("W+ eigenvalues", form.alpha)
        report.add("W- eigenvalues", form.beta)
        report.add("normal form", form.normal)
        report.add("pattern residual", form.pattern_residual, f"{form.pattern_residual:.1e}")
        return EXIT_OK
    T = _T(args, chart, point)
    if T is None:
        raise ContractViolation("a Lorentzian chart needs --t (unit timelike, annihilating) for the bridge normal form")
    chk = annihilates(pc.weyl.comps, T, pc.g, _tol(args, 1e-9))
    if not chk:
        raise ContractViolation("T does not annihilate the Weyl tensor", residual=chk.residual)
    opT, g, E = bridge_operator(pc.weyl.comps, pc.g, T, "lorentzian", chart.orientation)
    rec = lorentz_weyl_via_riemann_bridge(opT)
    report.add("bridged metric", g)
    report.add("rotation", rec.form.rotation)
    report.add("lambda", np.array(rec.form.params.lam))
    report.add("mu", np.array(rec.form.params.mu))
    report.add("reconstruction error", rec.reconstruction_error, f"{rec.reconstruction_error:.1e}")
    return EXIT_OK


def cmd_verify(args, report):
    names = SUITES if args.suite == "all" else (args.suite,)
    ok = True
    results = []
    for name in names:
        res = run_suite(name, seed=args.seed, scale=args.scale)
        ok &= res.passed
        results.append(res.as_dict())
        for c in res.checks:
            report.lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {name}: {c.name} ({c.detail})")
    report.data["suites"] = results
    report.data["passed"] = ok
    return EXIT_OK if ok else EXIT_BORDERLINE


COMMANDS = {
    "weyl": cmd_weyl,
    "solve-t": cmd_solve_t,
    "classify": cmd_classify,
    "critical-points": cmd_critical_points,
    "normal-form": cmd_normal_form,
    "verify": cmd_verify,
}


def build_parser():
    p = _Parser(prog="petrov", description="Weyl tensor, annihilating vectors and Petrov types at a point.")
    p.add_argument("--version", action="version", version=f"petrov {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--format", choices=("human", "json"), default="human")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--tol", type=float, default=None)
        if name == "verify":
            s.add_argument("suite", choices=SUITES + ("all",))
            s.add_argument("--scale", type=float, default=1.0, help="fraction of the full sample sizes")
            continue
        s.add_argument("--chart", help="chart document (TOML)")
        s.add_argument("--builtin", help="builtin chart, e.g. paper-example or product(1,-1)")
        s.add_argument("--point", help="comma-separated coordinates")
        s.add_argument("--t", help="four comma-separated component expressions for T")
        if name in ("solve-t", "classify", "critical-points"):
            s.add_argument("--fixture", choices=FIXTURE_TYPES, help="use a Lorentzian normal-form fixture")
            s.add_argument("--params", help="'l1,l2,l3;m1,m2,m3' (or 'lam;mu' for II)")
        if name == "critical-points":
            s.add_argument("--oracle", action="store_true", help="cross-check with the multistart search")
        if name == "normal-form":
            s.add_argument("--pairing", choices=("descending", "opposite"), default="descending")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report = Report()
    try:
        code = COMMANDS[args.command](args, report)
    except ChartSyntaxError as err:
        print(f"petrov: parse error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except EvaluationDomainError as err:
        print(f"petrov: domain error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except ContractViolation as err:
        extra = f" (residual {err.residual:.3e})" if getattr(err, "residual", None) is not None else ""
        print(f"petrov: contract violation: {err}{extra}", file=sys.stderr)
        return EXIT_CONTRACT
    print(report.render(args.format))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
