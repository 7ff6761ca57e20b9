"""Command-line interface: ``reefdyn <command> [options]``.

Every command writes ``<command>.csv`` and ``<command>.txt`` into ``--out``
and echoes the text report to stdout. Exit status is 0 on success, 2 for
usage errors and 3 when the analysis itself fails (singular map, no
bifurcation in the requested region, unwritable output, ...).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .control import hybrid_design, hybrid_simulate, ogy_design, ogy_lines_from, ogy_simulate
from .equilibria import equilibria, interior_equilibria, residual
from .errors import ReefError
from .flip import flip_discriminants
from .model import PARAM_NAMES, MapConfig, State, validate
from .neimark_sacker import G_PARTIAL_NAMES, ns_discriminant
from .orbits import SWEEPABLE, SweepSpec, iterate, orbit_summary, sweep
from .report import (ConfigError, RunConfig, emit_csv, fmt,
                     parse_config, params_from_mapping)
from .stability import Jacobian2, classify

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'X,Y', got {text!r}") from None
    return a, b


def _range(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'LO:HI:N', got {text!r}") from None


def _common(p: argparse.ArgumentParser, delta: bool = True) -> None:
    p.add_argument("--params", metavar="FILE", help="key = value file with the model rates")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one setting (repeatable)")
    if delta:
        p.add_argument("--delta", type=float, help="step size")
    p.add_argument("--out", default=".", metavar="DIR", help="output directory")
    p.add_argument("--precision", type=int, default=6, help="decimals in CSV output")


def _point(p: argparse.ArgumentParser) -> None:
    p.add_argument("--point", type=_pair, metavar="M,C",
                   help="expand about this point verbatim instead of a computed equilibrium")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="reefdyn", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    _common(sub.add_parser("equilibria", help="all fixed points"), delta=False)

    c = sub.add_parser("classify", help="stability type of the interior equilibria")
    _common(c)
    _point(c)

    f = sub.add_parser("flip", help="period-doubling discriminants")
    _common(f)
    _point(f)
    f.add_argument("--branch", choices=("F1", "F2"), default="F1")
    f.add_argument("--mode", choices=("coupled", "frozen"), default="coupled")
    f.add_argument("--lambda2", type=float, help="override the non-critical eigenvalue")
    f.add_argument("--expand-at-delta", action="store_true",
                   help="take the Taylor expansion at --delta instead of at the flip step size")

    n = sub.add_parser("ns", help="Neimark-Sacker discriminant")
    _common(n)
    _point(n)

    o = sub.add_parser("ogy", help="OGY gain lines and stability region")
    _common(o)
    _point(o)
    o.add_argument("--jb", metavar="FILE",
                   help="key = value file with a11 a12 a21 a22 b1 b2 instead of model rates")
    o.add_argument("--gains", type=_pair, metavar="R1,R2", help="simulate with these gains")
    o.add_argument("--eps", type=float, default=0.1, help="half-width of the step-size window")
    o.add_argument("--steps", type=int, default=1000)
    o.add_argument("--ic", type=_pair, action="append", default=[], metavar="M,C")
    o.add_argument("--linear", action="store_true", help="simulate the linearised loop")

    h = sub.add_parser("hybrid", help="hybrid control design")
    _common(h)
    _point(h)
    h.add_argument("--zeta", type=float, help="simulate with this control weight")
    h.add_argument("--steps", type=int, default=10_000)
    h.add_argument("--ic", type=_pair, action="append", default=[], metavar="M,C")

    r = sub.add_parser("orbit", help="iterate and classify the attractor")
    _common(r)
    r.add_argument("--ic", type=_pair, action="append", default=[], metavar="M,C")
    r.add_argument("--transient", type=int, default=2000)
    r.add_argument("--samples", type=int, default=512)

    s = sub.add_parser("sweep", help="bifurcation diagram data")
    _common(s)
    s.add_argument("--param", choices=SWEEPABLE, default="delta")
    s.add_argument("--range", type=_range, required=True, metavar="LO:HI:N")
    s.add_argument("--ic", type=_pair, action="append", default=[], metavar="M,C")
    s.add_argument("--transient", type=int, default=2000)
    s.add_argument("--samples", type=int, default=512)
    s.add_argument("--workers", type=int, default=1)
    return ap


def _settings(args) -> dict[str, str]:
    values: dict[str, str] = {}
    if args.params:
        try:
            values.update(parse_config(Path(args.params).read_text(encoding="utf-8")))
        except OSError as exc:
            raise UsageError(f"cannot read {args.params}: {exc}") from None
    for item in args.set:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        values[k] = v
    return values


def _run_config(args, needs_delta: bool) -> RunConfig:
    values = _settings(args)
    params = params_from_mapping(values)
    v = validate(params)
    if not v.ok:
        raise UsageError("; ".join(v.violations))
    delta = getattr(args, "delta", None)
    if delta is None and "delta" in values:
        delta = float(values["delta"])
    if needs_delta and delta is None:
        raise UsageError("--delta is required")
    if delta is not None and not delta > 0:
        raise UsageError("delta must be > 0")
    if args.precision < 0:
        raise UsageError("--precision must be >= 0")
    return RunConfig(args.command, params, delta, list(getattr(args, "ic", []) or []),
                     args.out, args.precision)


def _targets(rc: RunConfig, point) -> list[tuple[str, State, bool]]:
    """Points to analyse: (label, state, is a computed equilibrium)."""
    if point is not None:
        return [("point", State(*point), False)]
    eqs = interior_equilibria(rc.params)
    if not eqs:
        raise ReefError("no interior equilibrium for these parameters")
    return [(f"E*{i + 1}", e, True) for i, e in enumerate(eqs)]


def _write(rc: RunConfig, header, rows, lines: list[str], stem: str | None = None) -> str:
    out = Path(rc.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = stem or rc.command
    emit_csv(header, rows, out / f"{stem}.csv", rc.precision)
    text = rc.header() + "".join(line + "\n" for line in lines)
    (out / f"{stem}.txt").write_text(text, encoding="utf-8")
    return text


def _c(z: complex, prec: int) -> str:
    return f"{z.real:.{prec}f}{z.imag:+.{prec}f}i"


def cmd_equilibria(args) -> str:
    rc = _run_config(args, False)
    es = equilibria(rc.params)
    rows = [(label, s.M, s.C, residual(rc.params, s)) for label, s in es.labelled()]
    lines = [f"{label}: M={fmt(M, rc.precision)} C={fmt(C, rc.precision)} residual={res:.2e}"
             for label, M, C, res in rows]
    return _write(rc, ["label", "M", "C", "residual"], rows, lines)


def cmd_classify(args) -> str:
    rc = _run_config(args, True)
    cfg = MapConfig(rc.params, rc.delta)
    header = ["label", "M", "C", "a11", "a12", "a21", "a22", "U", "V",
              "eig1_re", "eig1_im", "eig2_re", "eig2_im", "class",
              "delta_flip_minus", "delta_flip_plus", "delta_ns", "within_hypotheses"]
    rows, lines = [], []
    for label, E, fixed in _targets(rc, args.point):
        rep = classify(cfg, E, check_fixed=fixed)
        J, cd, th = rep.jacobian, rep.char, rep.thresholds
        e1, e2 = rep.eigs
        rows.append((label, E.M, E.C, J.a11, J.a12, J.a21, J.a22, cd.U, cd.V,
                     e1.real, e1.imag, e2.real, e2.imag, rep.cls.value,
                     th.delta_flip_minus, th.delta_flip_plus, th.delta_ns, rep.within_hypotheses))
        lines.append(f"{label} ({E.M:.6f}, {E.C:.6f}): {rep.cls.value}"
                     f"; |eigs| = {abs(e1):.6f}, {abs(e2):.6f}; U = {cd.U:.6f}, V = {cd.V:.6f}")
        if not rep.within_hypotheses:
            lines.append("  V <= 0: classified from eigenvalue moduli only")
        for name in ("delta_flip_minus", "delta_flip_plus", "delta_ns"):
            x = getattr(th, name)
            if x is not None:
                lines.append(f"  {name} = {x:.{rc.precision}f}")
    return _write(rc, header, rows, lines)


def cmd_flip(args) -> str:
    rc = _run_config(args, False)
    rc.extra.update(branch=args.branch, mode=args.mode)
    if args.lambda2 is not None:
        rc.extra["lambda2"] = args.lambda2
    if args.expand_at_delta:
        if rc.delta is None:
            raise UsageError("--expand-at-delta needs --delta")
        rc.extra["expand_at_delta"] = 1
    cfg = MapConfig(rc.params, rc.delta or 1.0)
    names = ["delta1", "lambda2", "lambda2_direct", "a1", "a2", "a3", "b1", "b2", "b3", "b4",
             "b5", "omega1", "omega2"]
    rows, lines = [], []
    for label, E, fixed in _targets(rc, args.point):
        rep = flip_discriminants(cfg, E, args.branch, args.mode, check_fixed=fixed,
                                 lambda2=args.lambda2,
                                 expand_delta=rc.delta if args.expand_at_delta else None)
        vals = [getattr(rep, n) for n in names]
        rows.append((label, E.M, E.C, *vals, rep.verdict.value, rep.cycle_stable))
        lines.append(f"{label} ({E.M:.6f}, {E.C:.6f}): verdict {rep.verdict.value}")
        lines += [f"  {n} = {fmt(v, rc.precision)}" for n, v in zip(names, vals)]
        if args.lambda2 is not None:
            lines.append(f"  normal form evaluated with lambda2 = {args.lambda2!r} as supplied")
        lines.append(f"  period-2 orbit attracting in both directions: {rep.cycle_stable}")
        if not rep.within_hypotheses:
            lines.append("  V <= 0: the transverse eigenvalue is outside the unit circle")
        if not fixed:
            lines.append("  expansion taken about the supplied point, which is not a fixed point")
    return _write(rc, ["label", "M", "C", *names, "verdict", "cycle_stable"], rows, lines)


def cmd_ns(args) -> str:
    rc = _run_config(args, False)
    cfg = MapConfig(rc.params, rc.delta or 1.0)
    gnames = [f"{g}_{n}" for g in ("g3", "g4") for n in G_PARTIAL_NAMES]
    header = ["label", "M", "C", "delta2", "sigma1", "sigma2", "d_mod",
              *(f"varsigma{i}_{part}" for i in range(1, 5) for part in ("re", "im")),
              "psi", "verdict", "resonance_ok", *gnames]
    rows, lines = [], []
    for label, E, fixed in _targets(rc, args.point):
        rep = ns_discriminant(cfg, E, check_fixed=fixed)
        fr = rep.frame
        vs = (rep.varsigma1, rep.varsigma2, rep.varsigma3, rep.varsigma4)
        rows.append((label, E.M, E.C, fr.delta2, fr.sigma1, fr.sigma2, fr.d_mod,
                     *(x for z in vs for x in (z.real, z.imag)), rep.psi, rep.verdict.value,
                     fr.resonance_ok, *(rep.g_partials[g] for g in gnames)))
        lines.append(f"{label} ({E.M:.6f}, {E.C:.6f}): delta2 = {fr.delta2:.{rc.precision}f}")
        lines += [f"  varsigma{i} = {_c(z, rc.precision)}" for i, z in enumerate(vs, 1)]
        lines.append(f"  psi = {rep.psi:.{rc.precision}f}")
        lines.append(f"  verdict: {rep.verdict.value}")
    return _write(rc, header, rows, lines)


def _jb(path: str):
    try:
        vals = parse_config(Path(path).read_text(encoding="utf-8"))
        J = Jacobian2(*(float(vals[k]) for k in ("a11", "a12", "a21", "a22")))
        B = np.array([float(vals["b1"]), float(vals["b2"])])
    except KeyError as exc:
        raise UsageError(f"{path}: missing key {exc}") from None
    except (OSError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from None
    return J, B


def cmd_ogy(args) -> str:
    lines: list[str] = []
    if args.jb:
        J, B = _jb(args.jb)
        values = _settings(args)
        params = params_from_mapping(values) if any(k in values for k in PARAM_NAMES) else None
        rc = RunConfig("ogy", params, args.delta, [], args.out, args.precision,
                       extra={"jb": args.jb, "a11": J.a11, "a12": J.a12, "a21": J.a21,
                              "a22": J.a22, "b1": float(B[0]), "b2": float(B[1])})
        lines_ = ogy_lines_from(J, B)
        E = None
    else:
        rc = _run_config(args, True)
        cfg = MapConfig(rc.params, rc.delta)
        label, E, fixed = _targets(rc, args.point)[0]
        d = ogy_design(cfg, E, check_fixed=fixed)
        J, B, lines_ = d.J, d.B, d.lines
        lines.append(f"target {label} ({E.M:.6f}, {E.C:.6f}) at delta0 = {rc.delta}")
        if not lines_.controllable:
            lines.append("B vanishes at a fixed point: uncontrollable through the step size")
    Cm = np.column_stack([B, J.as_array() @ B])
    detC = float(Cm[0, 0] * Cm[1, 1] - Cm[0, 1] * Cm[1, 0])
    prec = rc.precision
    lines.append(f"det(C) = {detC:.{prec}f} ({'controllable' if lines_.controllable else 'uncontrollable'})")
    for name in ("L1", "L2", "L3"):
        lines.append(f"{name} = {getattr(lines_, name).format(prec)}")
    reg = lines_.region
    lines.append(f"stability region vertices: {[tuple(round(x, prec) for x in v) for v in reg.vertices]}"
                 f" (bounded: {reg.bounded})")
    rows = [(name, f.c1, f.c2, f.c0) for name, f in
            (("L1", lines_.L1), ("L2", lines_.L2), ("L3", lines_.L3))]
    rows += [(f"vertex{i}", v[0], v[1], None) for i, v in enumerate(reg.vertices)]
    rows.append(("detC", detC, None, None))
    if args.gains is not None:
        rho = args.gains
        stable = bool(lines_.stable(*rho))
        lines.append(f"gains {rho}: {'inside' if stable else 'outside'} the stability region")
        if E is not None:
            ic = State(*(args.ic[0] if args.ic else (E.M + 1e-3, E.C)))
            run = ogy_simulate(MapConfig(rc.params, rc.delta), E, rho, args.eps, ic, args.steps,
                               mode="linear" if args.linear else "nonlinear")
            lines.append(f"capture step: {run.capture_step}")
            emit_orbit = [(i, M, C) for i, (M, C) in enumerate(run.orbit)]
            _ensure(rc.out)
            emit_csv(["step", "M", "C"], emit_orbit, Path(rc.out) / "ogy_orbit.csv", prec)
    return _write(rc, ["name", "rho1", "rho2", "const"], rows, lines)


def _ensure(out: str) -> None:
    Path(out).mkdir(parents=True, exist_ok=True)


def cmd_hybrid(args) -> str:
    rc = _run_config(args, True)
    cfg = MapConfig(rc.params, rc.delta)
    label, E, fixed = _targets(rc, args.point)[0]
    d = hybrid_design(cfg, E, check_fixed=fixed)
    lo, hi = d.zeta_interval or (None, None)
    lines = [f"target {label} ({E.M:.6f}, {E.C:.6f}) at delta = {rc.delta}",
             "stabilising zeta interval: " + (f"({lo:.{rc.precision}f}, {hi:.{rc.precision}f})"
                                              if d.zeta_interval else "empty")]
    rows = [(label, E.M, E.C, lo, hi)]
    if args.zeta is not None:
        rc.extra["zeta"] = args.zeta
        ic = State(*(args.ic[0] if args.ic else (E.M + 1e-3, E.C)))
        run = hybrid_simulate(cfg, args.zeta, ic, args.steps, E)
        lines.append(f"zeta = {args.zeta}: capture step {run.capture_step}")
        _ensure(rc.out)
        emit_csv(["step", "M", "C"], [(i, M, C) for i, (M, C) in enumerate(run.orbit)],
                 Path(rc.out) / "hybrid_orbit.csv", rc.precision)
    return _write(rc, ["label", "M", "C", "zeta_lo", "zeta_hi"], rows, lines)


def cmd_orbit(args) -> str:
    rc = _run_config(args, True)
    if not rc.ics:
        raise UsageError("orbit needs at least one --ic")
    if args.transient < 0 or args.samples < 512:
        raise UsageError("need --transient >= 0 and --samples >= 512")
    rc.extra.update(transient=args.transient, samples=args.samples)
    cfg = MapConfig(rc.params, rc.delta)
    rows, lines = [], []
    for j, ic in enumerate(rc.ics):
        run = iterate(cfg, State(*ic), args.transient, args.samples)
        summ = orbit_summary(cfg, State(*ic), args.transient, args.samples)
        rows += [(j, i, M, C) for i, (M, C) in enumerate(run.samples)]
        lam = "n/a" if summ.lyapunov is None else f"{summ.lyapunov:.6f}"
        lines.append(f"ic{j} {ic}: {summ.label} (lyapunov along samples {lam})")
    return _write(rc, ["ic_index", "sample_index", "M", "C"], rows, lines)


def cmd_sweep(args) -> str:
    rc = _run_config(args, args.param != "delta")
    lo, hi, n = args.range
    ics = tuple(State(*ic) for ic in (rc.ics or [(0.04, 0.66)]))
    rc.extra.update(param=args.param, range=f"{lo!r}:{hi!r}:{n}",
                    transient=args.transient, samples=args.samples)
    try:
        spec = SweepSpec(MapConfig(rc.params, rc.delta or 1.0), args.param, lo, hi, n, ics,
                         args.transient, args.samples)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = sweep(spec, workers=args.workers)
    rows = []
    for v, row in zip(res.values, res.summaries):
        for j, s in enumerate(row):
            rows += [(float(v), j, i, M, C, s.kind.value, s.period)
                     for i, (M, C) in enumerate(s.samples)]
    summary = [(float(v), j, s.kind.value, s.period, s.lyapunov)
               for v, row in zip(res.values, res.summaries) for j, s in enumerate(row)]
    _ensure(rc.out)
    emit_csv(["param", "ic_index", "kind", "period", "lyapunov"], summary,
             Path(rc.out) / "sweep_summary.csv", rc.precision)
    lines = []
    for j in range(len(ics)):
        seq, last = [], object()
        for v, row in zip(res.values, res.summaries):
            lab = row[j].label
            if lab != last:
                seq.append(f"{lab}@{v:.{rc.precision}f}")
                last = lab
        lines.append(f"ic{j}: " + " -> ".join(seq))
    return _write(rc, ["param", "ic_index", "sample_index", "M", "C", "kind", "period"],
                  rows, lines)


COMMANDS = {
    "equilibria": cmd_equilibria, "classify": cmd_classify, "flip": cmd_flip, "ns": cmd_ns,
    "ogy": cmd_ogy, "hybrid": cmd_hybrid, "orbit": cmd_orbit, "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        text = COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"reefdyn: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ReefError, OSError) as exc:
        print(f"reefdyn: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    sys.stdout.write(text)
    return EXIT_OK


__all__ = ["main", "build_parser"]

if __name__ == "__main__":
    sys.exit(main())
