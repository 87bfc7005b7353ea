"""Command-line tool: ``ncmsreach {axioms,reach,certify,oracle}``.

Exit codes: 0 pass, 1 verified failure, 2 input error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from typing import Sequence

from .classk import ClassKFunction
from .core import DEFAULT_CAP, DEFAULT_EPS, as_fraction, check_ncms
from .errors import EvaluationError, NCMSError, NotNCMSError, ResourceCapError
from .modelfile import Model, load_model
from .oracle import MAX_SUBSET_STATES, OracleConfig, run_oracle
from .reach import Certificate, certify_underapprox, reach_set, right_range_set

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_CAP = 3


def _num(x) -> str:
    return format(float(x), ".12g")


def _positive_rational(text: str) -> Fraction:
    try:
        q = as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a decimal or fraction: {text!r}") from None
    if q <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return q


def _nonneg_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _classk(text: str) -> ClassKFunction:
    try:
        return ClassKFunction.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return n


def _density(text: str) -> float:
    v = _nonneg_float(text)
    if v > 1:
        raise argparse.ArgumentTypeError(f"density must lie in [0, 1], got {text}")
    return v


def _load(args) -> Model:
    return load_model(args.model, h=args.h, eps=args.eps, f=getattr(args, "f", None), t0=getattr(args, "t0", None))


def _sort_states(model: Model, states) -> list:
    return sorted(states, key=str) if not model.is_vector else sorted(states)


# -- subcommands --------------------------------------------------------------


def cmd_axioms(args, out) -> int:
    model = _load(args)
    ts = model.trajectory_set(args.cap)
    checks = check_ncms(ts)
    print(f"model: {args.model} ({model.kind}, {len(ts)} trajectories,"
          f" h={model.grid.step}, horizon={model.grid.horizon})", file=out)
    for c in checks.checks():
        line = f"{c.name}: {'pass' if c else 'FAIL'}"
        if not c:
            line += f"\n  counterexample: {c.detail}"
        print(line, file=out)
    print(f"overall: {'pass' if checks else 'FAIL'}", file=out)
    return EXIT_PASS if checks else EXIT_FAIL


def cmd_reach(args, out) -> int:
    model = _load(args)
    t0 = args.t0
    if t0 is None:
        if model.certificate is None:
            raise ValueError("reach needs --t0 (or a [certificate] t0 in the model)")
        t0 = model.certificate.t0
    if t0 > model.grid.end_time:
        raise ValueError(f"--t0 {_num(t0)} lies past the grid end time {_num(model.grid.end_time)}")
    sigma = model.instance(args.cap)
    fmt = sigma.space.format_state
    rows = [("reach", q) for q in _sort_states(model, reach_set(sigma, t0))]
    rows += [("right-range", q) for q in _sort_states(model, right_range_set(sigma, t0))]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["kind", "time_bound", "state"])
    for kind, q in rows:
        writer.writerow([kind, _num(t0), fmt(q)])
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        print(f"wrote {len(rows)} rows to {args.out}", file=out)
    else:
        out.write(buf.getvalue())
    return EXIT_PASS


def cmd_certify(args, out) -> int:
    model = _load(args)
    if model.certificate is None:
        raise ValueError("model has no [certificate] section")
    spec = model.certificate
    sigma = model.instance(args.cap)
    result = certify_underapprox(sigma, spec.A, Certificate(spec.S, spec.f, spec.t0))
    space = sigma.space
    a_text = ", ".join(space.format_state(q) for q in spec.A)
    print(f"certificate: A={{{a_text}}} f=({spec.f}) t0={_num(spec.t0)}", file=out)
    if result:
        print("CERTIFIED", file=out)
        for fact in result.facts:
            print(f"  {fact}", file=out)
        escapes = result.extensibility.escapes
        for d in escapes[:3]:
            print(f"  escape: {d.trajectory.render(space)} via {d.witness.render(space)}"
                  f" tau={_num(d.tau)} >= f(t - inf dom)={_num(d.required)}", file=out)
        return EXIT_PASS
    print(f"NOT CERTIFIED: failed clause {result.failed_clause}", file=out)
    for fact in result.facts:
        print(f"  {fact}", file=out)
    if result.failed_clause == "extensibility":
        bad = result.extensibility.violations[0]
        print(f"  violating trajectory: {bad.render(space)}", file=out)
    else:
        missing = ", ".join(space.format_state(q) for q in result.missing)
        print(f"  states outside the right range set: {missing}", file=out)
    return EXIT_FAIL


def cmd_oracle(args, out) -> int:
    if args.states > MAX_SUBSET_STATES:
        raise ResourceCapError(f"state-subset enumeration over {args.states} states", MAX_SUBSET_STATES)
    config = OracleConfig(
        max_states=args.states,
        density=args.density,
        runs=args.runs,
        seed=args.seed,
        max_horizon=args.max_horizon,
        t0=args.t0,
        f=args.f,
        step=args.h if args.h is not None else Fraction(1),
    )
    report = run_oracle(config, args.cap)
    for line in report.lines():
        print(line, file=out)
    return EXIT_PASS if report.ok else EXIT_FAIL


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncmsreach",
        description="Axiom checks, reach sets and underapproximation certificates for trajectory systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        if model:
            p.add_argument("model", help="model file")
            p.add_argument("--eps", type=_nonneg_float, default=None,
                           help=f"state equality tolerance for vector models (default {DEFAULT_EPS})")
        p.add_argument("--h", type=_positive_rational, default=None, help="grid step, overrides [grid] h")
        p.add_argument("--cap", type=_positive_int, default=DEFAULT_CAP, help="materialization cap")

    p = sub.add_parser("axioms", help="check the NCMS axioms")
    common(p)
    p.set_defaults(run=cmd_axioms)

    p = sub.add_parser("reach", help="write the reach and right-range sets as CSV")
    common(p)
    p.add_argument("--t0", type=_positive_rational, default=None, help="time bound (> 0)")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.set_defaults(run=cmd_reach)

    p = sub.add_parser("certify", help="check the model's [certificate]")
    common(p)
    p.add_argument("--t0", type=_positive_rational, default=None, help="override the certificate t0")
    p.add_argument("--f", type=_classk, default=None, help="override the class-K function, e.g. 'linear 0.5'")
    p.set_defaults(run=cmd_certify)

    p = sub.add_parser("oracle", help="check the certificate theorem on random transition systems")
    common(p, model=False)
    p.add_argument("--states", type=_positive_int, default=4, help="maximum number of states")
    p.add_argument("--density", type=_density, default=0.3, help="arc probability")
    p.add_argument("--runs", type=_positive_int, default=200, help="number of instances")
    p.add_argument("--seed", type=int, default=7, help="campaign seed")
    p.add_argument("--max-horizon", type=_positive_int, default=4, help="largest grid horizon drawn")
    p.add_argument("--t0", type=_positive_rational, default=None, help="fixed time bound (default random)")
    p.add_argument("--f", type=_classk, default=None, help="fixed class-K function (default random linear)")
    p.set_defaults(run=cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.run(args, out)
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except NotNCMSError as exc:
        print(f"error: model is not an NCMS: {exc.report.summary()}", file=sys.stderr)
        return EXIT_INPUT
    except (NCMSError, EvaluationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
