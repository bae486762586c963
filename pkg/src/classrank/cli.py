"""Command line front end.

Every subcommand prints a line-oriented `key: value` report to stdout (and
writes it under --output when given). Exit codes: 0 for success, 1 for a
computation error or a failed verdict, 2 for a usage error. Reports carry
the tool version and a hash of every input, and identical inputs yield
byte-identical reports.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from .branchcurve import build_trigonal_model
from .delpezzo import build_del_pezzo, check_general_position
from .family import enumerate_admissible
from .formats import (FormatError, Report, input_hash, parse_h_text,
                      parse_model_text, parse_points_text, parse_rational,
                      parse_table_text, parse_triform_text)
from .localbounds import (AdmissibilityProfile, admissibility_profile,
                          ell_at_infinity, verify_sufficiency)
from .mu3 import check_mu3_example, orbit_count_formula, rank_bound
from .oracle import validate_family
from .pipeline import (StageError, _certify_task, _sufficiency_task,
                       bounds_report, certify_report, enumerate_report,
                       load_config, model_report, parallel_map,
                       points_report, run_pipeline, systems_report,
                       torsion_report, verified_profile_from_table)
from .twotorsion import torsion_basis_data


class CliError(Exception):
    """Computation-level failure (exit status 1)."""


def _read_text(path, label):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError("%s file: %s" % (label, exc)) from None


def _deliver(report, output_dir):
    sys.stdout.write(report.render())
    if output_dir:
        os.makedirs(output_dir, exist_ok=True)
        report.write(os.path.join(output_dir, report.name + ".report"))


def _args_line(pairs):
    return " ".join("%s=%s" % (k, v) for k, v in pairs)


# ---------------------------------------------------------------------------
# shared source resolution

def _points_chain(args, parts):
    """points file -> (points, surface data, model); general position is a
    hard gate here since nothing downstream is defined without it."""
    text = _read_text(args.points, "points")
    parts.append(("points", text))
    points = parse_points_text(text)
    supplied_u = None
    if getattr(args, "u", None):
        parts.append(("u", args.u))
        supplied_u = parse_triform_text(args.u, degree=3)
    verdict = check_general_position(points)
    if not verdict.passed:
        raise CliError("points are not in general position: %s"
                       % (verdict.witness,))
    dp = build_del_pezzo(points, supplied_u)
    return points, dp, build_trigonal_model(dp)


def _model_inputs(args, parts, table_attr):
    model = parse_model_text(_read_and_track(args.model, "model", parts))
    if not args.h_file:
        raise FormatError("--model needs --h")
    h = parse_h_text(_read_and_track(args.h_file, "h", parts))
    table_path = getattr(args, table_attr)
    if not table_path:
        raise FormatError("--model needs --%s for the local bounds"
                          % table_attr.replace("_", "-"))
    table = parse_table_text(_read_and_track(table_path, "table", parts))
    return model, h, table


def _read_and_track(path, label, parts):
    text = _read_text(path, label)
    parts.append((label, text))
    return text


def _resolve_profile(args, parts, jobs, table_attr="table"):
    """(model, kummers, profile, traces) for either input mode."""
    if (args.points is None) == (args.model is None):
        raise FormatError("exactly one of --points and --model is required")
    if args.points is not None:
        points, dp, model = _points_chain(args, parts)
        _, _, kummers, _ = torsion_basis_data(dp, model)
        normalized = [h.normalized_function() for h in kummers]
        profile = admissibility_profile(points, model, normalized,
                                        args.prime_bound)
        return model, kummers, profile, None
    model, h, table = _model_inputs(args, parts, table_attr)
    normalized = [h.normalized_function()]
    try:
        profile, traces, _ = verified_profile_from_table(model, normalized,
                                                         table, jobs)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    return model, [h], profile, traces


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_points_check(args):
    text = _read_text(args.file, "points")
    points = parse_points_text(text)
    digest = input_hash([("points", text)])
    verdict = check_general_position(points)
    _deliver(points_report(digest, points, verdict), args.output)
    return 0 if verdict.passed else 1


def _cmd_branch_curve(args):
    parts = []
    points, dp, model = _points_chain(args, parts)
    digest = input_hash(parts)
    _deliver(systems_report(digest, dp), args.output)
    _deliver(model_report(digest, "branch-curve", model), args.output)
    return 0


def _cmd_torsion_report(args):
    parts = []
    points, dp, model = _points_chain(args, parts)
    digest = input_hash(parts)
    _, _, kummers, matrix = torsion_basis_data(dp, model)
    _deliver(torsion_report(digest, kummers, matrix), args.output)
    return 0


def _cmd_bounds(args):
    parts = []
    if (args.points is None) == (args.model is None):
        raise FormatError("exactly one of --points and --model is required")
    traces = None
    if args.points is not None:
        points, dp, model = _points_chain(args, parts)
        _, _, kummers, _ = torsion_basis_data(dp, model)
        normalized = [h.normalized_function() for h in kummers]
        profile = admissibility_profile(points, model, normalized,
                                        args.prime_bound)
        if args.verify_table:
            table = parse_table_text(_read_and_track(args.verify_table,
                                                     "table", parts))
            traces = [verify_sufficiency(model, normalized, p, k)
                      for p, k in table]
    else:
        model, h, table = _model_inputs(args, parts, "verify_table")
        normalized = [h.normalized_function()]
        traces = parallel_map(_sufficiency_task,
                              [(model, normalized, p, k) for p, k in table],
                              args.jobs)
        profile = None
        if all(t.passed for t in traces):
            radius = ell_at_infinity(model, normalized)
            profile = AdmissibilityProfile(dict(table),
                                           min(radius, Fraction(1, 2)),
                                           {"table": tuple(table)})
    parts.append(("args", _args_line([("prime_bound", args.prime_bound)])))
    digest = input_hash(parts)
    _deliver(bounds_report(digest, profile, traces), args.output)
    if traces is not None and any(not t.passed for t in traces):
        return 1
    return 0


def _cmd_enumerate(args):
    parts = []
    model, kummers, profile, _ = _resolve_profile(args, parts, args.jobs)
    parts.append(("args", _args_line([("count", args.count),
                                      ("strategy", args.strategy)])))
    digest = input_hash(parts)
    ts = enumerate_admissible(profile, args.count, args.strategy)
    _deliver(enumerate_report(digest, args.strategy, ts), args.output)
    return 0


def _cmd_certify(args):
    parts = []
    model, kummers, profile, _ = _resolve_profile(args, parts, args.jobs)
    if args.t:
        ts = [parse_rational(v) for v in args.t]
    else:
        ts = enumerate_admissible(profile, args.count, args.strategy)
    parts.append(("args", _args_line([
        ("count", args.count), ("strategy", args.strategy),
        ("aux_budget", args.aux_budget),
        ("t", ",".join(str(v) for v in ts))])))
    digest = input_hash(parts)
    outcomes = parallel_map(_certify_task,
                            [(model, kummers, profile, t, args.aux_budget)
                             for t in ts], args.jobs)
    rep, certs, skipped = certify_report(digest, outcomes)
    _deliver(rep, args.output)
    if not certs or any(c.overall != "PASS" for c in certs):
        return 1
    return 0


def _cmd_oracle_run(args):
    a, b = parse_rational(args.a), parse_rational(args.b)
    digest = input_hash([("args", _args_line([("a", a), ("b", b),
                                              ("count", args.count)]))])
    report = validate_family(a, b, args.count)
    rep = Report("oracle", digest)
    rep.add("a", a)
    rep.add("b", b)
    rep.add("strategy", report.strategy)
    rep.add("members", len(report.members))
    rep.add("skipped", len(report.skipped))
    for i, m in enumerate(report.members):
        rep.add("member_%d" % i,
                "q=%s D0=%s conductor=%s two_rank=%d"
                % (m.q, m.fundamental_discriminant, m.conductor, m.two_rank))
    if report.minimum_rank is not None:
        rep.add("minimum_rank", report.minimum_rank)
        rep.add("mean_rank", report.mean_rank)
    _deliver(rep, args.output)
    return 0


def _cmd_mu3_check(args):
    digest = input_hash([("args", "stock")])
    result = check_mu3_example()
    rep = Report("mu3-check", digest)
    rep.add("general_position",
            "PASS" if result.general_position.passed else "FAIL")
    rep.add("invariant", result.invariant)
    rep.add("order_three", result.order_three)
    rep.add("galois_orbits", result.galois_orbit_count)
    for i, flag in enumerate(result.flags):
        rep.add("flag_%d" % i, flag)
    rep.add("verdict", "PASS" if result.passed else "FAIL")
    _deliver(rep, args.output)
    return 0 if result.passed else 1


def _cmd_mu3_bound(args):
    digest = input_hash([("args", _args_line([("genus", args.genus)]))])
    rep = Report("mu3-bound", digest)
    rep.add("genus", args.genus)
    rep.add("orbit_count", orbit_count_formula(args.genus))
    rep.add("rank_bound", rank_bound(args.genus))
    _deliver(rep, args.output)
    return 0


def _cmd_pipeline(args):
    cfg = load_config(args.config, output_override=args.output)
    run = run_pipeline(cfg, jobs=args.jobs)
    summary = Report("pipeline", cfg.digest)
    for stage in sorted(run.reports):
        summary.add("stage_%s" % stage, run.reports[stage])
    summary.add("certified", len(run.certificates))
    summary.add("skipped", len(run.skipped))
    sys.stdout.write(summary.render())
    return 0


# ---------------------------------------------------------------------------
# parser

def _default_jobs():
    return os.cpu_count() or 1


def _add_output(sp):
    sp.add_argument("--output", help="directory for the report file")


def _add_source(sp, table_flag=None):
    sp.add_argument("--points", help="point configuration file")
    sp.add_argument("--u", help="explicit anticanonical cubic in x, y, z")
    sp.add_argument("--model", help="imported fibre model file")
    sp.add_argument("--h", dest="h_file", help="kummer function file")
    if table_flag:
        sp.add_argument(table_flag, dest=table_flag.lstrip("-").replace("-", "_"),
                        help="exponent table file (prime exponent per line)")
    sp.add_argument("--prime-bound", type=int, dest="prime_bound",
                    help="scan bound for candidate bad primes")
    sp.add_argument("--jobs", type=int, default=_default_jobs(),
                    help="worker pool size (default: cpu count)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="classrank",
        description="exact pipeline from plane point configurations to "
                    "cubic fields with certified class group 2-rank growth")
    sub = parser.add_subparsers(dest="command", required=True)

    points = sub.add_parser("points", help="point configuration utilities")
    psub = points.add_subparsers(dest="subcommand", required=True)
    check = psub.add_parser("check", help="verify general position")
    check.add_argument("--file", required=True)
    _add_output(check)
    check.set_defaults(handler=_cmd_points_check)

    bc = sub.add_parser("branch-curve",
                        help="linear systems and the fibre model")
    bc.add_argument("--points", required=True)
    bc.add_argument("--u", help="explicit anticanonical cubic in x, y, z")
    _add_output(bc)
    bc.set_defaults(handler=_cmd_branch_curve)

    torsion = sub.add_parser("torsion", help="2-torsion data")
    tsub = torsion.add_subparsers(dest="subcommand", required=True)
    trep = tsub.add_parser("report",
                           help="kummer functions and the pairing matrix")
    trep.add_argument("--points", required=True)
    trep.add_argument("--u", help="explicit anticanonical cubic in x, y, z")
    _add_output(trep)
    trep.set_defaults(handler=_cmd_torsion_report)

    bounds = sub.add_parser("bounds", help="local admissibility data")
    _add_source(bounds, table_flag="--verify-table")
    _add_output(bounds)
    bounds.set_defaults(handler=_cmd_bounds)

    enum = sub.add_parser("enumerate", help="admissible fibre parameters")
    _add_source(enum, table_flag="--table")
    enum.add_argument("--count", type=int, default=5)
    enum.add_argument("--strategy", choices=("positive", "negative"),
                      default="positive")
    _add_output(enum)
    enum.set_defaults(handler=_cmd_enumerate)

    cert = sub.add_parser("certify", help="square-class certificates")
    _add_source(cert, table_flag="--table")
    cert.add_argument("--count", type=int, default=1,
                      help="certify the first N admissible parameters")
    cert.add_argument("--strategy", choices=("positive", "negative"),
                      default="positive")
    cert.add_argument("--t", action="append",
                      help="explicit fibre parameter (repeatable)")
    cert.add_argument("--aux-budget", type=int, default=16,
                      dest="aux_budget")
    _add_output(cert)
    cert.set_defaults(handler=_cmd_certify)

    oracle = sub.add_parser("oracle", help="genus-1 desk-scale instance")
    osub = oracle.add_subparsers(dest="subcommand", required=True)
    orun = osub.add_parser("run", help="certify quadratic family members")
    orun.add_argument("--a", required=True)
    orun.add_argument("--b", required=True)
    orun.add_argument("--count", type=int, default=25)
    _add_output(orun)
    orun.set_defaults(handler=_cmd_oracle_run)

    mu3 = sub.add_parser("mu3", help="order-3 symmetry bounds")
    msub = mu3.add_subparsers(dest="subcommand", required=True)
    mcheck = msub.add_parser("check", help="verify the stock configuration")
    _add_output(mcheck)
    mcheck.set_defaults(handler=_cmd_mu3_check)
    mbound = msub.add_parser("bound", help="rank bound for a given genus")
    mbound.add_argument("--genus", type=int, required=True)
    _add_output(mbound)
    mbound.set_defaults(handler=_cmd_mu3_bound)

    pipe = sub.add_parser("pipeline", help="run every stage from a config")
    pipe.add_argument("--config", required=True)
    pipe.add_argument("--output", help="override the output directory")
    pipe.add_argument("--jobs", type=int, default=_default_jobs())
    pipe.set_defaults(handler=_cmd_pipeline)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except FormatError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 2
    except StageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except CliError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except Exception as exc:  # surface library failures as status 1
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
