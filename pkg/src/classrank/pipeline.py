"""Stage orchestration: a point configuration (or an imported fibre model)
is carried through validation, surface construction, torsion data, local
bounds, parameter enumeration and certification, with one report file per
stage. All file parsing happens up front, so a malformed input never costs
any computation; a failure inside a stage names that stage.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

from .branchcurve import (build_trigonal_model, geometric_genus,
                          totally_ramified_fibres)
from .delpezzo import build_del_pezzo, check_general_position
from .family import HilbertExceptionalError, certify, enumerate_admissible
from .formats import (FormatError, Report, input_hash, kummer_expression,
                      parse_h_text, parse_key_values, parse_model_text,
                      parse_points_text, parse_table_text, parse_triform_text)
from .localbounds import (AdmissibilityProfile, admissibility_profile,
                          ell_at_infinity, verify_sufficiency)
from .twotorsion import matrix_rank_f2, torsion_basis_data

_STAGES_FROM_POINTS = ("points", "systems", "branch-curve", "torsion",
                       "bounds", "enumerate", "certify")
_STAGES_FROM_MODEL = ("model", "bounds", "enumerate", "certify")


class StageError(Exception):
    def __init__(self, stage, message):
        super().__init__("stage %s: %s" % (stage, message))
        self.stage = stage


@dataclass
class PipelineConfig:
    points: object  # list of ProjPoint, or None when a model is imported
    supplied_u: object  # explicit anticanonical cubic, or None
    model: object  # imported TrigonalModel, or None
    h: object  # imported KummerFunction, or None
    table: object  # (prime, exponent) rows, or None
    prime_bound: object
    count: int
    certify_count: int
    aux_budget: int
    strategy: str
    output_dir: str
    digest: str


@dataclass
class PipelineRun:
    output_dir: str
    reports: dict  # stage name -> report path
    certificates: tuple
    skipped: tuple  # (t, reason) for Hilbert-exceptional parameters


_CONFIG_KEYS = {"points", "model", "h", "table", "u", "prime_bound",
                "count", "certify", "aux_budget", "strategy", "output"}


def _require_int(entries, key, default, minimum):
    if key not in entries:
        return default
    try:
        value = int(entries[key])
    except ValueError:
        raise FormatError("%s must be an integer" % key) from None
    if value < minimum:
        raise FormatError("%s must be at least %d" % (key, minimum))
    return value


def load_config(path, output_override=None):
    """Parse a pipeline config and every file it references. Any defect
    (unknown key, missing file, malformed point or polynomial) surfaces
    here, before any computation starts."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    entries = dict(parse_key_values(text))
    unknown = set(entries) - _CONFIG_KEYS
    if unknown:
        raise FormatError("unknown config keys: %s" % ", ".join(sorted(unknown)))
    if ("points" in entries) == ("model" in entries):
        raise FormatError("exactly one of `points` and `model` is required")

    base = os.path.dirname(os.path.abspath(path))
    hash_parts = [("config", text)]

    def read_ref(key):
        ref = os.path.join(base, entries[key])
        try:
            with open(ref, "r", encoding="utf-8") as fh:
                payload = fh.read()
        except OSError as exc:
            raise FormatError("%s file: %s" % (key, exc)) from None
        hash_parts.append((key, payload))
        return payload

    points = supplied_u = model = h = table = None
    if "points" in entries:
        for key in ("h", "table"):
            if key in entries:
                raise FormatError("`%s` only applies to imported models" % key)
        points = parse_points_text(read_ref("points"))
        if "u" in entries:
            supplied_u = parse_triform_text(entries["u"], degree=3)
    else:
        if "u" in entries:
            raise FormatError("`u` only applies to point configurations")
        model = parse_model_text(read_ref("model"))
        if "h" not in entries or "table" not in entries:
            raise FormatError("imported models need `h` and `table` files "
                              "for the local bounds")
        h = parse_h_text(read_ref("h"))
        table = parse_table_text(read_ref("table"))

    prime_bound = _require_int(entries, "prime_bound", None, 2)
    count = _require_int(entries, "count", 5, 1)
    certify_count = _require_int(entries, "certify", 1, 0)
    aux_budget = _require_int(entries, "aux_budget", 16, 0)
    strategy = entries.get("strategy", "positive")
    if strategy not in ("positive", "negative"):
        raise FormatError("strategy must be `positive` or `negative`")
    output_dir = output_override or os.path.join(base, entries.get("output", "reports"))

    return PipelineConfig(points=points, supplied_u=supplied_u, model=model,
                          h=h, table=table, prime_bound=prime_bound,
                          count=count, certify_count=certify_count,
                          aux_budget=aux_budget, strategy=strategy,
                          output_dir=output_dir,
                          digest=input_hash(hash_parts))


def parallel_map(fn, items, jobs):
    """Map preserving input order, fanning out to a process pool when more
    than one worker is requested. Results are collected in input order, so
    the output is identical whatever the worker count."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


def _certify_task(task):
    model, hs, profile, t, budget = task
    try:
        return ("ok", certify(model, hs, profile, t, budget))
    except HilbertExceptionalError as exc:
        return ("skip", (t, str(exc)))


def _sufficiency_task(task):
    model, hs, p, k = task
    return verify_sufficiency(model, hs, p, k)


def verified_profile_from_table(model, h_list, table, jobs=1):
    """Admissibility profile for an imported model: every (p, k) row is
    re-verified against the model and the h's, then the rows become the
    finite-place exponents; the radius is computed and capped at 1/2."""
    traces = parallel_map(_sufficiency_task,
                          [(model, h_list, p, k) for p, k in table], jobs)
    bad = [t for t in traces if not t.passed]
    if bad:
        raise ValueError("table row (%d, %d) fails verification"
                         % (bad[0].place, bad[0].exponent))
    radius = ell_at_infinity(model, h_list)
    return (AdmissibilityProfile(dict(table), min(radius, Fraction(1, 2)),
                                 {"table": tuple(table)}),
            traces, radius)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, str(exc)) from exc


def _emit(report, out_dir, written):
    path = os.path.join(out_dir, report.name + ".report")
    report.write(path)
    written[report.name] = path


def points_report(digest, points, verdict):
    rep = Report("points", digest)
    for i, p in enumerate(points, start=1):
        rep.add("point_%d" % i, p)
    for i, (kind, indices) in enumerate(verdict.failures):
        rep.add("failure_%d" % i, "%s %s" % (kind, list(indices)))
    rep.add("verdict", "PASS" if verdict.passed else "FAIL")
    return rep


def systems_report(digest, dp):
    rep = Report("systems", digest)
    rep.add("u", dp.u)
    rep.add("v", dp.v)
    rep.add("w", dp.w)
    rep.add("ninth_base_point", dp.base_point_O)
    rep.add("cusp", dp.cusp)
    return rep


def model_report(digest, name, model):
    rep = Report(name, digest)
    rep.add("a2", model.a2)
    rep.add("a1", model.a1)
    rep.add("a0", model.a0)
    rep.add("genus", geometric_genus(model))
    rep.add("totally_ramified_fibres",
            [str(t) for t in totally_ramified_fibres(model)])
    return rep


def torsion_report(digest, kummers, matrix):
    rep = Report("torsion", digest)
    for h in kummers:
        rep.add("h_%d" % h.index, kummer_expression(h))
    for i, row in enumerate(matrix):
        rep.add("pairing_row_%d" % i, list(row))
    rep.add("pairing_rank_f2", matrix_rank_f2([list(r) for r in matrix]))
    return rep


def bounds_report(digest, profile, traces=None):
    rep = Report("bounds", digest)
    if profile is not None:
        for p in profile.places():
            rep.add("prime_%d" % p, profile.finite_places[p])
        rep.add("radius", profile.archimedean_bound)
    if traces is not None:
        for trace in traces:
            rep.add("row_%d_%d" % (trace.place, trace.exponent), trace.verdict())
    return rep


def enumerate_report(digest, strategy, ts):
    rep = Report("enumerate", digest)
    rep.add("strategy", strategy)
    rep.add("count", len(ts))
    for i, t in enumerate(ts):
        rep.add("t_%d" % i, t)
    return rep


def certify_report(digest, outcomes):
    rep = Report("certify", digest)
    certs, skipped = [], []
    for i, (kind, payload) in enumerate(outcomes):
        if kind == "skip":
            t, reason = payload
            skipped.append((t, reason))
            rep.add("t_%d" % i, t)
            rep.add("overall_%d" % i, "SKIPPED %s" % reason)
            continue
        cert = payload
        certs.append(cert)
        rep.add("t_%d" % i, cert.t)
        rep.add("field_discriminant_%d" % i, cert.field.discriminant)
        rep.add("real_embeddings_%d" % i, cert.field.real_embeddings)
        rep.add("parity_checks_%d" % i,
                "%d/%d even" % (sum(pc.passed for pc in cert.parity_checks),
                                len(cert.parity_checks)))
        rep.add("sign_checks_%d" % i,
                "%d/%d positive" % (sum(sc.passed for sc in cert.sign_checks),
                                    len(cert.sign_checks)))
        rep.add("independence_rank_%d" % i, cert.independence_rank)
        rep.add("independence_%d" % i, cert.independence)
        rep.add("overall_%d" % i, cert.overall)
    rep.add("certified", sum(1 for k, _ in outcomes if k == "ok"))
    return rep, certs, skipped


def run_pipeline(cfg, jobs=1):
    """Execute every stage in order, writing `<stage>.report` files into the
    output directory. Raises StageError (naming the stage) on the first
    failure; the failing stage's report is still written when it exists."""
    os.makedirs(cfg.output_dir, exist_ok=True)
    written = {}

    if cfg.points is not None:
        verdict = _stage("points", check_general_position, cfg.points)
        _emit(_stage("points", points_report, cfg.digest, cfg.points, verdict),
              cfg.output_dir, written)
        if not verdict.passed:
            raise StageError("points", "configuration is not in general "
                             "position: %s" % (verdict.witness,))
        dp = _stage("systems", build_del_pezzo, cfg.points, cfg.supplied_u)
        _emit(_stage("systems", systems_report, cfg.digest, dp),
              cfg.output_dir, written)
        model = _stage("branch-curve", build_trigonal_model, dp)
        _emit(_stage("branch-curve", model_report, cfg.digest, "branch-curve",
                     model),
              cfg.output_dir, written)
        thetas, even, kummers, matrix = _stage("torsion", torsion_basis_data,
                                               dp, model)
        _emit(_stage("torsion", torsion_report, cfg.digest, kummers, matrix),
              cfg.output_dir, written)
        normalized = _stage("bounds",
                            lambda: [h.normalized_function() for h in kummers])
        profile = _stage("bounds", admissibility_profile, cfg.points, model,
                         normalized, cfg.prime_bound)
        _emit(_stage("bounds", bounds_report, cfg.digest, profile),
              cfg.output_dir, written)
    else:
        model = cfg.model
        kummers = [cfg.h]
        _emit(_stage("model", model_report, cfg.digest, "model", model),
              cfg.output_dir, written)
        normalized = _stage("bounds",
                            lambda: [h.normalized_function() for h in kummers])
        profile, traces, _ = _stage("bounds", verified_profile_from_table,
                                    model, normalized, cfg.table, jobs)
        _emit(_stage("bounds", bounds_report, cfg.digest, profile, traces),
              cfg.output_dir, written)

    ts = _stage("enumerate", enumerate_admissible, profile, cfg.count,
                cfg.strategy)
    _emit(_stage("enumerate", enumerate_report, cfg.digest, cfg.strategy, ts),
          cfg.output_dir, written)

    tasks = [(model, kummers, profile, t, cfg.aux_budget)
             for t in ts[:cfg.certify_count]]
    outcomes = _stage("certify", parallel_map, _certify_task, tasks, jobs)
    rep, certs, skipped = _stage("certify", certify_report, cfg.digest,
                                 outcomes)
    _emit(rep, cfg.output_dir, written)
    failed = [c for c in certs if c.overall != "PASS"]
    if failed:
        raise StageError("certify", "certificate at t = %s is FAIL"
                         % failed[0].t)

    return PipelineRun(cfg.output_dir, written, tuple(certs), tuple(skipped))
