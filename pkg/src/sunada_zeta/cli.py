"""Command line front end: one binary, one subcommand per pipeline.

Reports are byte-deterministic for a fixed config and seed: floats are
printed with 17 significant digits, JSON keys are sorted, CSV rows follow
module-defined orderings.  Exit status is 0 only when every verdict in the
run passes, 1 on a pipeline/verdict failure, 2 on bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import geoflow, groups, statphase, sunada, zeta
from ._util import fmt_float

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

DEFAULTS = {
    "tmax": 50,
    "seeds": 100,
    "seed": 0,
    "lmax": 3.0,
    "hlist": "50,100,200,400",
    "tol.unitarity": 1e-10,
    "tol.intertwine": 1e-9,
    "tol.closure": 1e-8,
}


class ConfigError(ValueError):
    pass


def _fmt_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) or isinstance(v, np.floating):
        return fmt_float(v)
    return str(v)


def emit_report(rows: list[dict], fmt: str, path: str | None, header: list[str] | None = None):
    """Serialize rows deterministically as CSV or JSON, to path or stdout."""
    if fmt == "csv":
        if header is None:
            header = list(rows[0].keys()) if rows else []
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(row[k]) for k in header])
        text = buf.getvalue()
    elif fmt == "json":
        def default(o):
            if isinstance(o, (np.floating, np.integer)):
                return o.item()
            raise TypeError(f"not serializable: {type(o)}")

        text = json.dumps(rows, sort_keys=True, indent=2, default=default) + "\n"
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return text


def _load_group(path: str) -> groups.FiniteGroup:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"group fixture not found: {path}")
    return groups.parse_group_file(p)


def _subgroup(G, gen_text: str) -> groups.Subgroup:
    gens = [s.strip() for s in gen_text.split(";") if s.strip()]
    if not gens:
        raise ConfigError("empty subgroup generator list")
    return groups.Subgroup.from_generators(G, gens)


def _tolerances(pairs: list[str]) -> dict:
    out = dict()
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"--tol expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        try:
            fval = float(val)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value {val!r}") from exc
        if fval <= 0:
            raise ConfigError("tolerances must be positive")
        out[key.strip()] = fval
    return out


def _cmd_gassmann(args) -> int:
    G = _load_group(args.group)
    H1 = _subgroup(G, args.h1)
    H2 = _subgroup(G, args.h2)
    cert = groups.is_gassmann(G, H1, H2)
    conjugate = groups.subgroups_conjugate(G, H1, H2)
    payload = cert.to_json_dict()
    payload["subgroups_conjugate"] = conjugate
    payload["order_h1"] = H1.order
    payload["order_h2"] = H2.order
    emit_report([payload], "json", args.out)
    return EXIT_OK if cert.verdict else EXIT_FAIL


def _cmd_sunada(args) -> int:
    spec_path = Path(args.diagram)
    if not spec_path.exists():
        raise ConfigError(f"diagram spec not found: {args.diagram}")
    spec = json.loads(spec_path.read_text(encoding="utf-8"))
    group_file = spec["group_file"]
    if not Path(group_file).is_absolute():
        group_file = str(spec_path.parent / group_file)
    G = _load_group(group_file)
    H1 = groups.Subgroup.from_generators(G, spec["h1_gens"])
    H2 = groups.Subgroup.from_generators(G, spec["h2_gens"])
    model = spec.get("model", "regular")
    f_size = int(spec.get("f_size", 1))
    diagram = sunada.build_cover(G, H1, H2, model=model, f_size=f_size)
    cert = groups.is_gassmann(G, H1, H2)
    radon = None
    if cert.verdict:
        kernel = groups.intertwiner_solve(G, H1, H2, seed=args.seed)
        radon = sunada.lift_radon(kernel, diagram)
    seeds = range(args.seed, args.seed + args.seeds)
    sweep = sunada.trace_equality_sweep(diagram, seeds, args.tmax, radon=radon)
    rows = []
    for seed, report in zip(sweep.seeds, sweep.reports):
        for r in report.to_csv_rows():
            rows.append({"seed": seed, **r})
    emit_report(rows, "csv", args.out, header=["seed", "t", "trace_level1", "trace_level2", "equal"])
    tol = _tolerances(args.tol).get("intertwine", DEFAULTS["tol.intertwine"])
    ok = sweep.all_equal and (
        sweep.max_intertwining_residual is None
        or sweep.max_intertwining_residual <= tol
    )
    return EXIT_OK if ok else EXIT_FAIL


def _load_manifold(path: str):
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"manifold spec not found: {path}")
    return geoflow.manifold_from_spec(json.loads(p.read_text(encoding="utf-8")))


def _cmd_flow(args) -> int:
    M = _load_manifold(args.manifold)
    orbits = geoflow.find_closed_orbits(M, args.lmax)
    rows = []
    for orb in orbits:
        row = {
            "L": orb.length,
            "L_prime": orb.prime_length,
            "det_I_minus_P": orb.det_i_minus_p,
            "degenerate_flag": orb.degenerate,
        }
        for i, v in enumerate(orb.start.x):
            row[f"x{i}"] = v
        for i, v in enumerate(orb.start.xi):
            row[f"xi{i}"] = v
        rows.append(row)
    header = None
    if rows:
        header = list(rows[0].keys())
    emit_report(rows, "csv", args.out, header=header)
    return EXIT_OK


def _cmd_zeta(args) -> int:
    M = _load_manifold(args.manifold)
    series = zeta.flat_trace_weights(M, args.lmax)
    if args.s is not None:
        s = complex(args.s.replace("i", "j")) if "j" in args.s or "i" in args.s else complex(float(args.s))
        ev = zeta.l_function_eval(series, s)
        emit_report([ev.to_json_dict()], "json", args.out)
    else:
        emit_report(series.to_csv_rows(), args.format, args.out, header=["tau", "weight", "provenance"])
    return EXIT_OK


def _cmd_statphase(args) -> int:
    h_list = [float(v) for v in args.hlist.split(",")]
    if args.fixture:
        problem = statphase.builtin_problem(args.fixture)
    else:
        spec = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        problem = statphase.builtin_problem(spec["phase"], **spec.get("params", {}))
        h_list = [float(v) for v in spec.get("h_list", h_list)]
    report = statphase.validate_stationary_phase(problem, h_list)
    emit_report(
        report.to_csv_rows(), "csv", args.out,
        header=["h", "integral_re", "integral_im", "prediction_re", "prediction_im", "scaled_residual"],
    )
    return EXIT_OK if report.passes else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sunada-zeta",
        description="Sunada cover checks, geodesic flows, and L-function reports",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gassmann", help="certify a (G, H1, H2) triple")
    g.add_argument("--group", required=True, help="group fixture file")
    g.add_argument("--h1", required=True, help="semicolon-separated generators")
    g.add_argument("--h2", required=True)
    g.add_argument("--out", default=None)
    g.set_defaults(fn=_cmd_gassmann)

    s = sub.add_parser("sunada", help="discrete cover trace-equality sweep")
    s.add_argument("--diagram", required=True, help="diagram JSON {group_file, h1_gens, h2_gens, model}")
    s.add_argument("--tmax", type=int, default=DEFAULTS["tmax"])
    s.add_argument("--seeds", type=int, default=DEFAULTS["seeds"])
    s.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    s.add_argument("--out", default=None)
    s.set_defaults(fn=_cmd_sunada)

    f = sub.add_parser("flow", help="closed-orbit table for a manifold")
    f.add_argument("--manifold", required=True, help="manifold JSON {kind, params}")
    f.add_argument("--lmax", type=float, default=DEFAULTS["lmax"])
    f.add_argument("--out", default=None)
    f.set_defaults(fn=_cmd_flow)

    z = sub.add_parser("zeta", help="L-series weights / partial sums")
    z.add_argument("--manifold", required=True)
    z.add_argument("--lmax", type=float, default=DEFAULTS["lmax"])
    z.add_argument("--s", default=None, help="evaluate the partial sum at s")
    z.add_argument("--format", choices=("csv", "json"), default="csv")
    z.add_argument("--out", default=None)
    z.set_defaults(fn=_cmd_zeta)

    p = sub.add_parser("statphase", help="stationary-phase validation table")
    p.add_argument("--fixture", default=None, help="builtin fixture name")
    p.add_argument("--spec", default=None, help="fixture JSON {phase, N, h_list}")
    p.add_argument("--hlist", default=DEFAULTS["hlist"])
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_statphase)

    for parser in (g, s, f, z, p):
        parser.add_argument(
            "--tol", action="append", default=[],
            help="tolerance override key=value (repeatable)",
        )
        if parser is not s:
            parser.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    if getattr(args, "fixture", "skip") is None and getattr(args, "spec", None) is None:
        sys.stderr.write("statphase needs --fixture or --spec\n")
        return EXIT_CONFIG
    try:
        return args.fn(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except Exception as exc:  # pipeline failure: machine-readable summary
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
