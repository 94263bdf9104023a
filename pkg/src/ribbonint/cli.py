r"""
Command-line interface: enumerate | correlator | oracle | verify.

Exit codes form a contract for CI:

    0  success (all hard assertions pass)
    1  identity failure (string/dilaton/parity/collapse/partition-sum or a
       genus <= 1 conjecture sector)
    2  usage error (bad parameters)
    3  bound-certification refusal
    4  internal consistency failure (spurious monomial, degree identity)

Outputs are JSON (with an optional CSV mirror for tables), embed the tool
version, the configuration and the derived bounds, and carry no timestamps,
so identical configurations produce byte-identical files at any thread
count.  The environment variable RGI_RESOURCE_CAP (bytes) installs a soft
address-space limit.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import __version__, amplitude, enumeration, oracle
from .enumeration import Bounds, BoundsError
from .amplitude import DegreeIdentityError, SpuriousMonomialError
from .mapcore import trace

EXIT_OK = 0
EXIT_IDENTITY = 1
EXIT_USAGE = 2
EXIT_BOUNDS = 3
EXIT_INTERNAL = 4


def _apply_resource_cap():
    cap = os.environ.get("RGI_RESOURCE_CAP")
    if not cap:
        return
    try:
        import resource

        limit = int(cap)
        resource.setrlimit(resource.RLIMIT_AS, (limit, limit))
    except (ValueError, OSError) as err:
        print(f"warning: RGI_RESOURCE_CAP not applied: {err}", file=sys.stderr)


def _metadata(args, extra=None):
    # threads and output paths are execution detail, not configuration:
    # identical configurations must give byte-identical files
    skip = {"func", "threads", "out"}
    config = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    meta = {"tool_version": __version__, "config": config}
    if extra:
        meta.update(extra)
    return meta


def _emit(payload, out_path, fmt="json", csv_rows=None):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
        if fmt == "csv" and csv_rows is not None:
            with open(out_path + ".csv", "w", newline="") as fh:
                csv.writer(fh).writerows(csv_rows)
    else:
        sys.stdout.write(text)


def _parse_ints(text):
    if text is None or text == "":
        return ()
    return tuple(int(x) for x in str(text).split(","))


def cmd_enumerate(args) -> int:
    bounds = Bounds(dart_max=args.dart_max)
    family = args.family
    if family == "critical":
        if args.g is None or args.k is None or args.l is None:
            print("critical needs --g --k --l", file=sys.stderr)
            return EXIT_USAGE
        graphs = enumeration.gen_components(args.g, args.k, args.l, bounds=bounds)
        records = [g.to_json() for g in graphs]
        dart_bound = enumeration.component_dart_bound(args.g, args.k, args.l)
        params = {"g": args.g, "k": args.k, "l": args.l}
    elif family == "kp":
        if args.faces is None or args.genus_max is None:
            print("kp needs --faces --genus-max", file=sys.stderr)
            return EXIT_USAGE
        graphs = enumeration.gen_kp(args.faces, args.genus_max, bounds=bounds)
        records = [g.to_json() for g in graphs]
        dart_bound = enumeration.kp_dart_bound(args.faces, args.genus_max)
        params = {"faces": args.faces, "genus_max": args.genus_max}
    elif family == "extended":
        if args.genus is None or args.faces is None:
            print("extended needs --genus --faces [--exc]", file=sys.stderr)
            return EXIT_USAGE
        exc = _parse_ints(args.exc)
        graphs = enumeration.gen_extended(args.genus, args.faces, exc, bounds=bounds)
        records = [g.to_json() for g in graphs]
        dart_bound = max(
            (sum(c.dart_count for c in g.components) for g in graphs), default=0
        )
        params = {"genus": args.genus, "faces": args.faces, "exc": list(exc)}
    elif family == "nodal":
        if args.genus is None or args.faces is None:
            print("nodal needs --genus --faces and --kbar or --k/--b", file=sys.stderr)
            return EXIT_USAGE
        kbar = _parse_ints(args.kbar) if args.kbar is not None else None
        graphs = enumeration.gen_nodal(
            args.genus, args.faces, k=args.k, b=args.b, kbar=kbar, bounds=bounds
        )
        records = [g.to_json() for g in graphs]
        dart_bound = max(
            (sum(c.dart_count for c in g.components) for g in graphs), default=0
        )
        params = {
            "genus": args.genus,
            "faces": args.faces,
            "k": args.k,
            "b": args.b,
            "kbar": list(kbar) if kbar is not None else None,
        }
    else:
        print(f"unknown family {family}", file=sys.stderr)
        return EXIT_USAGE

    payload = {
        "metadata": _metadata(
            args,
            {"parameters": params, "dart_bound": dart_bound, "count": len(records)},
        ),
        "graphs": records,
    }
    _emit(payload, args.out)
    return EXIT_OK


def cmd_correlator(args) -> int:
    family = args.family
    threads = args.threads
    if family == "extended":
        table = amplitude.extended_table(args.degree, threads=threads)
    elif family == "refined":
        table = amplitude.refined_table(
            args.degree, k_max=args.k, genus_max=args.genus, threads=threads
        )
    elif family == "very-refined":
        table = amplitude.very_refined_table(
            args.degree, k_max=args.k, genus_max=args.genus, threads=threads
        )
    elif family == "kp":
        table = amplitude.kp_table(args.faces or 3, args.degree, threads=threads)
    else:
        print(f"unknown family {family}", file=sys.stderr)
        return EXIT_USAGE
    payload = {
        "metadata": _metadata(args, {"entries": len(table)}),
        "table": table.to_json(),
    }
    _emit(payload, args.out, fmt=args.format, csv_rows=table.to_csv_rows())
    return EXIT_OK


def cmd_oracle(args) -> int:
    m_vars = args.vars if args.vars is not None else args.max_degree
    table = oracle.oracle_table(args.max_degree, m_vars)
    payload = {
        "metadata": _metadata(args, {"entries": len(table), "vars": m_vars}),
        "table": table.to_json(),
    }
    _emit(payload, args.out, fmt=args.format, csv_rows=table.to_csv_rows())
    return EXIT_OK


def cmd_verify(args) -> int:
    degree = args.degree
    threads = args.threads
    modes = (
        ["string", "dilaton", "parity", "collapse", "partition_sum", "conjecture"]
        if args.mode == "all"
        else [args.mode.replace("-", "_")]
    )
    reports = []
    need_ext = {"string", "dilaton", "parity", "collapse", "conjecture"} & set(modes)
    ext = amplitude.extended_table(degree, threads=threads) if need_ext else None
    if "string" in modes:
        reports.append(amplitude.verify_string(ext, degree))
    if "dilaton" in modes:
        reports.append(amplitude.verify_dilaton(ext, degree))
    if "collapse" in modes or "partition_sum" in modes or "parity" in modes:
        ref = amplitude.refined_table(degree, threads=threads)
    if "partition_sum" in modes or "parity" in modes:
        vref = amplitude.very_refined_table(degree, threads=threads)
    if "conjecture" in modes or "parity" in modes:
        n_max = degree // 3 + 1
        kp = amplitude.kp_table(n_max, degree, threads=threads)
    if "parity" in modes:
        reports.append(amplitude.verify_parity([ext, ref, vref, kp]))
    if "collapse" in modes:
        reports.append(amplitude.verify_collapse(ext, ref, degree))
    if "partition_sum" in modes:
        reports.append(amplitude.verify_partition_sum(ref, vref))
    if "conjecture" in modes:
        rep = amplitude.verify_conjecture(ext, kp, degree)
        if args.genus is not None:
            rep.evidence = [e for e in rep.evidence if e["genus"] <= args.genus]
        reports.append(rep)

    payload = {
        "metadata": _metadata(args),
        "reports": [r.to_json() for r in reports],
    }
    _emit(payload, args.out)
    hard_fail = any(r.failures for r in reports)
    return EXIT_IDENTITY if hard_fail else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ribbonint",
        description="Exact refined open intersection numbers from nodal ribbon graphs",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output file (stdout when omitted)")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("enumerate", help="graph catalogs")
    p.add_argument("--family", required=True, choices=["critical", "kp", "nodal", "extended"])
    p.add_argument("--g", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--genus", type=int)
    p.add_argument("--faces", type=int)
    p.add_argument("--genus-max", dest="genus_max", type=int)
    p.add_argument("--exc", help="comma-separated sigma indices")
    p.add_argument("--kbar", help="comma-separated free-mark distribution")
    p.add_argument("--b", type=int)
    p.add_argument("--dart-max", dest="dart_max", type=int)
    common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("correlator", help="correlator tables")
    p.add_argument("--family", required=True, choices=["extended", "refined", "very-refined", "kp"])
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--faces", type=int, help="kp: maximal number of insertions")
    p.add_argument("--k", type=int, help="refined families: cap on sigma count")
    p.add_argument("--genus", type=int, help="refined families: cap on genus")
    common(p)
    p.set_defaults(func=cmd_correlator)

    p = sub.add_parser("oracle", help="Wick-pairing ground truth for kp")
    p.add_argument("--max-degree", dest="max_degree", type=int, required=True)
    p.add_argument("--vars", type=int, help="number of symbolic variables (default: max degree)")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="identity suite")
    p.add_argument(
        "mode",
        choices=["string", "dilaton", "parity", "collapse", "partition-sum", "conjecture", "all"],
    )
    p.add_argument("--degree", type=int, default=6)
    p.add_argument("--genus", type=int, help="conjecture: cap the reported evidence")
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    _apply_resource_cap()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code not in (0, None) else 0
    try:
        return args.func(args)
    except BoundsError as err:
        print(f"bounds: {err}", file=sys.stderr)
        return EXIT_BOUNDS
    except (SpuriousMonomialError, DegreeIdentityError, oracle.OracleError) as err:
        print(f"internal consistency: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as err:
        print(f"usage: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
