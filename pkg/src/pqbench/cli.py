"""Command-line front end: sizes, bench, kat, and compare subcommands.

Exit codes are uniform across subcommands: 0 success, 1 verification or
measurement failure, 2 usage or parse error, 3 backend-equivalence
failure.
"""

import argparse
import os
import sys

from . import bench_engine, classical_baselines, dilithium, kat, kyber
from .backends import accelerated_available

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_EQUIVALENCE = 3

_ALG_CHOICES = (
    "kyber", "dilithium",
    "kyber512", "kyber768", "kyber1024",
    "dilithium2", "dilithium3", "dilithium5",
)


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="pqbench",
        description="Benchmark and verify lattice KEM/signature "
                    "implementations against classical baselines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sizes = sub.add_parser("sizes",
                             help="print key/ciphertext/signature sizes")
    p_sizes.set_defaults(handler=cmd_sizes)

    p_bench = sub.add_parser("bench", help="run a measurement campaign")
    p_bench.add_argument("--alg", required=True, choices=_ALG_CHOICES,
                         help="scheme family or fused family+level name")
    p_bench.add_argument("--levels",
                         help="comma-separated levels (family form only)")
    p_bench.add_argument("--iters", type=_positive_int, default=1000,
                         help="timed iterations per op (default: 1000)")
    p_bench.add_argument("--clock-ghz", type=float, default=None,
                         help="clock for cycle conversion (default: "
                              "PQBENCH_CLOCK_GHZ or 3.3)")
    p_bench.add_argument("--backend", default="all",
                         choices=("reference", "accelerated", "all"))
    p_bench.add_argument("--format", default="text",
                         choices=("text", "csv", "json"))
    p_bench.add_argument("--out", help="write report to a file")
    p_bench.set_defaults(handler=cmd_bench)

    p_kat = sub.add_parser("kat", help="replay a known-answer response file")
    p_kat.add_argument("scheme", choices=("kyber", "dilithium"))
    p_kat.add_argument("level")
    p_kat.add_argument("file")
    p_kat.set_defaults(handler=cmd_kat)

    p_cmp = sub.add_parser("compare",
                           help="merged PQC vs classical total-time table")
    p_cmp.add_argument("--iters", type=_positive_int, default=100,
                       help="timed iterations per op (default: 100)")
    p_cmp.add_argument("--clock-ghz", type=float, default=None,
                       help="clock for cycle conversion (default: "
                            "PQBENCH_CLOCK_GHZ or 3.3)")
    p_cmp.add_argument("--format", default="text",
                       choices=("text", "csv", "json"))
    p_cmp.add_argument("--out", help="write report to a file")
    p_cmp.set_defaults(handler=cmd_compare)
    return parser


def _resolve_clock_hz(args, parser):
    ghz = args.clock_ghz
    if ghz is None:
        raw = os.environ.get("PQBENCH_CLOCK_GHZ", "")
        if raw:
            try:
                ghz = float(raw)
            except ValueError:
                parser.error(f"PQBENCH_CLOCK_GHZ is not a number: {raw!r}")
        else:
            ghz = bench_engine.DEFAULT_CLOCK_GHZ
    if ghz <= 0:
        parser.error("clock must be positive")
    return ghz * 1e9


def _resolve_warmup(parser):
    raw = os.environ.get("PQBENCH_WARMUP", "")
    if not raw:
        return bench_engine.DEFAULT_WARMUP
    try:
        value = int(raw)
    except ValueError:
        parser.error(f"PQBENCH_WARMUP is not an integer: {raw!r}")
    if value < 0:
        parser.error("PQBENCH_WARMUP must be >= 0")
    return value


def _emit(content, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(content)
    else:
        sys.stdout.write(content)


def cmd_sizes(args, parser):
    lines = []
    for params in kyber.PARAMETER_SETS.values():
        sizes = params.sizes
        lines.append(f"{params.name} sk={sizes['sk_bytes']} "
                     f"pk={sizes['pk_bytes']} ct={sizes['ct_bytes']}")
    for params in dilithium.PARAMETER_SETS.values():
        sizes = params.sizes
        lines.append(f"{params.name} pk={sizes['pk_bytes']} "
                     f"sig={sizes['sig_bytes']} sk={sizes['sk_bytes']}")
    print("\n".join(lines))
    return EXIT_OK


def _resolve_alg(args, parser):
    alg = args.alg
    if alg in ("kyber", "dilithium"):
        family = alg
        valid = bench_engine.PQC_LEVELS[family]
        if args.levels:
            levels = [item.strip() for item in args.levels.split(",")]
            for level in levels:
                if level not in valid:
                    parser.error(f"unknown level {level!r} for {family}")
        else:
            levels = list(valid)
        return family, levels
    if args.levels:
        parser.error("--levels applies only to family names "
                     "(kyber, dilithium)")
    for family in ("kyber", "dilithium"):
        if alg.startswith(family):
            return family, [alg[len(family):]]
    parser.error(f"unknown algorithm {alg!r}")


def cmd_bench(args, parser):
    family, levels = _resolve_alg(args, parser)
    clock_hz = _resolve_clock_hz(args, parser)
    if args.backend == "all":
        backends = ["reference"]
        if accelerated_available():
            backends.append("accelerated")
    elif args.backend == "accelerated" and not accelerated_available():
        parser.error("accelerated backend is not built on this platform")
    else:
        backends = [args.backend]
    if len(backends) == 2:
        for level in levels:
            if not bench_engine.check_backend_equivalence(family, level):
                print(f"backend equivalence check failed for "
                      f"{family}-{level}; refusing to report speedups",
                      file=sys.stderr)
                return EXIT_EQUIVALENCE
    warmup = _resolve_warmup(parser)
    reports = [
        bench_engine.run_pqc_suite(family, level, backend, args.iters,
                                   clock_hz, warmup=warmup)
        for level in levels
        for backend in backends
    ]
    shape = "table1" if family == "kyber" else "table2"
    _emit(bench_engine.render_report(reports, args.format, shape),
          args.out)
    return EXIT_OK


def cmd_kat(args, parser):
    valid = bench_engine.PQC_LEVELS[args.scheme]
    if args.level not in valid:
        parser.error(f"unknown level {args.level!r} for {args.scheme}")
    if args.scheme == "kyber":
        params = kyber.PARAMETER_SETS[f"kyber{args.level}"]
        replay = kat.replay_kem_record
    else:
        params = dilithium.PARAMETER_SETS[f"dilithium{args.level}"]
        replay = kat.replay_sig_record
    try:
        with open(args.file, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        records = kat.parse_rsp(text)
    except kat.KatParseError as exc:
        print(f"error: {args.file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    failures = 0
    first = None
    for record in records:
        try:
            mismatches = replay(params, record, backend="auto")
        except kat.KatParseError as exc:
            print(f"error: {args.file}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        if mismatches:
            failures += 1
            if first is None:
                first = (record.count, mismatches[0])
    passed = len(records) - failures
    print(f"{passed}/{len(records)} records passed")
    if failures:
        count, mismatch = first
        print(f"first mismatch: record {count} field {mismatch.field}")
        return EXIT_VERIFY
    return EXIT_OK


def cmd_compare(args, parser):
    clock_hz = _resolve_clock_hz(args, parser)
    warmup = _resolve_warmup(parser)
    reports = []
    for family in ("kyber", "dilithium"):
        for level in bench_engine.PQC_LEVELS[family]:
            reports.append(bench_engine.run_pqc_suite(
                family, level, "reference", args.iters, clock_hz,
                warmup=warmup))
    handle = classical_baselines.probe_provider()
    unavailable = []
    for scheme in classical_baselines.CLASSICAL_SCHEMES:
        if handle.supports(scheme):
            reports.append(bench_engine.run_classical_suite(
                handle, scheme, args.iters, clock_hz, warmup=warmup))
        else:
            unavailable.append(scheme.name)
    _emit(bench_engine.render_report(reports, args.format, "table3",
                                     unavailable=unavailable),
          args.out)
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    return args.handler(args, parser)


if __name__ == "__main__":
    sys.exit(main())
