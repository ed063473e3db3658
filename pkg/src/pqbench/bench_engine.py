"""Timed measurement campaigns and report rendering.

Runs fixed-iteration timing loops with a warm-up batch, records
median/mean/min/max per operation, converts tick counts to
milliseconds, pairs backend runs into speedup rates, and renders the
three report shapes: per-level KEM blocks (table1), per-level signature
blocks (table2), and the merged total-time comparison (table3).

Python exposes no portable cycle counter, so the default tick source is
the monotonic nanosecond clock and stats carry an ``in_nanoseconds``
flag; a cycle-granular ticker can be injected, in which case tick
counts are converted through the configured clock frequency.
"""

import csv
import io
import itertools
import json
import os
import statistics
import time
from dataclasses import dataclass

from . import classical_baselines, dilithium, kyber

PQC_LEVELS = {
    "kyber": ("512", "768", "1024"),
    "dilithium": ("2", "3", "5"),
}

_SECURITY_BITS = {
    ("kyber", "512"): 128,
    ("kyber", "768"): 192,
    ("kyber", "1024"): 256,
    ("dilithium", "2"): 128,
    ("dilithium", "3"): 192,
    ("dilithium", "5"): 256,
}

# Comparison-table row order.
_TABLE3_ORDER = (
    "Kyber-512", "Kyber-768", "Kyber-1024",
    "Dilithium-2", "Dilithium-3", "Dilithium-5",
    "ECDSA(P-256)", "ECDSA(P-384)", "ECDSA(P-512)",
    "RSA-2048", "RSA-3072",
    "ECDH(P-256)", "ECDH(P-384)", "ECDH(P-521)",
)

_CSV_COLUMNS = (
    "scheme", "level", "backend", "op", "iterations",
    "median_cycles", "mean_cycles", "median_ms", "mean_ms", "speedup",
)

_FORMATS = ("text", "csv", "json")
_SHAPES = ("table1", "table2", "table3")

DEFAULT_CLOCK_GHZ = 3.3
DEFAULT_ITERATIONS = 1000
DEFAULT_WARMUP = 100

# Bound on pre-generated per-iteration inputs; the pools are cycled.
_POOL_CAP = 512


class EquivalenceError(RuntimeError):
    """The two backends disagreed on a shared seed; refuse speedups."""


@dataclass(frozen=True)
class TimingStats:
    """Order statistics for one operation's recorded tick counts."""

    op_name: str
    iterations: int
    median_cycles: float
    mean_cycles: float
    min_cycles: float
    max_cycles: float
    in_nanoseconds: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not (self.min_cycles <= self.median_cycles <= self.max_cycles):
            raise ValueError("median must lie between min and max")
        if not (self.min_cycles <= self.mean_cycles <= self.max_cycles):
            raise ValueError("mean must lie between min and max")


def stats_from_samples(op_name, samples, *, in_nanoseconds=False):
    """Reduce raw tick samples to TimingStats."""
    if not samples:
        raise ValueError("samples must be non-empty")
    return TimingStats(
        op_name=op_name,
        iterations=len(samples),
        median_cycles=float(statistics.median(samples)),
        mean_cycles=float(statistics.fmean(samples)),
        min_cycles=float(min(samples)),
        max_cycles=float(max(samples)),
        in_nanoseconds=in_nanoseconds,
    )


def measure(work, iterations, *, op_name=None, warmup=DEFAULT_WARMUP,
            ticker=None, ticker_is_cycles=False):
    """Time exactly `iterations` invocations of work after a warm-up.

    The warm-up batch runs untimed; statistics cover only the recorded
    invocations.  Without an injected ticker the monotonic nanosecond
    clock is used and the result is flagged as nanosecond-based.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if warmup < 0:
        raise ValueError("warmup must be >= 0")
    if ticker is None:
        ticker = time.perf_counter_ns
        ticker_is_cycles = False
    name = op_name if op_name is not None else getattr(work, "__name__", "op")
    for _ in range(warmup):
        work()
    samples = [0] * iterations
    for i in range(iterations):
        before = ticker()
        work()
        after = ticker()
        samples[i] = after - before
    return stats_from_samples(name, samples,
                              in_nanoseconds=not ticker_is_cycles)


def cycles_to_ms(cycles, clock_hz):
    """Convert a cycle count to milliseconds at a fixed clock."""
    if clock_hz <= 0:
        raise ValueError("clock_hz must be positive")
    return cycles / clock_hz * 1000.0


def speedup_rate(reference, accelerated):
    """reference median over accelerated median for the same operation."""
    if reference.op_name != accelerated.op_name:
        raise ValueError(
            f"speedup compares one operation with itself, got "
            f"{reference.op_name!r} vs {accelerated.op_name!r}")
    if reference.in_nanoseconds != accelerated.in_nanoseconds:
        raise ValueError("speedup needs both stats in the same tick unit")
    return reference.median_cycles / accelerated.median_cycles


@dataclass
class BenchReport:
    """One scheme/level/backend measurement campaign."""

    scheme: str
    level: str
    backend: str
    rows: list
    clock_hz: float

    def __post_init__(self):
        if self.clock_hz <= 0:
            raise ValueError("clock_hz must be positive")

    def row(self, op_name):
        for row in self.rows:
            if row.op_name == op_name:
                return row
        raise KeyError(op_name)

    def op_names(self):
        return [row.op_name for row in self.rows]

    def _ms(self, ticks, in_nanoseconds):
        if in_nanoseconds:
            return ticks / 1e6
        return cycles_to_ms(ticks, self.clock_hz)

    def median_ms(self, op_name):
        row = self.row(op_name)
        return self._ms(row.median_cycles, row.in_nanoseconds)

    def mean_ms(self, op_name):
        row = self.row(op_name)
        return self._ms(row.mean_cycles, row.in_nanoseconds)

    @property
    def total_median_ms(self):
        return sum(self._ms(r.median_cycles, r.in_nanoseconds)
                   for r in self.rows)

    @property
    def total_mean_ms(self):
        return sum(self._ms(r.mean_cycles, r.in_nanoseconds)
                   for r in self.rows)


def report_speedups(reference, accelerated):
    """Per-op and total speedups between two backend runs of one suite."""
    if (reference.scheme, reference.level) != (accelerated.scheme,
                                               accelerated.level):
        raise ValueError("speedups pair reports for the same scheme/level")
    if reference.backend == accelerated.backend:
        raise ValueError("speedups pair reports differing in backend")
    out = {}
    for row in reference.rows:
        out[row.op_name] = speedup_rate(row, accelerated.row(row.op_name))
    out["total"] = reference.total_median_ms / accelerated.total_median_ms
    return out


def _params(family, level):
    try:
        if family == "kyber":
            return kyber.PARAMETER_SETS[f"kyber{level}"]
        if family == "dilithium":
            return dilithium.PARAMETER_SETS[f"dilithium{level}"]
    except KeyError:
        pass
    raise ValueError(f"unknown scheme/level {family!r}/{level!r}")


def check_backend_equivalence(family, level, *, seed=b"equivalence-gate"):
    """Shared-seed output equality between the two backends.

    Returns True when every byte of the keygen/encapsulate/decapsulate
    (or keygen/sign/verify) pipeline matches across backends.
    """
    import hashlib

    params = _params(family, level)
    tag = seed + family.encode() + level.encode()
    stream = hashlib.shake_256(tag).digest(96)
    if family == "kyber":
        d, z, m = stream[:32], stream[32:64], stream[64:96]
        kp_r = kyber.kyber_keygen(params, d, z, backend="reference")
        kp_a = kyber.kyber_keygen(params, d, z, backend="accelerated")
        if kp_r != kp_a:
            return False
        ct_r, ss_r = kyber.kyber_encapsulate(kp_r.public_key, m,
                                             backend="reference")
        ct_a, ss_a = kyber.kyber_encapsulate(kp_a.public_key, m,
                                             backend="accelerated")
        if ct_r != ct_a or ss_r != ss_a:
            return False
        return (kyber.kyber_decapsulate(kp_r.secret_key, ct_r,
                                        backend="reference")
                == kyber.kyber_decapsulate(kp_a.secret_key, ct_a,
                                           backend="accelerated") == ss_r)
    kseed, msg = stream[:32], stream[32:64]
    kp_r = dilithium.dilithium_keygen(params, kseed, backend="reference")
    kp_a = dilithium.dilithium_keygen(params, kseed, backend="accelerated")
    if kp_r != kp_a:
        return False
    sig_r = dilithium.dilithium_sign(kp_r.secret_key, msg,
                                     backend="reference")
    sig_a = dilithium.dilithium_sign(kp_a.secret_key, msg,
                                     backend="accelerated")
    if sig_r != sig_a:
        return False
    return (dilithium.dilithium_verify(kp_r.public_key, msg, sig_r,
                                       backend="reference")
            and dilithium.dilithium_verify(kp_a.public_key, msg, sig_a,
                                           backend="accelerated"))


def _kyber_ops(params, backend, pool_n):
    # Input pools are drawn here, outside the timed region, and cycled;
    # preparation uses the fastest backend since outputs are identical.
    seeds = [(os.urandom(32), os.urandom(32)) for _ in range(pool_n)]
    gen_pool = itertools.cycle(seeds)

    def gen_work():
        d, z = next(gen_pool)
        kyber.kyber_keygen(params, d, z, backend=backend)

    keypair = kyber.kyber_keygen(params, os.urandom(32), os.urandom(32),
                                 backend="auto")
    msg_pool = itertools.cycle([os.urandom(32) for _ in range(pool_n)])

    def enc_work():
        kyber.kyber_encapsulate(keypair.public_key, next(msg_pool),
                                backend=backend)

    ct_pool = itertools.cycle([
        kyber.kyber_encapsulate(keypair.public_key, os.urandom(32),
                                backend="auto")[0]
        for _ in range(min(pool_n, 128))
    ])

    def dec_work():
        kyber.kyber_decapsulate(keypair.secret_key, next(ct_pool),
                                backend=backend)

    return [("gen", gen_work), ("enc", enc_work), ("dec", dec_work)]


def _dilithium_ops(params, backend, pool_n):
    seeds = [os.urandom(32) for _ in range(pool_n)]
    gen_pool = itertools.cycle(seeds)

    def gen_work():
        dilithium.dilithium_keygen(params, next(gen_pool), backend=backend)

    keypair = dilithium.dilithium_keygen(params, os.urandom(32),
                                         backend="auto")
    msg_pool = itertools.cycle([os.urandom(32) for _ in range(pool_n)])

    def sign_work():
        dilithium.dilithium_sign(keypair.secret_key, next(msg_pool),
                                 backend=backend)

    signed = [
        (msg, dilithium.dilithium_sign(keypair.secret_key, msg,
                                       backend="auto"))
        for msg in (os.urandom(32) for _ in range(min(pool_n, 64)))
    ]
    verify_pool = itertools.cycle(signed)

    def verify_work():
        msg, sig = next(verify_pool)
        dilithium.dilithium_verify(keypair.public_key, msg, sig,
                                   backend=backend)

    return [("gen", gen_work), ("sign", sign_work),
            ("verify", verify_work)]


def run_pqc_suite(family, level, backend, iterations, clock_hz, *,
                  warmup=DEFAULT_WARMUP, ticker=None,
                  ticker_is_cycles=False):
    """Measure gen/enc/dec or gen/sign/verify for one parameter set."""
    params = _params(family, level)
    pool_n = min(warmup + iterations, _POOL_CAP)
    if family == "kyber":
        ops = _kyber_ops(params, backend, pool_n)
    else:
        ops = _dilithium_ops(params, backend, pool_n)
    rows = [
        measure(work, iterations, op_name=name, warmup=warmup,
                ticker=ticker, ticker_is_cycles=ticker_is_cycles)
        for name, work in ops
    ]
    return BenchReport(scheme=family, level=level, backend=backend,
                       rows=rows, clock_hz=clock_hz)


def run_classical_suite(handle, scheme, iterations, clock_hz, *,
                        warmup=DEFAULT_WARMUP, composition=None,
                        ticker=None, ticker_is_cycles=False):
    """Measure one classical scheme under the composition policy."""
    policy = composition or classical_baselines.DEFAULT_COMPOSITION
    rows = []
    for row_name, base_op in policy[scheme.kind]:
        work = classical_baselines.run_classical_op(handle, scheme, base_op)
        rows.append(measure(work, iterations, op_name=row_name,
                            warmup=warmup, ticker=ticker,
                            ticker_is_cycles=ticker_is_cycles))
    return BenchReport(scheme=scheme.name,
                       level=str(scheme.claimed_security_bits),
                       backend="provider", rows=rows, clock_hz=clock_hz)


def _grouped(reports):
    groups = {}
    for report in reports:
        key = (report.scheme, report.level)
        groups.setdefault(key, {})[report.backend] = report
    return groups


def _display_label(report):
    if report.scheme == "kyber":
        return f"Kyber-{report.level}"
    if report.scheme == "dilithium":
        return f"Dilithium-{report.level}"
    return report.scheme


def _security_bits(report):
    bits = _SECURITY_BITS.get((report.scheme, report.level))
    if bits is not None:
        return bits
    return int(report.level)


def _level_sort_key(family):
    order = PQC_LEVELS.get(family, ())

    def key(item):
        (scheme, level), _ = item
        return order.index(level) if level in order else len(order)

    return key


def _table3_sort_key(item):
    (_, _), backends = item
    report = backends.get("reference") or next(iter(backends.values()))
    label = _display_label(report)
    if label in _TABLE3_ORDER:
        return (_TABLE3_ORDER.index(label), label)
    return (len(_TABLE3_ORDER), label)


def render_report(reports, format="text", shape="table3", *,
                  unavailable=()):
    """Render reports in one of the three table shapes.

    text mirrors the per-level block layout (table1/table2) or the
    merged Algorithm/Security Level/Total Time table (table3); csv and
    json carry the same values machine-readably.  For table3 the csv
    holds exactly one row per rendered table row; the block shapes add
    per-operation rows plus a total row per report.
    """
    if format not in _FORMATS:
        raise ValueError(f"unknown format {format!r}")
    if shape not in _SHAPES:
        raise ValueError(f"unknown shape {shape!r}")
    if format == "text":
        return _render_text(reports, shape, unavailable)
    if format == "csv":
        return _render_csv(reports, shape)
    return _render_json(reports, shape, unavailable)


_OPS_BY_FAMILY = {"kyber": ("gen", "enc", "dec"),
                  "dilithium": ("gen", "sign", "verify")}


def _size_lines(family, level):
    if family == "kyber":
        sizes = _params(family, level).sizes
        return [f"sk: {sizes['sk_bytes']}", f"pk: {sizes['pk_bytes']}",
                f"ct: {sizes['ct_bytes']}"]
    sizes = _params(family, level).sizes
    return [f"pk: {sizes['pk_bytes']}", f"sig: {sizes['sig_bytes']}", ""]


def _fmt_ms(value):
    return f"{value:.3f}"


def _render_text(reports, shape, unavailable):
    if shape == "table3":
        return _render_text_table3(reports, unavailable)
    family = "kyber" if shape == "table1" else "dilithium"
    groups = [item for item in _grouped(reports).items()
              if item[0][0] == family]
    groups.sort(key=_level_sort_key(family))
    ops = _OPS_BY_FAMILY[family]
    widths = (16, 18, 20, 14)
    header = ("Sizes (Bytes)", "Reference (ms)", "Accelerated (ms)",
              "Speedup Rate")
    lines = []
    ns_flagged = False
    for (scheme, level), backends in groups:
        ref = backends.get("reference")
        acc = backends.get("accelerated")
        lines.append(f"{family.upper()} {level}")
        lines.append("-" * sum(widths))
        lines.append("".join(h.ljust(w) for h, w in zip(header, widths)))
        size_cells = _size_lines(family, level)
        for op, size_cell in zip(ops, size_cells):
            ref_cell = (f"{op}: {_fmt_ms(ref.median_ms(op))}"
                        if ref else "n/a")
            acc_cell = (f"{op}: {_fmt_ms(acc.median_ms(op))}"
                        if acc else "n/a")
            if ref and acc:
                ratio = speedup_rate(ref.row(op), acc.row(op))
                speed_cell = f"{ratio:.2f}"
            else:
                speed_cell = "n/a"
            lines.append("".join(c.ljust(w) for c, w in zip(
                (size_cell, ref_cell, acc_cell, speed_cell), widths)))
        total_ref = _fmt_ms(ref.total_median_ms) if ref else "n/a"
        total_acc = _fmt_ms(acc.total_median_ms) if acc else "n/a"
        if ref and acc:
            total_speed = f"{ref.total_median_ms / acc.total_median_ms:.2f}"
        else:
            total_speed = "n/a"
        lines.append("".join(c.ljust(w) for c, w in zip(
            ("Total", total_ref, total_acc, total_speed), widths)))
        lines.append("")
        for report in backends.values():
            ns_flagged = ns_flagged or any(r.in_nanoseconds
                                           for r in report.rows)
    if ns_flagged:
        lines.append("note: timings use the monotonic nanosecond clock; "
                     "tick columns in csv/json hold nanoseconds")
    return "\n".join(lines).rstrip("\n") + "\n"


def _render_text_table3(reports, unavailable):
    widths = (18, 18, 16)
    lines = ["".join(h.ljust(w) for h, w in zip(
        ("Algorithm", "Security Level", "Total Time (ms)"), widths))]
    groups = sorted(_grouped(reports).items(), key=_table3_sort_key)
    p512_rendered = False
    for (_, _), backends in groups:
        report = backends.get("reference") or next(iter(backends.values()))
        label = _display_label(report)
        p512_rendered = p512_rendered or label == "ECDSA(P-512)"
        lines.append("".join(c.ljust(w) for c, w in zip(
            (label, f"{_security_bits(report)}-bit",
             _fmt_ms(report.total_median_ms)), widths)))
    for label in unavailable:
        lines.append(f"{label}: unavailable on this provider")
    if p512_rendered:
        lines.append(f"note: {classical_baselines.P512_FOOTNOTE}")
    return "\n".join(lines) + "\n"


def _csv_rows(reports, shape):
    rows = []
    if shape == "table3":
        groups = sorted(_grouped(reports).items(), key=_table3_sort_key)
        for (_, _), backends in groups:
            report = backends.get("reference") or next(
                iter(backends.values()))
            acc = backends.get("accelerated")
            if report.backend == "reference" and acc is not None:
                speed = report.total_median_ms / acc.total_median_ms
            else:
                speed = None
            rows.append((report.scheme, report.level, report.backend,
                         "total", report.rows[0].iterations,
                         sum(r.median_cycles for r in report.rows),
                         sum(r.mean_cycles for r in report.rows),
                         report.total_median_ms, report.total_mean_ms,
                         speed))
        return rows
    for (_, _), backends in _grouped(reports).items():
        ref = backends.get("reference")
        acc = backends.get("accelerated")
        for report in backends.values():
            paired = (acc is not None and ref is not None
                      and report is acc)
            for row in report.rows:
                speed = (speedup_rate(ref.row(row.op_name), row)
                         if paired else None)
                rows.append((report.scheme, report.level, report.backend,
                             row.op_name, row.iterations,
                             row.median_cycles, row.mean_cycles,
                             report.median_ms(row.op_name),
                             report.mean_ms(row.op_name), speed))
            total_speed = (ref.total_median_ms / acc.total_median_ms
                           if paired else None)
            rows.append((report.scheme, report.level, report.backend,
                         "total", report.rows[0].iterations,
                         sum(r.median_cycles for r in report.rows),
                         sum(r.mean_cycles for r in report.rows),
                         report.total_median_ms, report.total_mean_ms,
                         total_speed))
    return rows


def _render_csv(reports, shape):
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(_CSV_COLUMNS)
    for row in _csv_rows(reports, shape):
        writer.writerow(["" if v is None else v for v in row])
    return out.getvalue()


def _render_json(reports, shape, unavailable):
    groups = _grouped(reports)
    payload = {"shape": shape, "reports": [],
               "unavailable": list(unavailable)}
    for (_, _), backends in groups.items():
        ref = backends.get("reference")
        acc = backends.get("accelerated")
        for report in backends.values():
            speedups = None
            if report is acc and ref is not None:
                speedups = report_speedups(ref, acc)
            payload["reports"].append({
                "scheme": report.scheme,
                "level": report.level,
                "backend": report.backend,
                "clock_hz": report.clock_hz,
                "rows": [{
                    "op": row.op_name,
                    "iterations": row.iterations,
                    "median_cycles": row.median_cycles,
                    "mean_cycles": row.mean_cycles,
                    "min_cycles": row.min_cycles,
                    "max_cycles": row.max_cycles,
                    "in_nanoseconds": row.in_nanoseconds,
                    "median_ms": report.median_ms(row.op_name),
                    "mean_ms": report.mean_ms(row.op_name),
                } for row in report.rows],
                "total_median_ms": report.total_median_ms,
                "total_mean_ms": report.total_mean_ms,
                "speedups": speedups,
            })
    return json.dumps(payload, indent=2) + "\n"
