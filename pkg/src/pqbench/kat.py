"""Known-answer response-file parsing and deterministic record replay.

Files follow the submission-package convention: ``name = value`` lines,
records opened by ``count = N``, hex-encoded byte fields, blank lines
between records. Replay expands each record's 48-byte seed through the
harness DRBG (or consumes pre-expanded per-record seed fields when
present) and compares every derived artifact byte-exactly.
"""

from dataclasses import dataclass, field

from . import dilithium, kyber
from .drbg import AesCtrDrbg

_INT_FIELDS = ("count", "mlen", "smlen")


class KatParseError(ValueError):
    """Malformed response file; carries the offending line number."""

    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class KatRecord:
    """One response-file record: its index, source line, and fields."""

    count: int
    line: int
    fields: dict = field(default_factory=dict)

    def require(self, *names):
        missing = [n for n in names if n not in self.fields]
        if missing:
            raise KatParseError(
                self.line,
                f"record {self.count} is missing fields: {', '.join(missing)}")
        return [self.fields[n] for n in names]


@dataclass
class KatMismatch:
    """One divergent field, with both values rendered for messages."""

    count: int
    field: str
    expected: str
    actual: str


def parse_rsp(text):
    """Parse response-file text into records; raises KatParseError."""
    records = []
    current = None
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise KatParseError(lineno, f"expected 'name = value', got {raw.strip()!r}")
        name, _, value = line.partition("=")
        name = name.strip()
        value = value.strip()
        if not name:
            raise KatParseError(lineno, "missing field name")
        if name == "count":
            if current is not None:
                records.append(current)
            try:
                idx = int(value)
            except ValueError:
                raise KatParseError(lineno, f"count is not an integer: {value!r}") from None
            if idx != len(records):
                raise KatParseError(lineno,
                                    f"count {idx} out of order; expected {len(records)}")
            current = KatRecord(count=idx, line=lineno)
            continue
        if current is None:
            raise KatParseError(lineno, f"field {name!r} before any count")
        if name in current.fields:
            raise KatParseError(lineno, f"duplicate field {name!r}")
        if name in _INT_FIELDS:
            try:
                current.fields[name] = int(value)
            except ValueError:
                raise KatParseError(lineno, f"{name} is not an integer: {value!r}") from None
        else:
            try:
                current.fields[name] = bytes.fromhex(value)
            except ValueError:
                raise KatParseError(lineno, f"{name} is not valid hex") from None
    if current is not None:
        records.append(current)
    if not records:
        raise KatParseError(max(lineno, 1), "no records found")
    return records


def _diff(mismatches, record, name, expected, actual):
    if expected != actual:
        mismatches.append(KatMismatch(record.count, name, expected.hex(), actual.hex()))


def _record_drbg(record):
    (seed,) = record.require("seed")
    if len(seed) != 48:
        raise KatParseError(record.line,
                            f"record {record.count} seed must be 48 bytes, got {len(seed)}")
    return AesCtrDrbg(seed)


def replay_kem_record(params, record, *, backend="auto"):
    """Replay one encapsulation record; returns mismatches (empty = pass)."""
    f = record.fields
    if all(n in f for n in ("d", "z", "m")):
        seed_d, seed_z, seed_m = f["d"], f["z"], f["m"]
    else:
        drbg = _record_drbg(record)
        seed_d = drbg.random_bytes(32)
        seed_z = drbg.random_bytes(32)
        seed_m = drbg.random_bytes(32)
    pk_want, sk_want, ct_want, ss_want = record.require("pk", "sk", "ct", "ss")

    mismatches = []
    kp = kyber.kyber_keygen(params, seed_d, seed_z, backend=backend)
    _diff(mismatches, record, "pk", pk_want, kp.public_key)
    _diff(mismatches, record, "sk", sk_want, kp.secret_key)
    ct, ss = kyber.kyber_encapsulate(kp.public_key, seed_m, backend=backend)
    _diff(mismatches, record, "ct", ct_want, ct)
    _diff(mismatches, record, "ss", ss_want, ss)
    decapsulated = kyber.kyber_decapsulate(kp.secret_key, ct, backend=backend)
    _diff(mismatches, record, "decapsulated ss", ss_want, decapsulated)
    return mismatches


def replay_sig_record(params, record, *, backend="auto"):
    """Replay one signature record; returns mismatches (empty = pass)."""
    f = record.fields
    (message,) = record.require("msg")
    if "mlen" in f and f["mlen"] != len(message):
        raise KatParseError(record.line,
                            f"record {record.count} mlen {f['mlen']} disagrees with "
                            f"msg length {len(message)}")
    if "keyseed" in f:
        keyseed = f["keyseed"]
    else:
        keyseed = _record_drbg(record).random_bytes(32)
    pk_want, sk_want = record.require("pk", "sk")

    mismatches = []
    kp = dilithium.dilithium_keygen(params, keyseed, backend=backend)
    _diff(mismatches, record, "pk", pk_want, kp.public_key)
    _diff(mismatches, record, "sk", sk_want, kp.secret_key)
    signature = dilithium.dilithium_sign(kp.secret_key, message, backend=backend)
    if "sm" in f:
        if "smlen" in f and f["smlen"] != len(f["sm"]):
            raise KatParseError(record.line,
                                f"record {record.count} smlen disagrees with sm length")
        _diff(mismatches, record, "sm", f["sm"], signature + message)
    elif "sig" in f:
        _diff(mismatches, record, "sig", f["sig"], signature)
    else:
        raise KatParseError(record.line,
                            f"record {record.count} has neither sm nor sig")
    if not dilithium.dilithium_verify(kp.public_key, message, signature,
                                      backend=backend):
        mismatches.append(KatMismatch(record.count, "verify", "true", "false"))
    return mismatches
