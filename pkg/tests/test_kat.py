"""Response-file parser and replay-engine tests."""

from pathlib import Path

import pytest

from pqbench import dilithium, kat, kyber
from pqbench.drbg import AesCtrDrbg

_DATA = Path(__file__).parent / "data"

_SAMPLE = """\
# header comment

count = 0
seed = 00112233445566778899AABBCCDDEEFF00112233445566778899AABBCCDDEEFF00112233445566778899AABBCCDDEEFF
pk = AABB
sk = CCDD

count = 1
seed = FF112233445566778899AABBCCDDEEFF00112233445566778899AABBCCDDEEFF00112233445566778899AABBCCDDEEFF
pk = 1122
sk = 3344
"""


def test_parse_basic_records():
    records = kat.parse_rsp(_SAMPLE)
    assert [r.count for r in records] == [0, 1]
    assert records[0].fields["pk"] == bytes.fromhex("AABB")
    assert records[1].fields["sk"] == bytes.fromhex("3344")
    assert records[0].line == 3


def test_parse_official_file():
    records = kat.parse_rsp((_DATA / "PQCkemKAT_1632.rsp").read_text())
    assert len(records) == 100
    assert [r.count for r in records] == list(range(100))
    for r in records:
        assert len(r.fields["seed"]) == 48
        assert len(r.fields["pk"]) == 800
        assert len(r.fields["sk"]) == 1632
        assert len(r.fields["ct"]) == 768
        assert len(r.fields["ss"]) == 32


def test_parse_signature_file_int_fields():
    records = kat.parse_rsp((_DATA / "PQCsignKAT_2528.rsp").read_text())
    assert len(records) == 100
    first = records[0]
    assert first.fields["mlen"] == 33
    assert len(first.fields["msg"]) == 33
    assert first.fields["smlen"] == len(first.fields["sm"])


@pytest.mark.parametrize("text,line,needle", [
    ("garbage line\n", 1, "name = value"),
    ("count = 0\npk = zz\n", 2, "not valid hex"),
    ("pk = AA\n", 1, "before any count"),
    ("count = 0\npk = AA\npk = BB\n", 3, "duplicate"),
    ("count = 1\npk = AA\n", 1, "out of order"),
    ("count = 0\npk = AA\n\ncount = 5\n", 4, "out of order"),
    ("count = x\n", 1, "not an integer"),
    ("count = 0\nmlen = x\n", 2, "not an integer"),
    ("= AA\n", 1, "missing field name"),
    ("", 1, "no records"),
    ("# only a comment\n", 1, "no records"),
])
def test_parse_errors_carry_line_numbers(text, line, needle):
    with pytest.raises(kat.KatParseError) as info:
        kat.parse_rsp(text)
    assert info.value.line == line
    assert needle in str(info.value)


def _first_record(name):
    return kat.parse_rsp((_DATA / name).read_text())[0]


def test_replay_kem_record_passes():
    record = _first_record("PQCkemKAT_1632.rsp")
    assert kat.replay_kem_record(kyber.KYBER512, record) == []


def test_replay_sig_record_passes():
    record = _first_record("PQCsignKAT_2528.rsp")
    assert kat.replay_sig_record(dilithium.DILITHIUM2, record) == []


def test_replay_kem_detects_corruption():
    record = _first_record("PQCkemKAT_1632.rsp")
    ct = bytearray(record.fields["ct"])
    ct[0] ^= 0x10
    record.fields["ct"] = bytes(ct)
    mismatches = kat.replay_kem_record(kyber.KYBER512, record)
    assert [m.field for m in mismatches] == ["ct"]
    assert mismatches[0].count == 0
    assert mismatches[0].expected != mismatches[0].actual


def test_replay_sig_detects_corruption():
    record = _first_record("PQCsignKAT_2528.rsp")
    sm = bytearray(record.fields["sm"])
    sm[40] ^= 1
    record.fields["sm"] = bytes(sm)
    mismatches = kat.replay_sig_record(dilithium.DILITHIUM2, record)
    assert [m.field for m in mismatches] == ["sm"]


def test_replay_kem_pre_expanded_seeds():
    # A record carrying d/z/m directly must replay without the DRBG.
    record = _first_record("PQCkemKAT_1632.rsp")
    drbg = AesCtrDrbg(record.fields["seed"])
    record.fields["d"] = drbg.random_bytes(32)
    record.fields["z"] = drbg.random_bytes(32)
    record.fields["m"] = drbg.random_bytes(32)
    del record.fields["seed"]
    assert kat.replay_kem_record(kyber.KYBER512, record) == []


def test_replay_sig_pre_expanded_seed():
    record = _first_record("PQCsignKAT_2528.rsp")
    record.fields["keyseed"] = AesCtrDrbg(record.fields["seed"]).random_bytes(32)
    del record.fields["seed"]
    assert kat.replay_sig_record(dilithium.DILITHIUM2, record) == []


def test_replay_sig_accepts_detached_signature_field():
    record = _first_record("PQCsignKAT_2528.rsp")
    sm = record.fields.pop("sm")
    del record.fields["smlen"]
    record.fields["sig"] = sm[:dilithium.DILITHIUM2.sig_bytes]
    assert kat.replay_sig_record(dilithium.DILITHIUM2, record) == []


def test_replay_missing_fields_is_parse_error():
    record = _first_record("PQCkemKAT_1632.rsp")
    del record.fields["ss"]
    with pytest.raises(kat.KatParseError, match="missing fields: ss"):
        kat.replay_kem_record(kyber.KYBER512, record)


def test_replay_bad_seed_length_is_parse_error():
    record = _first_record("PQCkemKAT_1632.rsp")
    record.fields["seed"] = record.fields["seed"][:47]
    with pytest.raises(kat.KatParseError, match="48 bytes"):
        kat.replay_kem_record(kyber.KYBER512, record)


def test_replay_inconsistent_mlen_is_parse_error():
    record = _first_record("PQCsignKAT_2528.rsp")
    record.fields["mlen"] += 1
    with pytest.raises(kat.KatParseError, match="disagrees"):
        kat.replay_sig_record(dilithium.DILITHIUM2, record)


def test_replay_is_side_effect_free():
    record = _first_record("PQCkemKAT_1632.rsp")
    before = dict(record.fields)
    kat.replay_kem_record(kyber.KYBER512, record)
    kat.replay_kem_record(kyber.KYBER512, record)
    assert record.fields == before
