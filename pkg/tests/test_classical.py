"""Classical-scheme adapter: scheme table, probing, and unit closures."""

import pytest

from pqbench import bench_engine, classical_baselines
from pqbench.classical_baselines import (
    CLASSICAL_SCHEMES,
    DEFAULT_COMPOSITION,
    CapabilityError,
    ClassicalScheme,
    ProviderHandle,
    probe_provider,
    run_classical_op,
)


def _scheme(name):
    return next(s for s in CLASSICAL_SCHEMES if s.name == name)


def _supported(name):
    scheme = _scheme(name)
    handle = probe_provider()
    if not handle.supports(scheme):
        pytest.skip(f"provider lacks {name}")
    return handle, scheme


class TestSchemeTable:
    def test_rows_and_claimed_bits(self):
        rows = {(s.kind, s.name, s.claimed_security_bits)
                for s in CLASSICAL_SCHEMES}
        assert rows == {
            ("signature", "ECDSA(P-256)", 128),
            ("signature", "ECDSA(P-384)", 192),
            ("signature", "ECDSA(P-512)", 256),
            ("encryption", "RSA-2048", 112),
            ("encryption", "RSA-3072", 128),
            ("key-exchange", "ECDH(P-256)", 128),
            ("key-exchange", "ECDH(P-384)", 192),
            ("key-exchange", "ECDH(P-521)", 256),
        }

    def test_names_unique(self):
        names = [s.name for s in CLASSICAL_SCHEMES]
        assert len(names) == len(set(names))

    def test_renamed_curve_footnote(self):
        assert "P-512" in classical_baselines.P512_FOOTNOTE
        assert "P-521" in classical_baselines.P512_FOOTNOTE


class TestProbe:
    def test_never_raises_and_caches(self):
        first = probe_provider()
        second = probe_provider()
        assert first is second
        assert isinstance(first, ProviderHandle)

    def test_full_provider_flags_every_scheme(self):
        pytest.importorskip("cryptography")
        handle = probe_provider()
        for scheme in CLASSICAL_SCHEMES:
            assert handle.supports(scheme), scheme.name

    def test_supports_reads_capability_set(self):
        empty = ProviderHandle("none", frozenset())
        assert not any(empty.supports(s) for s in CLASSICAL_SCHEMES)
        partial = ProviderHandle("test", frozenset({"RSA-2048"}))
        assert partial.supports(_scheme("RSA-2048"))
        assert not partial.supports(_scheme("RSA-3072"))


class TestCompositionPolicy:
    def test_covers_every_kind(self):
        assert set(DEFAULT_COMPOSITION) == {"key-exchange", "signature",
                                            "encryption"}
        assert set(DEFAULT_COMPOSITION) == {s.kind
                                            for s in CLASSICAL_SCHEMES}

    def test_key_exchange_counts_both_sides(self):
        rows = DEFAULT_COMPOSITION["key-exchange"]
        assert rows == (("keygen", "keygen"), ("agree-init", "agree"),
                        ("agree-resp", "agree"))

    def test_signature_counts_full_pipeline(self):
        assert DEFAULT_COMPOSITION["signature"] == (
            ("keygen", "keygen"), ("sign", "sign"), ("verify", "verify"))

    def test_encryption_excludes_keygen(self):
        rows = DEFAULT_COMPOSITION["encryption"]
        assert rows == (("encrypt", "encrypt"), ("decrypt", "decrypt"))

    def test_composed_ops_are_buildable(self):
        handle = probe_provider()
        for scheme_name in ("ECDH(P-256)", "ECDSA(P-256)", "RSA-2048"):
            scheme = _scheme(scheme_name)
            if not handle.supports(scheme):
                pytest.skip(f"provider lacks {scheme_name}")
            for _, base_op in DEFAULT_COMPOSITION[scheme.kind]:
                work = run_classical_op(handle, scheme, base_op)
                assert callable(work)


class TestRunClassicalOp:
    def test_unsupported_scheme_rejected(self):
        empty = ProviderHandle("none", frozenset())
        with pytest.raises(CapabilityError):
            run_classical_op(empty, _scheme("ECDH(P-256)"), "keygen")

    @pytest.mark.parametrize("scheme_name,bad_op", [
        ("ECDH(P-256)", "sign"),
        ("ECDH(P-256)", "encrypt"),
        ("ECDSA(P-256)", "agree"),
        ("ECDSA(P-256)", "decrypt"),
        ("RSA-2048", "agree"),
        ("RSA-2048", "verify"),
    ])
    def test_op_must_match_scheme_kind(self, scheme_name, bad_op):
        handle, scheme = _supported(scheme_name)
        with pytest.raises(CapabilityError):
            run_classical_op(handle, scheme, bad_op)

    def test_unknown_kind_has_no_valid_ops(self):
        handle = ProviderHandle("test", frozenset({"weird"}))
        scheme = ClassicalScheme("kem", "weird", 128)
        with pytest.raises(CapabilityError):
            run_classical_op(handle, scheme, "keygen")

    @pytest.mark.parametrize("scheme_name,op", [
        ("ECDH(P-256)", "keygen"),
        ("ECDH(P-256)", "agree"),
        ("ECDH(P-384)", "agree"),
        ("ECDH(P-521)", "agree"),
        ("ECDSA(P-256)", "keygen"),
        ("ECDSA(P-256)", "sign"),
        ("ECDSA(P-256)", "verify"),
        ("ECDSA(P-384)", "sign"),
        ("ECDSA(P-512)", "sign"),
        ("RSA-2048", "keygen"),
        ("RSA-2048", "encrypt"),
        ("RSA-2048", "decrypt"),
        ("RSA-3072", "encrypt"),
    ])
    def test_unit_closures_run_repeatedly(self, scheme_name, op):
        handle, scheme = _supported(scheme_name)
        work = run_classical_op(handle, scheme, op)
        assert work() is None
        assert work() is None

    def test_closures_are_independent(self):
        handle, scheme = _supported("ECDH(P-256)")
        first = run_classical_op(handle, scheme, "agree")
        first()
        second = run_classical_op(handle, scheme, "agree")
        second()
        first()


class TestObservedOrdering:
    """Coarse sanity on measured medians; generous iteration counts keep
    the expected gaps far above scheduler noise."""

    def _totals(self, names):
        handle = probe_provider()
        totals = {}
        for name in names:
            scheme = _scheme(name)
            if not handle.supports(scheme):
                pytest.skip(f"provider lacks {name}")
            report = bench_engine.run_classical_suite(
                handle, scheme, 20, 3.3e9, warmup=3)
            totals[name] = report.total_median_ms
        return totals

    def test_key_exchange_slows_with_curve_size(self):
        totals = self._totals(["ECDH(P-256)", "ECDH(P-384)",
                               "ECDH(P-521)"])
        assert (totals["ECDH(P-256)"] < totals["ECDH(P-384)"]
                < totals["ECDH(P-521)"])

    def test_signature_slows_with_curve_size(self):
        totals = self._totals(["ECDSA(P-256)", "ECDSA(P-384)",
                               "ECDSA(P-512)"])
        assert (totals["ECDSA(P-256)"] < totals["ECDSA(P-384)"]
                < totals["ECDSA(P-512)"])

    def test_private_key_op_dominates_public_op(self):
        handle, scheme = _supported("RSA-2048")
        report = bench_engine.run_classical_suite(handle, scheme, 20,
                                                  3.3e9, warmup=3)
        assert report.median_ms("decrypt") > report.median_ms("encrypt")
