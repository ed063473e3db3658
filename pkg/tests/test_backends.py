"""Cross-backend agreement: compiled kernels must match the reference
backend bit for bit, kernel by kernel and through full scheme flows."""

import hashlib
from array import array

import pytest

from pqbench import dilithium, keccak, kyber
from pqbench.backends import accelerated_available, get_kernels

_HAVE_ACCEL = accelerated_available()

needs_accel = pytest.mark.skipif(
    not _HAVE_ACCEL, reason="compiled backend not built"
)

KYBER_Q = 3329
DIL_Q = 8380417

_SEEDS = [b"backend-seed-%d" % i for i in range(5)]


def _stream(tag, n):
    return hashlib.shake_256(tag).digest(n)


def _kyber_poly(tag):
    raw = _stream(tag, 512)
    return array(
        "h",
        [int.from_bytes(raw[2 * i:2 * i + 2], "little") % KYBER_Q
         for i in range(256)],
    )


def _dil_poly(tag):
    raw = _stream(tag, 1024)
    return array(
        "i",
        [int.from_bytes(raw[4 * i:4 * i + 4], "little") % DIL_Q
         for i in range(256)],
    )


def _pair():
    return get_kernels("reference"), get_kernels("accelerated")


class TestSelection:
    def test_reference_always_available(self):
        kern = get_kernels("reference")
        assert kern.BACKEND_NAME == "reference"

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            get_kernels("turbo")

    def test_auto_resolves_to_a_real_backend(self):
        kern = get_kernels("auto")
        if _HAVE_ACCEL:
            assert kern.BACKEND_NAME == "accelerated"
        else:
            assert kern.BACKEND_NAME == "reference"

    def test_accelerated_request_is_explicit(self):
        if _HAVE_ACCEL:
            assert get_kernels("accelerated").BACKEND_NAME == "accelerated"
        else:
            with pytest.raises(RuntimeError):
                get_kernels("accelerated")


@needs_accel
class TestKeccakKernel:
    @pytest.mark.parametrize("seed", _SEEDS)
    def test_permutation_matches_reference(self, seed):
        ref, acc = _pair()
        raw = _stream(seed + b"-keccak", 200)
        la = array("Q", [int.from_bytes(raw[8 * i:8 * i + 8], "little")
                         for i in range(25)])
        lb = array("Q", la)
        for _ in range(8):
            ref.keccak_f1600(la)
            acc.keccak_f1600(lb)
            assert la.tolist() == lb.tolist()

    def test_accelerated_sponge_matches_hashlib(self):
        # Independent correctness check, not just backend agreement.
        for n in (0, 1, 71, 72, 135, 136, 167, 168, 500):
            data = _stream(b"sponge-%d" % n, n)
            assert (keccak.hash("SHA3-256", data, backend="accelerated")
                    == hashlib.sha3_256(data).digest())
            assert (keccak.xof("SHAKE128", data, 77, backend="accelerated")
                    == hashlib.shake_128(data).digest(77))
            assert (keccak.xof("SHAKE256", data, 77, backend="accelerated")
                    == hashlib.shake_256(data).digest(77))


@needs_accel
class TestKyberKernels:
    @pytest.mark.parametrize("seed", _SEEDS)
    def test_ntt_and_inverse(self, seed):
        ref, acc = _pair()
        a = _kyber_poly(seed + b"-kntt")
        b = array("h", a)
        ref.kyber_ntt(a)
        acc.kyber_ntt(b)
        assert a.tolist() == b.tolist()
        ref.kyber_inv_ntt(a)
        acc.kyber_inv_ntt(b)
        assert a.tolist() == b.tolist()

    @pytest.mark.parametrize("seed", _SEEDS)
    def test_basemul_acc(self, seed):
        ref, acc = _pair()
        a = _kyber_poly(seed + b"-kbma")
        b = _kyber_poly(seed + b"-kbmb")
        acc_r = _kyber_poly(seed + b"-kbmc")
        acc_a = array("h", acc_r)
        ref.kyber_basemul_acc(a, b, acc_r)
        acc.kyber_basemul_acc(a, b, acc_a)
        assert acc_r.tolist() == acc_a.tolist()

    @pytest.mark.parametrize("seed", _SEEDS)
    def test_add_sub(self, seed):
        ref, acc = _pair()
        a1 = _kyber_poly(seed + b"-kadd")
        a2 = array("h", a1)
        b = _kyber_poly(seed + b"-kaddb")
        ref.kyber_poly_add(a1, b)
        acc.kyber_poly_add(a2, b)
        assert a1.tolist() == a2.tolist()
        ref.kyber_poly_sub(a1, b)
        acc.kyber_poly_sub(a2, b)
        assert a1.tolist() == a2.tolist()

    @pytest.mark.parametrize("seed", _SEEDS)
    def test_rej_uniform(self, seed):
        ref, acc = _pair()
        buf = _stream(seed + b"-krej", 1000)
        out_r = array("h", bytes(512))
        out_a = array("h", bytes(512))
        pos_r = ref.kyber_rej_uniform(out_r, 3, buf)
        pos_a = acc.kyber_rej_uniform(out_a, 3, buf)
        assert pos_r == pos_a
        assert out_r.tolist() == out_a.tolist()

    def test_rej_uniform_short_buffer(self):
        ref, acc = _pair()
        buf = bytes([0x01, 0x02, 0x03, 0x04])  # trailing byte ignored
        out_r = array("h", bytes(512))
        out_a = array("h", bytes(512))
        assert (ref.kyber_rej_uniform(out_r, 0, buf)
                == acc.kyber_rej_uniform(out_a, 0, buf))
        assert out_r.tolist() == out_a.tolist()

    @pytest.mark.parametrize("eta", [2, 3])
    @pytest.mark.parametrize("seed", _SEEDS)
    def test_cbd(self, eta, seed):
        ref, acc = _pair()
        buf = _stream(seed + b"-kcbd%d" % eta, 64 * eta)
        out_r = array("h", bytes(512))
        out_a = array("h", bytes(512))
        ref.kyber_cbd(eta, buf, out_r)
        acc.kyber_cbd(eta, buf, out_a)
        assert out_r.tolist() == out_a.tolist()

    def test_cbd_rejects_bad_eta(self):
        _, acc = _pair()
        with pytest.raises(ValueError):
            acc.kyber_cbd(5, bytes(320), array("h", bytes(512)))

    @pytest.mark.parametrize("d", [1, 4, 5, 10, 11])
    @pytest.mark.parametrize("seed", _SEEDS[:3])
    def test_compress_decompress(self, d, seed):
        ref, acc = _pair()
        a = _kyber_poly(seed + b"-kcmp%d" % d)
        packed_r = ref.kyber_compress_poly(a, d)
        packed_a = acc.kyber_compress_poly(a, d)
        assert packed_r == packed_a
        out_r = array("h", bytes(512))
        out_a = array("h", bytes(512))
        ref.kyber_decompress_poly(packed_r, d, out_r)
        acc.kyber_decompress_poly(packed_a, d, out_a)
        assert out_r.tolist() == out_a.tolist()

    @pytest.mark.parametrize("seed", _SEEDS)
    def test_pack12(self, seed):
        ref, acc = _pair()
        a = _kyber_poly(seed + b"-kp12")
        assert ref.kyber_pack12(a) == acc.kyber_pack12(a)
        # Unpack reduces mod q, so feed raw bytes holding values above q.
        buf = _stream(seed + b"-kp12raw", 384)
        out_r = array("h", bytes(512))
        out_a = array("h", bytes(512))
        ref.kyber_unpack12(buf, out_r)
        acc.kyber_unpack12(buf, out_a)
        assert out_r.tolist() == out_a.tolist()


@needs_accel
class TestDilithiumKernels:
    @pytest.mark.parametrize("seed", _SEEDS)
    def test_ntt_and_inverse(self, seed):
        ref, acc = _pair()
        a = _dil_poly(seed + b"-dntt")
        b = array("i", a)
        ref.dil_ntt(a)
        acc.dil_ntt(b)
        assert a.tolist() == b.tolist()
        ref.dil_inv_ntt(a)
        acc.dil_inv_ntt(b)
        assert a.tolist() == b.tolist()

    @pytest.mark.parametrize("seed", _SEEDS)
    def test_pointwise_add_sub(self, seed):
        ref, acc = _pair()
        a = _dil_poly(seed + b"-dpwa")
        b = _dil_poly(seed + b"-dpwb")
        acc_r = _dil_poly(seed + b"-dpwc")
        acc_a = array("i", acc_r)
        ref.dil_pointwise_acc(a, b, acc_r)
        acc.dil_pointwise_acc(a, b, acc_a)
        assert acc_r.tolist() == acc_a.tolist()
        a2 = array("i", a)
        ref.dil_poly_add(a, b)
        acc.dil_poly_add(a2, b)
        assert a.tolist() == a2.tolist()
        ref.dil_poly_sub(a, b)
        acc.dil_poly_sub(a2, b)
        assert a.tolist() == a2.tolist()

    @pytest.mark.parametrize("seed", _SEEDS)
    def test_rej_uniform(self, seed):
        ref, acc = _pair()
        buf = _stream(seed + b"-drej", 1000)
        out_r = array("i", bytes(1024))
        out_a = array("i", bytes(1024))
        pos_r = ref.dil_rej_uniform(out_r, 7, buf)
        pos_a = acc.dil_rej_uniform(out_a, 7, buf)
        assert pos_r == pos_a
        assert out_r.tolist() == out_a.tolist()

    @pytest.mark.parametrize("eta", [2, 4])
    @pytest.mark.parametrize("seed", _SEEDS)
    def test_rej_eta(self, eta, seed):
        ref, acc = _pair()
        buf = _stream(seed + b"-deta%d" % eta, 300)
        out_r = array("i", bytes(1024))
        out_a = array("i", bytes(1024))
        pos_r = ref.dil_rej_eta(eta, out_r, 0, buf)
        pos_a = acc.dil_rej_eta(eta, out_a, 0, buf)
        assert pos_r == pos_a
        assert out_r.tolist() == out_a.tolist()

    def test_rej_eta_rejects_bad_eta(self):
        _, acc = _pair()
        with pytest.raises(ValueError):
            acc.dil_rej_eta(3, array("i", bytes(1024)), 0, bytes(10))

    @pytest.mark.parametrize("seed", _SEEDS)
    def test_power2round(self, seed):
        ref, acc = _pair()
        a = _dil_poly(seed + b"-dp2r")
        hi_r = array("i", bytes(1024))
        lo_r = array("i", bytes(1024))
        hi_a = array("i", bytes(1024))
        lo_a = array("i", bytes(1024))
        ref.dil_power2round_poly(a, hi_r, lo_r)
        acc.dil_power2round_poly(a, hi_a, lo_a)
        assert hi_r.tolist() == hi_a.tolist()
        assert lo_r.tolist() == lo_a.tolist()

    @pytest.mark.parametrize("gamma2", [(DIL_Q - 1) // 88, (DIL_Q - 1) // 32])
    @pytest.mark.parametrize("seed", _SEEDS[:3])
    def test_decompose_and_hints(self, gamma2, seed):
        ref, acc = _pair()
        r = _dil_poly(seed + b"-ddec")
        # Force the q-1 wrap branch into the comparison set.
        r[0] = DIL_Q - 1
        r[1] = 0
        hi_r = array("i", bytes(1024))
        lo_r = array("i", bytes(1024))
        hi_a = array("i", bytes(1024))
        lo_a = array("i", bytes(1024))
        ref.dil_decompose_poly(r, gamma2, hi_r, lo_r)
        acc.dil_decompose_poly(r, gamma2, hi_a, lo_a)
        assert hi_r.tolist() == hi_a.tolist()
        assert lo_r.tolist() == lo_a.tolist()
        # Hints against a decomposition of a different polynomial so that
        # a healthy fraction of positions disagree.
        other = _dil_poly(seed + b"-ddec2")
        w1 = array("i", bytes(1024))
        w0 = array("i", bytes(1024))
        ref.dil_decompose_poly(other, gamma2, w1, w0)
        h_r = array("i", bytes(1024))
        h_a = array("i", bytes(1024))
        n_r = ref.dil_make_hint_poly(r, w1, gamma2, h_r)
        n_a = acc.dil_make_hint_poly(r, w1, gamma2, h_a)
        assert n_r == n_a
        assert h_r.tolist() == h_a.tolist()
        used_r = array("i", bytes(1024))
        used_a = array("i", bytes(1024))
        ref.dil_use_hint_poly(r, h_r, gamma2, used_r)
        acc.dil_use_hint_poly(r, h_a, gamma2, used_a)
        assert used_r.tolist() == used_a.tolist()

    def test_chknorm_boundaries(self):
        ref, acc = _pair()
        half = (DIL_Q - 1) >> 1
        for value in (0, 1, 77, half, half + 1, DIL_Q - 77, DIL_Q - 1):
            a = array("i", bytes(1024))
            a[100] = value
            centered = value if value <= half else DIL_Q - value
            for bound in (centered, centered + 1, 1 << 17):
                if bound <= 0:
                    continue
                assert (ref.dil_chknorm(a, bound)
                        == acc.dil_chknorm(a, bound)), (value, bound)

    @pytest.mark.parametrize("gamma1", [1 << 17, 1 << 19])
    @pytest.mark.parametrize("seed", _SEEDS[:3])
    def test_pack_z(self, gamma1, seed):
        ref, acc = _pair()
        raw = _stream(seed + b"-dz%d" % gamma1, 1024)
        a = array(
            "i",
            [(int.from_bytes(raw[4 * i:4 * i + 4], "little")
              % (2 * gamma1 - 1) - (gamma1 - 1)) % DIL_Q
             for i in range(256)],
        )
        packed_r = ref.dil_pack_z(a, gamma1)
        packed_a = acc.dil_pack_z(a, gamma1)
        assert packed_r == packed_a
        out_r = array("i", bytes(1024))
        out_a = array("i", bytes(1024))
        ref.dil_unpack_z(packed_r, gamma1, out_r)
        acc.dil_unpack_z(packed_a, gamma1, out_a)
        assert out_r.tolist() == out_a.tolist()

    @pytest.mark.parametrize("seed", _SEEDS[:3])
    def test_pack_t1_t0(self, seed):
        ref, acc = _pair()
        raw = _stream(seed + b"-dt1", 512)
        t1 = array(
            "i",
            [int.from_bytes(raw[2 * i:2 * i + 2], "little") & 0x3FF
             for i in range(256)],
        )
        assert ref.dil_pack_t1(t1) == acc.dil_pack_t1(t1)
        buf = _stream(seed + b"-dt1raw", 320)
        out_r = array("i", bytes(1024))
        out_a = array("i", bytes(1024))
        ref.dil_unpack_t1(buf, out_r)
        acc.dil_unpack_t1(buf, out_a)
        assert out_r.tolist() == out_a.tolist()
        raw = _stream(seed + b"-dt0", 1024)
        t0 = array(
            "i",
            [(int.from_bytes(raw[4 * i:4 * i + 4], "little")
              % (1 << 13) - (1 << 12) + 1) % DIL_Q
             for i in range(256)],
        )
        assert ref.dil_pack_t0(t0) == acc.dil_pack_t0(t0)
        buf = _stream(seed + b"-dt0raw", 416)
        out_r = array("i", bytes(1024))
        out_a = array("i", bytes(1024))
        ref.dil_unpack_t0(buf, out_r)
        acc.dil_unpack_t0(buf, out_a)
        assert out_r.tolist() == out_a.tolist()

    @pytest.mark.parametrize("eta", [2, 4])
    @pytest.mark.parametrize("seed", _SEEDS[:3])
    def test_pack_eta(self, eta, seed):
        ref, acc = _pair()
        raw = _stream(seed + b"-de%d" % eta, 256)
        a = array(
            "i", [(raw[i] % (2 * eta + 1) - eta) % DIL_Q for i in range(256)]
        )
        packed_r = ref.dil_pack_eta(a, eta)
        packed_a = acc.dil_pack_eta(a, eta)
        assert packed_r == packed_a
        out_r = array("i", bytes(1024))
        out_a = array("i", bytes(1024))
        ref.dil_unpack_eta(packed_r, eta, out_r)
        acc.dil_unpack_eta(packed_a, eta, out_a)
        assert out_r.tolist() == out_a.tolist()

    @pytest.mark.parametrize("gamma2", [(DIL_Q - 1) // 88, (DIL_Q - 1) // 32])
    @pytest.mark.parametrize("seed", _SEEDS[:3])
    def test_pack_w1(self, gamma2, seed):
        ref, acc = _pair()
        m = (DIL_Q - 1) // (2 * gamma2)
        raw = _stream(seed + b"-dw1", 256)
        a = array("i", [raw[i] % m for i in range(256)])
        assert ref.dil_pack_w1(a, gamma2) == acc.dil_pack_w1(a, gamma2)


@needs_accel
class TestSchemeAgreement:
    @pytest.mark.parametrize("params", list(kyber.PARAMETER_SETS.values()),
                             ids=lambda p: p.name)
    def test_kem_flow_bit_identical(self, params):
        for i in range(2):
            d = _stream(b"kem-d-%d" % i, 32)
            z = _stream(b"kem-z-%d" % i, 32)
            m = _stream(b"kem-m-%d" % i, 32)
            kp_r = kyber.kyber_keygen(params, d, z, backend="reference")
            kp_a = kyber.kyber_keygen(params, d, z, backend="accelerated")
            assert kp_r.public_key == kp_a.public_key
            assert kp_r.secret_key == kp_a.secret_key
            ct_r, ss_r = kyber.kyber_encapsulate(
                kp_r.public_key, m, backend="reference")
            ct_a, ss_a = kyber.kyber_encapsulate(
                kp_a.public_key, m, backend="accelerated")
            assert ct_r == ct_a
            assert ss_r == ss_a
            assert kyber.kyber_decapsulate(
                kp_a.secret_key, ct_a, backend="accelerated") == ss_r

    @pytest.mark.parametrize("params",
                             list(dilithium.PARAMETER_SETS.values()),
                             ids=lambda p: p.name)
    def test_signature_flow_bit_identical(self, params):
        for i in range(2):
            seed = _stream(b"sig-seed-%d" % i, 32)
            msg = _stream(b"sig-msg-%d" % i, 50)
            kp_r = dilithium.dilithium_keygen(params, seed,
                                              backend="reference")
            kp_a = dilithium.dilithium_keygen(params, seed,
                                              backend="accelerated")
            assert kp_r.public_key == kp_a.public_key
            assert kp_r.secret_key == kp_a.secret_key
            sig_r = dilithium.dilithium_sign(kp_r.secret_key, msg,
                                             backend="reference")
            sig_a = dilithium.dilithium_sign(kp_a.secret_key, msg,
                                             backend="accelerated")
            assert sig_r == sig_a
            assert dilithium.dilithium_verify(kp_a.public_key, msg, sig_a,
                                              backend="accelerated")

    def test_randomized_signing_agrees_given_same_rnd(self):
        seed = _stream(b"sig-rand-seed", 32)
        rnd = _stream(b"sig-rand-rnd", 32)
        msg = b"randomized agreement"
        kp = dilithium.dilithium_keygen(dilithium.DILITHIUM2, seed,
                                        backend="reference")
        sig_r = dilithium.dilithium_sign(kp.secret_key, msg,
                                         mode="randomized", rnd=rnd,
                                         backend="reference")
        sig_a = dilithium.dilithium_sign(kp.secret_key, msg,
                                         mode="randomized", rnd=rnd,
                                         backend="accelerated")
        assert sig_r == sig_a
