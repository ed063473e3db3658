"""Kyber key encapsulation (round-3 CRYSTALS-Kyber wire format).

Polynomial arithmetic runs in Z_q[x]/(x^256 + 1) with q = 3329 through
the kernel backends; this module owns parameter sets, byte layouts, and
the IND-CCA2 encapsulation flow built on the SHA-3 primitives.
"""

from array import array
from dataclasses import dataclass
from typing import NamedTuple

from . import backends, keccak

KYBER_Q = 3329
KYBER_N = 256

_SEED_BYTES = 32
_POLY_BYTES = 384  # 256 coefficients at 12 bits


@dataclass(frozen=True)
class KyberParams:
    """One parameter set; all byte sizes are derived from k, du, dv."""

    name: str
    k: int
    eta1: int
    eta2: int
    du: int
    dv: int

    @property
    def pk_bytes(self):
        return _POLY_BYTES * self.k + _SEED_BYTES

    @property
    def sk_bytes(self):
        return 2 * _POLY_BYTES * self.k + 3 * _SEED_BYTES

    @property
    def ct_bytes(self):
        return 32 * (self.du * self.k + self.dv)

    @property
    def ss_bytes(self):
        return 32

    @property
    def sizes(self):
        return {
            "sk_bytes": self.sk_bytes,
            "pk_bytes": self.pk_bytes,
            "ct_bytes": self.ct_bytes,
            "ss_bytes": self.ss_bytes,
        }


KYBER512 = KyberParams(name="kyber512", k=2, eta1=3, eta2=2, du=10, dv=4)
KYBER768 = KyberParams(name="kyber768", k=3, eta1=2, eta2=2, du=10, dv=4)
KYBER1024 = KyberParams(name="kyber1024", k=4, eta1=2, eta2=2, du=11, dv=5)

PARAMETER_SETS = {p.name: p for p in (KYBER512, KYBER768, KYBER1024)}

_BY_PK_LEN = {p.pk_bytes: p for p in PARAMETER_SETS.values()}
_BY_SK_LEN = {p.sk_bytes: p for p in PARAMETER_SETS.values()}


class KyberKeyPair(NamedTuple):
    public_key: bytes
    secret_key: bytes


class RingElementK:
    """Polynomial in Z_q[x]/(x^256 + 1) tagged with its evaluation domain.

    The tag ("normal" for coefficient form, "ntt" for the 128 quadratic
    subrings of the incomplete transform) makes mixed-domain arithmetic a
    contract violation instead of silent garbage.
    """

    __slots__ = ("coeffs", "domain")

    def __init__(self, coeffs, domain="normal"):
        if domain not in ("normal", "ntt"):
            raise ValueError(f"unknown domain tag {domain!r}")
        arr = array("h", coeffs)
        if len(arr) != KYBER_N:
            raise ValueError(f"need {KYBER_N} coefficients, got {len(arr)}")
        for c in arr:
            if not 0 <= c < KYBER_Q:
                raise ValueError(f"coefficient {c} outside [0, {KYBER_Q})")
        self.coeffs = arr
        self.domain = domain

    def __eq__(self, other):
        if not isinstance(other, RingElementK):
            return NotImplemented
        return self.domain == other.domain and self.coeffs == other.coeffs

    def __repr__(self):
        return f"RingElementK(domain={self.domain!r}, coeffs={list(self.coeffs[:4])}...)"


def _require_domain(element, domain, op):
    if element.domain != domain:
        raise ValueError(f"{op} needs a {domain!r}-domain element, got {element.domain!r}")


def _zero_poly():
    return array("h", bytes(2 * KYBER_N))


def ntt(element, *, backend="auto"):
    """Forward transform of a coefficient-form element."""
    _require_domain(element, "normal", "ntt")
    kern = backends.get_kernels(backend)
    out = array("h", element.coeffs)
    kern.kyber_ntt(out)
    return RingElementK(out, "ntt")


def inv_ntt(element, *, backend="auto"):
    """Inverse transform back to coefficient form."""
    _require_domain(element, "ntt", "inv_ntt")
    kern = backends.get_kernels(backend)
    out = array("h", element.coeffs)
    kern.kyber_inv_ntt(out)
    return RingElementK(out, "normal")


def ntt_multiply(a, b, *, backend="auto"):
    """Pointwise product of two transformed elements."""
    _require_domain(a, "ntt", "ntt_multiply")
    _require_domain(b, "ntt", "ntt_multiply")
    kern = backends.get_kernels(backend)
    acc = _zero_poly()
    kern.kyber_basemul_acc(a.coeffs, b.coeffs, acc)
    return RingElementK(acc, "ntt")


def cbd_sample(eta, stream, *, backend="auto"):
    """Centered binomial noise polynomial from a 64*eta byte stream."""
    if eta not in (2, 3):
        raise ValueError(f"eta must be 2 or 3, got {eta}")
    if len(stream) != 64 * eta:
        raise ValueError(f"need {64 * eta} stream bytes, got {len(stream)}")
    kern = backends.get_kernels(backend)
    out = _zero_poly()
    kern.kyber_cbd(eta, stream, out)
    return RingElementK(out, "normal")


def compress(element, d, *, backend="auto"):
    """Compress coefficients to d bits each and pack into 32*d bytes."""
    _require_domain(element, "normal", "compress")
    if d not in (1, 4, 5, 10, 11):
        raise ValueError(f"unsupported compression width {d}")
    kern = backends.get_kernels(backend)
    return kern.kyber_compress_poly(element.coeffs, d)


def decompress(data, d, *, backend="auto"):
    """Expand a 32*d byte packing back to a coefficient-form element."""
    if d not in (1, 4, 5, 10, 11):
        raise ValueError(f"unsupported compression width {d}")
    if len(data) != 32 * d:
        raise ValueError(f"need {32 * d} bytes for width {d}, got {len(data)}")
    kern = backends.get_kernels(backend)
    out = _zero_poly()
    kern.kyber_decompress_poly(data, d, out)
    return RingElementK(out, "normal")


def _uniform_poly(kern, backend_name, rho, x, y):
    """Rejection-sample one matrix entry from SHAKE128(rho || x || y)."""
    state = keccak.SpongeState(168, backend=backend_name)
    state.absorb(rho + bytes((x, y)))
    state.finalize()
    poly = _zero_poly()
    pos = 0
    while pos < KYBER_N:
        pos = kern.kyber_rej_uniform(poly, pos, state.squeeze(168))
    return poly


def _expand_matrix(kern, backend_name, rho, k, transposed):
    mat = []
    for i in range(k):
        row = []
        for j in range(k):
            x, y = (i, j) if transposed else (j, i)
            row.append(_uniform_poly(kern, backend_name, rho, x, y))
        mat.append(row)
    return mat


def _noise_poly(kern, backend_name, seed, nonce, eta):
    stream = keccak.xof("SHAKE256", seed + bytes((nonce,)), 64 * eta,
                        backend=backend_name)
    out = _zero_poly()
    kern.kyber_cbd(eta, stream, out)
    return out


def _matvec_acc(kern, mat, vec):
    """Row-wise accumulated pointwise products, all in the NTT domain."""
    out = []
    for row in mat:
        acc = _zero_poly()
        for entry, v in zip(row, vec):
            kern.kyber_basemul_acc(entry, v, acc)
        out.append(acc)
    return out


def _pack_vec12(kern, vec):
    return b"".join(kern.kyber_pack12(p) for p in vec)


def _unpack_vec12(kern, data, k):
    vec = []
    for i in range(k):
        p = _zero_poly()
        kern.kyber_unpack12(data[_POLY_BYTES * i:_POLY_BYTES * (i + 1)], p)
        vec.append(p)
    return vec


def _pke_encrypt(kern, backend_name, params, pk, message, coins):
    """Encrypt a 32-byte message under the underlying CPA scheme."""
    k = params.k
    t_hat = _unpack_vec12(kern, pk, k)
    rho = pk[-_SEED_BYTES:]
    a_t = _expand_matrix(kern, backend_name, rho, k, transposed=True)

    r_hat = []
    for i in range(k):
        p = _noise_poly(kern, backend_name, coins, i, params.eta1)
        kern.kyber_ntt(p)
        r_hat.append(p)
    e1 = [_noise_poly(kern, backend_name, coins, k + i, params.eta2)
          for i in range(k)]
    e2 = _noise_poly(kern, backend_name, coins, 2 * k, params.eta2)

    u = _matvec_acc(kern, a_t, r_hat)
    for i in range(k):
        kern.kyber_inv_ntt(u[i])
        kern.kyber_poly_add(u[i], e1[i])

    v = _zero_poly()
    for j in range(k):
        kern.kyber_basemul_acc(t_hat[j], r_hat[j], v)
    kern.kyber_inv_ntt(v)
    kern.kyber_poly_add(v, e2)
    m_poly = _zero_poly()
    kern.kyber_decompress_poly(message, 1, m_poly)
    kern.kyber_poly_add(v, m_poly)

    parts = [kern.kyber_compress_poly(u[i], params.du) for i in range(k)]
    parts.append(kern.kyber_compress_poly(v, params.dv))
    return b"".join(parts)


def _pke_decrypt(kern, params, sk_pke, ct):
    """Recover the 32-byte message with the underlying CPA secret key."""
    k = params.k
    du_bytes = 32 * params.du
    s_hat = _unpack_vec12(kern, sk_pke, k)

    u = []
    for i in range(k):
        p = _zero_poly()
        kern.kyber_decompress_poly(ct[du_bytes * i:du_bytes * (i + 1)],
                                   params.du, p)
        kern.kyber_ntt(p)
        u.append(p)
    v = _zero_poly()
    kern.kyber_decompress_poly(ct[du_bytes * k:], params.dv, v)

    mp = _zero_poly()
    for j in range(k):
        kern.kyber_basemul_acc(s_hat[j], u[j], mp)
    kern.kyber_inv_ntt(mp)
    kern.kyber_poly_sub(v, mp)
    return kern.kyber_compress_poly(v, 1)


def _ct_bytes_eq(a, b):
    """Aggregate-compare two equal-length byte strings.

    The loop touches every byte and branches only on the final
    accumulator, mirroring the branch-free comparison discipline of the
    reference code (Python offers no hard timing guarantees).
    """
    acc = 0
    for x, y in zip(a, b):
        acc |= x ^ y
    return acc == 0


def _ct_select(take_first, a, b):
    """Branch-free byte-wise select of a (flag true) or b (flag false)."""
    mask = -int(take_first) & 0xFF
    inv = mask ^ 0xFF
    return bytes((x & mask) | (y & inv) for x, y in zip(a, b))


def kyber_keygen(params, seed_d, seed_z, *, backend="auto"):
    """Derive a key pair from the two 32-byte seeds."""
    if len(seed_d) != _SEED_BYTES or len(seed_z) != _SEED_BYTES:
        raise ValueError("seed_d and seed_z must each be 32 bytes")
    kern = backends.get_kernels(backend)
    bk = kern.BACKEND_NAME
    k = params.k

    g = keccak.hash("SHA3-512", seed_d, backend=bk)
    rho, sigma = g[:32], g[32:]

    a = _expand_matrix(kern, bk, rho, k, transposed=False)
    s_hat = []
    for i in range(k):
        p = _noise_poly(kern, bk, sigma, i, params.eta1)
        kern.kyber_ntt(p)
        s_hat.append(p)
    e_hat = []
    for i in range(k):
        p = _noise_poly(kern, bk, sigma, k + i, params.eta1)
        kern.kyber_ntt(p)
        e_hat.append(p)

    t_hat = _matvec_acc(kern, a, s_hat)
    for i in range(k):
        kern.kyber_poly_add(t_hat[i], e_hat[i])

    public_key = _pack_vec12(kern, t_hat) + rho
    h_pk = keccak.hash("SHA3-256", public_key, backend=bk)
    secret_key = _pack_vec12(kern, s_hat) + public_key + h_pk + seed_z
    return KyberKeyPair(public_key, secret_key)


def kyber_encapsulate(public_key, seed_m, *, backend="auto"):
    """Encapsulate a fresh shared secret; returns (ciphertext, secret)."""
    params = _BY_PK_LEN.get(len(public_key))
    if params is None:
        raise ValueError(f"no parameter set has {len(public_key)}-byte public keys")
    if len(seed_m) != _SEED_BYTES:
        raise ValueError("seed_m must be 32 bytes")
    kern = backends.get_kernels(backend)
    bk = kern.BACKEND_NAME

    m = keccak.hash("SHA3-256", seed_m, backend=bk)
    h_pk = keccak.hash("SHA3-256", public_key, backend=bk)
    g = keccak.hash("SHA3-512", m + h_pk, backend=bk)
    k_bar, coins = g[:32], g[32:]

    ciphertext = _pke_encrypt(kern, bk, params, public_key, m, coins)
    h_ct = keccak.hash("SHA3-256", ciphertext, backend=bk)
    shared_secret = keccak.xof("SHAKE256", k_bar + h_ct, 32, backend=bk)
    return ciphertext, shared_secret


def kyber_decapsulate(secret_key, ciphertext, *, backend="auto"):
    """Recover the shared secret, with implicit rejection on mismatch."""
    params = _BY_SK_LEN.get(len(secret_key))
    if params is None:
        raise ValueError(f"no parameter set has {len(secret_key)}-byte secret keys")
    if len(ciphertext) != params.ct_bytes:
        raise ValueError(f"{params.name} ciphertexts are {params.ct_bytes} bytes, "
                         f"got {len(ciphertext)}")
    kern = backends.get_kernels(backend)
    bk = kern.BACKEND_NAME
    pke_bytes = _POLY_BYTES * params.k

    sk_pke = secret_key[:pke_bytes]
    public_key = secret_key[pke_bytes:pke_bytes + params.pk_bytes]
    h_pk = secret_key[pke_bytes + params.pk_bytes:pke_bytes + params.pk_bytes + 32]
    z = secret_key[-32:]

    m2 = _pke_decrypt(kern, params, sk_pke, ciphertext)
    g = keccak.hash("SHA3-512", m2 + h_pk, backend=bk)
    k_bar2, coins2 = g[:32], g[32:]

    ct2 = _pke_encrypt(kern, bk, params, public_key, m2, coins2)
    ok = _ct_bytes_eq(ciphertext, ct2)
    pre = _ct_select(ok, k_bar2, z)
    h_ct = keccak.hash("SHA3-256", ciphertext, backend=bk)
    return keccak.xof("SHAKE256", pre + h_ct, 32, backend=bk)
