"""Dilithium signatures (round-3 CRYSTALS-Dilithium v3.1 wire format).

Lattice arithmetic runs in Z_q[x]/(x^256 + 1) with q = 8380417 through
the kernel backends; this module owns parameter sets, packing layouts,
and the Fiat-Shamir-with-aborts signing loop built on SHAKE.
"""

import os
from array import array
from dataclasses import dataclass
from typing import NamedTuple

from . import backends, keccak

DIL_Q = 8380417
DIL_N = 256

_D = 13  # bits dropped from t by power2round
_SEED_BYTES = 32
_CRH_BYTES = 64
_T0_POLY_BYTES = 416
_T1_POLY_BYTES = 320
_REJECTION_CAP = 1000

_VALID_GAMMA2 = ((DIL_Q - 1) // 88, (DIL_Q - 1) // 32)
_VALID_ALPHA = tuple(2 * g for g in _VALID_GAMMA2)


@dataclass(frozen=True)
class DilithiumParams:
    """One parameter set; all byte sizes are derived from the fields."""

    name: str
    k: int
    l: int
    eta: int
    tau: int
    gamma1: int
    gamma2: int
    omega: int

    @property
    def beta(self):
        return self.tau * self.eta

    @property
    def eta_poly_bytes(self):
        return 96 if self.eta == 2 else 128

    @property
    def z_poly_bytes(self):
        return 576 if self.gamma1 == 1 << 17 else 640

    @property
    def w1_poly_bytes(self):
        return 192 if self.gamma2 == (DIL_Q - 1) // 88 else 128

    @property
    def pk_bytes(self):
        return _SEED_BYTES + _T1_POLY_BYTES * self.k

    @property
    def sk_bytes(self):
        return (3 * _SEED_BYTES + (self.l + self.k) * self.eta_poly_bytes
                + _T0_POLY_BYTES * self.k)

    @property
    def sig_bytes(self):
        return _SEED_BYTES + self.l * self.z_poly_bytes + self.omega + self.k

    @property
    def sizes(self):
        return {
            "sk_bytes": self.sk_bytes,
            "pk_bytes": self.pk_bytes,
            "sig_bytes": self.sig_bytes,
        }


DILITHIUM2 = DilithiumParams(name="dilithium2", k=4, l=4, eta=2, tau=39,
                             gamma1=1 << 17, gamma2=(DIL_Q - 1) // 88, omega=80)
DILITHIUM3 = DilithiumParams(name="dilithium3", k=6, l=5, eta=4, tau=49,
                             gamma1=1 << 19, gamma2=(DIL_Q - 1) // 32, omega=55)
DILITHIUM5 = DilithiumParams(name="dilithium5", k=8, l=7, eta=2, tau=60,
                             gamma1=1 << 19, gamma2=(DIL_Q - 1) // 32, omega=75)

PARAMETER_SETS = {p.name: p for p in (DILITHIUM2, DILITHIUM3, DILITHIUM5)}

_BY_PK_LEN = {p.pk_bytes: p for p in PARAMETER_SETS.values()}
_BY_SK_LEN = {p.sk_bytes: p for p in PARAMETER_SETS.values()}


class DilithiumKeyPair(NamedTuple):
    public_key: bytes
    secret_key: bytes


class RingElementD(object):
    """Polynomial in Z_q[x]/(x^256 + 1) tagged with its evaluation domain."""

    __slots__ = ("coeffs", "domain")

    def __init__(self, coeffs, domain="normal"):
        if domain not in ("normal", "ntt"):
            raise ValueError(f"unknown domain tag {domain!r}")
        arr = array("i", coeffs)
        if len(arr) != DIL_N:
            raise ValueError(f"need {DIL_N} coefficients, got {len(arr)}")
        for c in arr:
            if not 0 <= c < DIL_Q:
                raise ValueError(f"coefficient {c} outside [0, {DIL_Q})")
        self.coeffs = arr
        self.domain = domain

    def __eq__(self, other):
        if not isinstance(other, RingElementD):
            return NotImplemented
        return self.domain == other.domain and self.coeffs == other.coeffs

    def __repr__(self):
        return f"RingElementD(domain={self.domain!r}, coeffs={list(self.coeffs[:4])}...)"


def power2round(r):
    """Split r as r1 * 2^13 + r0 with r0 centered in (-2^12, 2^12]."""
    if not 0 <= r < DIL_Q:
        raise ValueError(f"r must lie in [0, {DIL_Q})")
    r1 = (r + (1 << (_D - 1)) - 1) >> _D
    return r1, r - (r1 << _D)


def decompose(r, alpha):
    """Split r as r1 * alpha + r0 with r0 centered, fixing the q-1 wrap.

    Returns (r1, r0) with r0 in (-alpha/2, alpha/2]; the corner where
    r - r0 would reach q - 1 folds into r1 = 0 with r0 decremented.
    """
    if alpha not in _VALID_ALPHA:
        raise ValueError(f"alpha must be one of {_VALID_ALPHA}")
    if not 0 <= r < DIL_Q:
        raise ValueError(f"r must lie in [0, {DIL_Q})")
    r0 = r % alpha
    if r0 > alpha // 2:
        r0 -= alpha
    if r - r0 == DIL_Q - 1:
        return 0, r0 - 1
    return (r - r0) // alpha, r0


def make_hint(z, r, alpha):
    """1 when adding z to r changes the high bits, else 0."""
    high, _ = decompose(r, alpha)
    high2, _ = decompose((r + z) % DIL_Q, alpha)
    return int(high != high2)


def use_hint(h, r, alpha):
    """Recover the high bits of r + z from r and the hint bit."""
    if h not in (0, 1):
        raise ValueError("hint bit must be 0 or 1")
    m = (DIL_Q - 1) // alpha
    r1, r0 = decompose(r, alpha)
    if not h:
        return r1
    if r0 > 0:
        return (r1 + 1) % m
    return (r1 - 1) % m


def _zero_poly():
    return array("i", bytes(4 * DIL_N))


def _le16(n):
    return bytes((n & 0xFF, (n >> 8) & 0xFF))


def _sample_in_ball_poly(kern, backend_name, seed, tau):
    """Sparse polynomial with tau coefficients of +-1 from a SHAKE stream."""
    state = keccak.shake_stream("SHAKE256", bytes(seed), backend=backend_name)
    signs = int.from_bytes(state.squeeze(8), "little")
    c = _zero_poly()
    for i in range(DIL_N - tau, DIL_N):
        while True:
            j = state.squeeze(1)[0]
            if j <= i:
                break
        c[i] = c[j]
        c[j] = 1 if (signs & 1) == 0 else DIL_Q - 1
        signs >>= 1
    return c


def sample_in_ball(seed, tau, *, backend="auto"):
    """Challenge polynomial with tau signed ones, derived from seed."""
    if not 0 < tau <= 64:
        raise ValueError("tau must lie in (0, 64]")
    if len(seed) != _SEED_BYTES:
        raise ValueError("seed must be 32 bytes")
    kern = backends.get_kernels(backend)
    return RingElementD(_sample_in_ball_poly(kern, kern.BACKEND_NAME, seed, tau))


def _expand_a(kern, backend_name, rho, k, l):
    mat = []
    for i in range(k):
        row = []
        for j in range(l):
            state = keccak.SpongeState(168, backend=backend_name)
            state.absorb(rho + _le16((i << 8) + j))
            state.finalize()
            poly = _zero_poly()
            pos = 0
            while pos < DIL_N:
                pos = kern.dil_rej_uniform(poly, pos, state.squeeze(168))
            row.append(poly)
        mat.append(row)
    return mat


def _expand_s(kern, backend_name, rhoprime, eta, nonce):
    state = keccak.SpongeState(136, backend=backend_name)
    state.absorb(rhoprime + _le16(nonce))
    state.finalize()
    poly = _zero_poly()
    pos = 0
    while pos < DIL_N:
        pos = kern.dil_rej_eta(eta, poly, pos, state.squeeze(136))
    return poly


def _expand_mask(kern, backend_name, rhoprime, gamma1, z_bytes, nonce):
    buf = keccak.xof("SHAKE256", rhoprime + _le16(nonce), z_bytes,
                     backend=backend_name)
    poly = _zero_poly()
    kern.dil_unpack_z(buf, gamma1, poly)
    return poly


def _ntt_copy(kern, poly):
    out = array("i", poly)
    kern.dil_ntt(out)
    return out


def _matvec_acc(kern, mat, vec_hat):
    out = []
    for row in mat:
        acc = _zero_poly()
        for entry, v in zip(row, vec_hat):
            kern.dil_pointwise_acc(entry, v, acc)
        out.append(acc)
    return out


def _encode_hints(hint_polys, omega):
    buf = bytearray(omega + len(hint_polys))
    idx = 0
    for i, h in enumerate(hint_polys):
        for j in range(DIL_N):
            if h[j]:
                buf[idx] = j
                idx += 1
        buf[omega + i] = idx
    return bytes(buf)


def _decode_hints(data, omega, k):
    """Rebuild hint polynomials; None when the encoding is not canonical."""
    polys = []
    prev = 0
    for i in range(k):
        bound = data[omega + i]
        if bound < prev or bound > omega:
            return None
        h = _zero_poly()
        for j in range(prev, bound):
            if j > prev and data[j] <= data[j - 1]:
                return None
            h[data[j]] = 1
        prev = bound
        polys.append(h)
    for j in range(prev, omega):
        if data[j]:
            return None
    return polys


def dilithium_keygen(params, seed, *, backend="auto"):
    """Derive a key pair from a 32-byte seed."""
    if len(seed) != _SEED_BYTES:
        raise ValueError("seed must be 32 bytes")
    kern = backends.get_kernels(backend)
    bk = kern.BACKEND_NAME
    k, l = params.k, params.l

    expanded = keccak.xof("SHAKE256", seed, 128, backend=bk)
    rho, rhoprime, key = expanded[:32], expanded[32:96], expanded[96:]

    a_hat = _expand_a(kern, bk, rho, k, l)
    s1 = [_expand_s(kern, bk, rhoprime, params.eta, i) for i in range(l)]
    s2 = [_expand_s(kern, bk, rhoprime, params.eta, l + i) for i in range(k)]

    s1_hat = [_ntt_copy(kern, p) for p in s1]
    t = _matvec_acc(kern, a_hat, s1_hat)
    t1_parts = []
    t0_parts = []
    for i in range(k):
        kern.dil_inv_ntt(t[i])
        kern.dil_poly_add(t[i], s2[i])
        t1 = _zero_poly()
        t0 = _zero_poly()
        kern.dil_power2round_poly(t[i], t1, t0)
        t1_parts.append(kern.dil_pack_t1(t1))
        t0_parts.append(kern.dil_pack_t0(t0))

    public_key = rho + b"".join(t1_parts)
    tr = keccak.xof("SHAKE256", public_key, 32, backend=bk)
    secret_key = (rho + key + tr
                  + b"".join(kern.dil_pack_eta(p, params.eta) for p in s1)
                  + b"".join(kern.dil_pack_eta(p, params.eta) for p in s2)
                  + b"".join(t0_parts))
    return DilithiumKeyPair(public_key, secret_key)


def _unpack_sk(kern, params, secret_key):
    rho = secret_key[:32]
    key = secret_key[32:64]
    tr = secret_key[64:96]
    off = 96
    step = params.eta_poly_bytes
    s1 = []
    for _ in range(params.l):
        p = _zero_poly()
        kern.dil_unpack_eta(secret_key[off:off + step], params.eta, p)
        s1.append(p)
        off += step
    s2 = []
    for _ in range(params.k):
        p = _zero_poly()
        kern.dil_unpack_eta(secret_key[off:off + step], params.eta, p)
        s2.append(p)
        off += step
    t0 = []
    for _ in range(params.k):
        p = _zero_poly()
        kern.dil_unpack_t0(secret_key[off:off + _T0_POLY_BYTES], p)
        t0.append(p)
        off += _T0_POLY_BYTES
    return rho, key, tr, s1, s2, t0


def dilithium_sign(secret_key, message, *, mode="deterministic", rnd=None,
                   backend="auto"):
    """Produce a detached signature over message.

    Deterministic mode derives the signing randomness from the key and
    message alone; randomized mode mixes in 32 bytes of fresh (or
    caller-provided) randomness.
    """
    params = _BY_SK_LEN.get(len(secret_key))
    if params is None:
        raise ValueError(f"no parameter set has {len(secret_key)}-byte secret keys")
    kern = backends.get_kernels(backend)
    bk = kern.BACKEND_NAME
    k, l = params.k, params.l
    gamma1, gamma2 = params.gamma1, params.gamma2
    beta = params.beta

    rho, key, tr, s1, s2, t0 = _unpack_sk(kern, params, secret_key)
    mu = keccak.xof("SHAKE256", tr + bytes(message), _CRH_BYTES, backend=bk)

    if mode == "deterministic":
        if rnd is not None:
            raise ValueError("rnd only applies to randomized mode")
        rhoprime = keccak.xof("SHAKE256", key + mu, _CRH_BYTES, backend=bk)
    elif mode == "randomized":
        if rnd is None:
            rnd = os.urandom(_SEED_BYTES)
        elif len(rnd) != _SEED_BYTES:
            raise ValueError("rnd must be 32 bytes")
        rhoprime = keccak.xof("SHAKE256", key + rnd + mu, _CRH_BYTES, backend=bk)
    else:
        raise ValueError(f"unknown signing mode {mode!r}")

    a_hat = _expand_a(kern, bk, rho, k, l)
    s1_hat = [_ntt_copy(kern, p) for p in s1]
    s2_hat = [_ntt_copy(kern, p) for p in s2]
    t0_hat = [_ntt_copy(kern, p) for p in t0]

    for kappa in range(_REJECTION_CAP):
        y = [_expand_mask(kern, bk, rhoprime, gamma1, params.z_poly_bytes,
                          l * kappa + i) for i in range(l)]
        y_hat = [_ntt_copy(kern, p) for p in y]
        w = _matvec_acc(kern, a_hat, y_hat)
        w1 = []
        w0 = []
        for i in range(k):
            kern.dil_inv_ntt(w[i])
            hi = _zero_poly()
            lo = _zero_poly()
            kern.dil_decompose_poly(w[i], gamma2, hi, lo)
            w1.append(hi)
            w0.append(lo)
        w1_packed = b"".join(kern.dil_pack_w1(p, gamma2) for p in w1)
        c_tilde = keccak.xof("SHAKE256", mu + w1_packed, 32, backend=bk)
        c_hat = _ntt_copy(kern, _sample_in_ball_poly(kern, bk, c_tilde, params.tau))

        z = []
        ok = True
        for i in range(l):
            zi = _zero_poly()
            kern.dil_pointwise_acc(c_hat, s1_hat[i], zi)
            kern.dil_inv_ntt(zi)
            kern.dil_poly_add(zi, y[i])
            if kern.dil_chknorm(zi, gamma1 - beta):
                ok = False
                break
            z.append(zi)
        if not ok:
            continue

        cs2 = []
        for i in range(k):
            p = _zero_poly()
            kern.dil_pointwise_acc(c_hat, s2_hat[i], p)
            kern.dil_inv_ntt(p)
            kern.dil_poly_sub(w0[i], p)
            if kern.dil_chknorm(w0[i], gamma2 - beta):
                ok = False
                break
            cs2.append(p)
        if not ok:
            continue

        ct0 = []
        for i in range(k):
            p = _zero_poly()
            kern.dil_pointwise_acc(c_hat, t0_hat[i], p)
            kern.dil_inv_ntt(p)
            if kern.dil_chknorm(p, gamma2):
                ok = False
                break
            ct0.append(p)
        if not ok:
            continue

        hints = []
        count = 0
        for i in range(k):
            r = array("i", w[i])
            kern.dil_poly_sub(r, cs2[i])
            kern.dil_poly_add(r, ct0[i])
            h = _zero_poly()
            count += kern.dil_make_hint_poly(r, w1[i], gamma2, h)
            hints.append(h)
        if count > params.omega:
            continue

        return (c_tilde
                + b"".join(kern.dil_pack_z(p, gamma1) for p in z)
                + _encode_hints(hints, params.omega))

    raise RuntimeError(
        f"no signature found within {_REJECTION_CAP} rejection iterations; "
        "this indicates corrupted key material or broken sampling")


def dilithium_verify(public_key, message, signature, *, backend="auto"):
    """Check a detached signature; returns a bool and never raises on
    malformed signatures (an unknown public-key size is a caller error)."""
    params = _BY_PK_LEN.get(len(public_key))
    if params is None:
        raise ValueError(f"no parameter set has {len(public_key)}-byte public keys")
    if not isinstance(signature, (bytes, bytearray, memoryview)):
        return False
    signature = bytes(signature)
    if len(signature) != params.sig_bytes:
        return False
    kern = backends.get_kernels(backend)
    bk = kern.BACKEND_NAME
    k, l = params.k, params.l
    gamma1, gamma2 = params.gamma1, params.gamma2

    c_tilde = signature[:32]
    off = 32
    z = []
    for _ in range(l):
        p = _zero_poly()
        kern.dil_unpack_z(signature[off:off + params.z_poly_bytes], gamma1, p)
        if kern.dil_chknorm(p, gamma1 - params.beta):
            return False
        z.append(p)
        off += params.z_poly_bytes
    hints = _decode_hints(signature[off:], params.omega, k)
    if hints is None:
        return False

    rho = public_key[:32]
    t1_hat = []
    for i in range(k):
        p = _zero_poly()
        kern.dil_unpack_t1(
            public_key[32 + _T1_POLY_BYTES * i:32 + _T1_POLY_BYTES * (i + 1)], p)
        for j in range(DIL_N):
            p[j] <<= _D
        kern.dil_ntt(p)
        t1_hat.append(p)

    tr = keccak.xof("SHAKE256", public_key, 32, backend=bk)
    mu = keccak.xof("SHAKE256", tr + bytes(message), _CRH_BYTES, backend=bk)
    c_hat = _ntt_copy(kern, _sample_in_ball_poly(kern, bk, c_tilde, params.tau))

    a_hat = _expand_a(kern, bk, rho, k, l)
    z_hat = [_ntt_copy(kern, p) for p in z]
    w1_parts = []
    for i in range(k):
        acc = _zero_poly()
        for j in range(l):
            kern.dil_pointwise_acc(a_hat[i][j], z_hat[j], acc)
        ct1 = _zero_poly()
        kern.dil_pointwise_acc(c_hat, t1_hat[i], ct1)
        kern.dil_poly_sub(acc, ct1)
        kern.dil_inv_ntt(acc)
        w1 = _zero_poly()
        kern.dil_use_hint_poly(acc, hints[i], gamma2, w1)
        w1_parts.append(kern.dil_pack_w1(w1, gamma2))

    expected = keccak.xof("SHAKE256", mu + b"".join(w1_parts), 32, backend=bk)
    return expected == c_tilde
