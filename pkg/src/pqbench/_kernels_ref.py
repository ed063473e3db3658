"""Pure-Python compute kernels: the reference backend.

Every function here has a compiled twin in ``pqbench._accel`` with the
same name, signature, and canonical-output contract.  Polynomials cross
the kernel boundary as ``array('h')`` (Kyber) or ``array('i')``
(Dilithium) holding coefficients reduced into [0, q); Keccak state is an
``array('Q')`` of 25 lanes.  Keeping the boundary values canonical is
what makes reference and accelerated outputs bit-identical regardless of
each backend's internal reduction strategy.
"""

from array import array

BACKEND_NAME = "reference"

KYBER_Q = 3329
DIL_Q = 8380417

_MASK64 = (1 << 64) - 1

# Round constants for the 24 Keccak-f[1600] iota steps.
_RC = (
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A,
    0x8000000080008000, 0x000000000000808B, 0x0000000080000001,
    0x8000000080008081, 0x8000000000008009, 0x000000000000008A,
    0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089,
    0x8000000000008003, 0x8000000000008002, 0x8000000000000080,
    0x000000000000800A, 0x800000008000000A, 0x8000000080008081,
    0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
)

# Rho rotations and pi destinations for the 24-step lane walk starting
# at lane (1, 0); offsets are the triangular numbers mod 64.
_PI_WALK = []
_x, _y = 1, 0
for _t in range(24):
    _x, _y = _y, (2 * _x + 3 * _y) % 5
    _PI_WALK.append((_x + 5 * _y, ((_t + 1) * (_t + 2) // 2) % 64))
del _x, _y, _t


def keccak_f1600(lanes):
    """Apply the 24-round permutation in place; lanes is 25 uint64."""
    s = list(lanes)
    rc = _RC
    walk = _PI_WALK
    m = _MASK64
    for rnd in range(24):
        c0 = s[0] ^ s[5] ^ s[10] ^ s[15] ^ s[20]
        c1 = s[1] ^ s[6] ^ s[11] ^ s[16] ^ s[21]
        c2 = s[2] ^ s[7] ^ s[12] ^ s[17] ^ s[22]
        c3 = s[3] ^ s[8] ^ s[13] ^ s[18] ^ s[23]
        c4 = s[4] ^ s[9] ^ s[14] ^ s[19] ^ s[24]
        d0 = c4 ^ ((c1 << 1 | c1 >> 63) & m)
        d1 = c0 ^ ((c2 << 1 | c2 >> 63) & m)
        d2 = c1 ^ ((c3 << 1 | c3 >> 63) & m)
        d3 = c2 ^ ((c4 << 1 | c4 >> 63) & m)
        d4 = c3 ^ ((c0 << 1 | c0 >> 63) & m)
        for y in range(0, 25, 5):
            s[y] ^= d0
            s[y + 1] ^= d1
            s[y + 2] ^= d2
            s[y + 3] ^= d3
            s[y + 4] ^= d4
        cur = s[1]
        for idx, rot in walk:
            nxt = s[idx]
            s[idx] = ((cur << rot) | (cur >> (64 - rot))) & m if rot else cur
            cur = nxt
        for y in range(0, 25, 5):
            t0, t1, t2, t3, t4 = s[y], s[y + 1], s[y + 2], s[y + 3], s[y + 4]
            s[y] = t0 ^ (~t1 & t2)
            s[y + 1] = t1 ^ (~t2 & t3)
            s[y + 2] = t2 ^ (~t3 & t4)
            s[y + 3] = t3 ^ (~t4 & t0)
            s[y + 4] = t4 ^ (~t0 & t1)
        s[0] ^= rc[rnd]
    lanes[:] = array("Q", s)


def _bitrev(value, bits):
    out = 0
    for _ in range(bits):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


KYBER_ZETAS = [pow(17, _bitrev(k, 7), KYBER_Q) for k in range(128)]
_KYBER_N_INV = pow(128, -1, KYBER_Q)

DIL_ZETAS = [pow(1753, _bitrev(k, 8), DIL_Q) for k in range(256)]
_DIL_N_INV = pow(256, -1, DIL_Q)


def kyber_ntt(a):
    """7-layer negacyclic NTT over Z_3329, in place, canonical in/out."""
    q = KYBER_Q
    zetas = KYBER_ZETAS
    k = 1
    length = 128
    while length >= 2:
        start = 0
        while start < 256:
            zeta = zetas[k]
            k += 1
            for j in range(start, start + length):
                t = (zeta * a[j + length]) % q
                u = a[j]
                a[j + length] = (u - t) % q
                a[j] = (u + t) % q
            start += 2 * length
        length >>= 1


def kyber_inv_ntt(a):
    # Walking the forward table downward with a negated difference gives
    # the exact inverse butterfly: -zetas[127 - b] is the inverse of the
    # forward layer's zetas[64 + b], and likewise up the tree.
    q = KYBER_Q
    zetas = KYBER_ZETAS
    k = 127
    length = 2
    while length <= 128:
        start = 0
        while start < 256:
            zeta = zetas[k]
            k -= 1
            for j in range(start, start + length):
                t = a[j]
                a[j] = (t + a[j + length]) % q
                a[j + length] = (zeta * (a[j + length] - t)) % q
            start += 2 * length
        length <<= 1
    n_inv = _KYBER_N_INV
    for j in range(256):
        a[j] = (a[j] * n_inv) % q


def kyber_basemul_acc(a, b, acc):
    """acc += a*b in the NTT domain (128 quadratic subring products)."""
    q = KYBER_Q
    zetas = KYBER_ZETAS
    for i in range(64):
        j = 4 * i
        zeta = zetas[64 + i]
        a0, a1, a2, a3 = a[j], a[j + 1], a[j + 2], a[j + 3]
        b0, b1, b2, b3 = b[j], b[j + 1], b[j + 2], b[j + 3]
        acc[j] = (acc[j] + a0 * b0 + zeta * a1 * b1) % q
        acc[j + 1] = (acc[j + 1] + a0 * b1 + a1 * b0) % q
        acc[j + 2] = (acc[j + 2] + a2 * b2 - zeta * a3 * b3) % q
        acc[j + 3] = (acc[j + 3] + a2 * b3 + a3 * b2) % q


def kyber_poly_add(a, b):
    q = KYBER_Q
    for j in range(256):
        a[j] = (a[j] + b[j]) % q


def kyber_poly_sub(a, b):
    q = KYBER_Q
    for j in range(256):
        a[j] = (a[j] - b[j]) % q


def kyber_rej_uniform(out, pos, buf):
    """Fill out[pos:] with uniform mod-q values from 3-byte groups."""
    q = KYBER_Q
    i = 0
    n = len(buf)
    while pos < 256 and i + 3 <= n:
        b0 = buf[i]
        b1 = buf[i + 1]
        b2 = buf[i + 2]
        i += 3
        v0 = b0 | ((b1 & 0x0F) << 8)
        v1 = (b1 >> 4) | (b2 << 4)
        if v0 < q:
            out[pos] = v0
            pos += 1
        if pos < 256 and v1 < q:
            out[pos] = v1
            pos += 1
    return pos


def kyber_cbd(eta, buf, out):
    """Centered binomial sample from 64*eta bytes, canonical output."""
    q = KYBER_Q
    if eta == 2:
        for i in range(32):
            t = int.from_bytes(buf[4 * i:4 * i + 4], "little")
            d = (t & 0x55555555) + ((t >> 1) & 0x55555555)
            for j in range(8):
                a = (d >> (4 * j)) & 0x3
                b = (d >> (4 * j + 2)) & 0x3
                out[8 * i + j] = (a - b) % q
    elif eta == 3:
        for i in range(64):
            t = int.from_bytes(buf[3 * i:3 * i + 3], "little")
            d = (t & 0x249249) + ((t >> 1) & 0x249249) + ((t >> 2) & 0x249249)
            for j in range(4):
                a = (d >> (6 * j)) & 0x7
                b = (d >> (6 * j + 3)) & 0x7
                out[4 * i + j] = (a - b) % q
    else:
        raise ValueError("eta must be 2 or 3")


def kyber_compress_poly(a, d):
    """Compress each coefficient to d bits and pack LSB-first."""
    q = KYBER_Q
    half = q // 2
    mask = (1 << d) - 1
    out = bytearray((256 * d) // 8)
    accum = 0
    bits = 0
    idx = 0
    for j in range(256):
        c = (((a[j] << d) + half) // q) & mask
        accum |= c << bits
        bits += d
        while bits >= 8:
            out[idx] = accum & 0xFF
            accum >>= 8
            bits -= 8
            idx += 1
    return bytes(out)


def kyber_decompress_poly(buf, d, out):
    q = KYBER_Q
    mask = (1 << d) - 1
    accum = 0
    bits = 0
    idx = 0
    for j in range(256):
        while bits < d:
            accum |= buf[idx] << bits
            idx += 1
            bits += 8
        c = accum & mask
        accum >>= d
        bits -= d
        out[j] = (c * q + (1 << (d - 1))) >> d


def kyber_pack12(a):
    out = bytearray(384)
    for i in range(128):
        c0 = a[2 * i]
        c1 = a[2 * i + 1]
        out[3 * i] = c0 & 0xFF
        out[3 * i + 1] = (c0 >> 8) | ((c1 & 0x0F) << 4)
        out[3 * i + 2] = c1 >> 4
    return bytes(out)


def kyber_unpack12(buf, out):
    for i in range(128):
        b0 = buf[3 * i]
        b1 = buf[3 * i + 1]
        b2 = buf[3 * i + 2]
        out[2 * i] = (b0 | ((b1 & 0x0F) << 8)) % KYBER_Q
        out[2 * i + 1] = ((b1 >> 4) | (b2 << 4)) % KYBER_Q


def dil_ntt(a):
    """Full 256-point NTT over Z_8380417, in place, canonical in/out."""
    q = DIL_Q
    zetas = DIL_ZETAS
    k = 0
    length = 128
    while length >= 1:
        start = 0
        while start < 256:
            k += 1
            zeta = zetas[k]
            for j in range(start, start + length):
                t = (zeta * a[j + length]) % q
                u = a[j]
                a[j + length] = (u - t) % q
                a[j] = (u + t) % q
            start += 2 * length
        length >>= 1


def dil_inv_ntt(a):
    # Same inverse-butterfly trick as kyber_inv_ntt: forward table walked
    # downward with the difference negated.
    q = DIL_Q
    zetas = DIL_ZETAS
    k = 256
    length = 1
    while length <= 128:
        start = 0
        while start < 256:
            k -= 1
            zeta = zetas[k]
            for j in range(start, start + length):
                t = a[j]
                a[j] = (t + a[j + length]) % q
                a[j + length] = (zeta * (a[j + length] - t)) % q
            start += 2 * length
        length <<= 1
    n_inv = _DIL_N_INV
    for j in range(256):
        a[j] = (a[j] * n_inv) % q


def dil_pointwise_acc(a, b, acc):
    q = DIL_Q
    for j in range(256):
        acc[j] = (acc[j] + a[j] * b[j]) % q


def dil_poly_add(a, b):
    q = DIL_Q
    for j in range(256):
        a[j] = (a[j] + b[j]) % q


def dil_poly_sub(a, b):
    q = DIL_Q
    for j in range(256):
        a[j] = (a[j] - b[j]) % q


def dil_rej_uniform(out, pos, buf):
    """Fill out[pos:] with uniform mod-q values from 3-byte groups."""
    q = DIL_Q
    i = 0
    n = len(buf)
    while pos < 256 and i + 3 <= n:
        t = (buf[i] | (buf[i + 1] << 8) | (buf[i + 2] << 16)) & 0x7FFFFF
        i += 3
        if t < q:
            out[pos] = t
            pos += 1
    return pos


def dil_rej_eta(eta, out, pos, buf):
    """Rejection-sample half-byte candidates into [-eta, eta] mod q."""
    q = DIL_Q
    i = 0
    n = len(buf)
    if eta == 2:
        while pos < 256 and i < n:
            b = buf[i]
            i += 1
            t0 = b & 0x0F
            t1 = b >> 4
            if t0 < 15:
                out[pos] = (2 - t0 % 5) % q
                pos += 1
            if pos < 256 and t1 < 15:
                out[pos] = (2 - t1 % 5) % q
                pos += 1
    elif eta == 4:
        while pos < 256 and i < n:
            b = buf[i]
            i += 1
            t0 = b & 0x0F
            t1 = b >> 4
            if t0 < 9:
                out[pos] = (4 - t0) % q
                pos += 1
            if pos < 256 and t1 < 9:
                out[pos] = (4 - t1) % q
                pos += 1
    else:
        raise ValueError("eta must be 2 or 4")
    return pos


def dil_power2round_poly(a, a1, a0):
    """Split each coefficient as c = c1*2^13 + c0, c0 in (-2^12, 2^12]."""
    q = DIL_Q
    for j in range(256):
        c = a[j]
        c1 = (c + (1 << 12) - 1) >> 13
        a1[j] = c1
        a0[j] = (c - (c1 << 13)) % q


def dil_decompose_poly(a, gamma2, a1, a0):
    """High/low split with alpha = 2*gamma2 and the q-1 wrap fixed up."""
    q = DIL_Q
    alpha = 2 * gamma2
    for j in range(256):
        c = a[j]
        r0 = c % alpha
        if r0 > gamma2:
            r0 -= alpha
        if c - r0 == q - 1:
            a1[j] = 0
            a0[j] = (r0 - 1) % q
        else:
            a1[j] = (c - r0) // alpha
            a0[j] = r0 % q


def dil_make_hint_poly(r, w1, gamma2, h):
    """h[j] = 1 where the high bits of r disagree with w1; returns count."""
    q = DIL_Q
    alpha = 2 * gamma2
    count = 0
    for j in range(256):
        c = r[j]
        r0 = c % alpha
        if r0 > gamma2:
            r0 -= alpha
        if c - r0 == q - 1:
            high = 0
        else:
            high = (c - r0) // alpha
        bit = 1 if high != w1[j] else 0
        h[j] = bit
        count += bit
    return count


def dil_use_hint_poly(r, h, gamma2, out):
    """Recover high bits of r, nudged by hint bits."""
    q = DIL_Q
    alpha = 2 * gamma2
    m = (q - 1) // alpha
    for j in range(256):
        c = r[j]
        r0 = c % alpha
        if r0 > gamma2:
            r0 -= alpha
        if c - r0 == q - 1:
            high = 0
            r0 -= 1
        else:
            high = (c - r0) // alpha
        if h[j]:
            if r0 > 0:
                out[j] = (high + 1) % m
            else:
                out[j] = (high - 1) % m
        else:
            out[j] = high


def dil_chknorm(a, bound):
    """True when any coefficient has centered magnitude >= bound."""
    q = DIL_Q
    half = (q - 1) >> 1
    for j in range(256):
        c = a[j]
        if c > half:
            c = q - c
        if c >= bound:
            return True
    return False


def _pack_bits(values, width):
    out = bytearray((256 * width) // 8)
    accum = 0
    bits = 0
    idx = 0
    for v in values:
        accum |= v << bits
        bits += width
        while bits >= 8:
            out[idx] = accum & 0xFF
            accum >>= 8
            bits -= 8
            idx += 1
    return bytes(out)


def _unpack_bits(buf, width):
    mask = (1 << width) - 1
    vals = [0] * 256
    accum = 0
    bits = 0
    idx = 0
    for j in range(256):
        while bits < width:
            accum |= buf[idx] << bits
            idx += 1
            bits += 8
        vals[j] = accum & mask
        accum >>= width
        bits -= width
    return vals


def dil_pack_z(a, gamma1):
    """Pack gamma1 - c (centered) at 18 or 20 bits per coefficient."""
    q = DIL_Q
    half = (q - 1) >> 1
    width = 18 if gamma1 == (1 << 17) else 20
    vals = []
    for j in range(256):
        c = a[j]
        if c > half:
            c -= q
        vals.append(gamma1 - c)
    return _pack_bits(vals, width)


def dil_unpack_z(buf, gamma1, out):
    q = DIL_Q
    width = 18 if gamma1 == (1 << 17) else 20
    vals = _unpack_bits(buf, width)
    for j in range(256):
        out[j] = (gamma1 - vals[j]) % q


def dil_pack_t1(a):
    return _pack_bits(a, 10)


def dil_unpack_t1(buf, out):
    vals = _unpack_bits(buf, 10)
    for j in range(256):
        out[j] = vals[j]


def dil_pack_t0(a):
    """Pack 2^12 - c (centered) at 13 bits per coefficient."""
    q = DIL_Q
    half = (q - 1) >> 1
    vals = []
    for j in range(256):
        c = a[j]
        if c > half:
            c -= q
        vals.append((1 << 12) - c)
    return _pack_bits(vals, 13)


def dil_unpack_t0(buf, out):
    q = DIL_Q
    vals = _unpack_bits(buf, 13)
    for j in range(256):
        out[j] = ((1 << 12) - vals[j]) % q


def dil_pack_eta(a, eta):
    q = DIL_Q
    width = 3 if eta == 2 else 4
    vals = []
    for j in range(256):
        c = a[j]
        if c > eta:
            c -= q
        vals.append(eta - c)
    return _pack_bits(vals, width)


def dil_unpack_eta(buf, eta, out):
    q = DIL_Q
    width = 3 if eta == 2 else 4
    vals = _unpack_bits(buf, width)
    for j in range(256):
        out[j] = (eta - vals[j]) % q


def dil_pack_w1(a, gamma2):
    width = 6 if gamma2 == (DIL_Q - 1) // 88 else 4
    return _pack_bits(a, width)
