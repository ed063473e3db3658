# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend.

Same function set and same canonical [0, q) boundary contract as the
pure-Python reference backend; constants are copied from it at import
time so the two can only differ by codegen, never by table contents.
"""

from libc.stdint cimport int64_t, uint64_t

from . import _kernels_ref as _ref

BACKEND_NAME = "accelerated"

cdef int KYBER_Q = 3329
cdef int DIL_Q = 8380417

cdef uint64_t _RC[24]
cdef int _RHO[25]
cdef int _PI_DST[25]
cdef int _KY_ZETAS[128]
cdef int _DI_ZETAS[256]
cdef int _KY_N_INV = 0
cdef int _DI_N_INV = 0


def _load_tables():
    cdef int i
    rc = _ref._RC
    for i in range(24):
        _RC[i] = rc[i]
    # rho rotation offsets and pi destinations over the flattened x + 5y
    # state, from the standard coordinate walk.
    offsets = [0] * 25
    x, y = 1, 0
    for t in range(24):
        offsets[x + 5 * y] = ((t + 1) * (t + 2) // 2) % 64
        x, y = y, (2 * x + 3 * y) % 5
    for i in range(25):
        _RHO[i] = offsets[i]
        xx = i % 5
        yy = i // 5
        _PI_DST[i] = yy + 5 * ((2 * xx + 3 * yy) % 5)
    for i in range(128):
        _KY_ZETAS[i] = _ref.KYBER_ZETAS[i]
    for i in range(256):
        _DI_ZETAS[i] = _ref.DIL_ZETAS[i]
    global _KY_N_INV, _DI_N_INV
    _KY_N_INV = _ref._KYBER_N_INV
    _DI_N_INV = _ref._DIL_N_INV


_load_tables()


cdef inline uint64_t _rotl(uint64_t v, int n) noexcept nogil:
    if n == 0:
        return v
    return (v << n) | (v >> (64 - n))


cdef inline int _modq(int64_t v, int q) noexcept nogil:
    cdef int r = <int>(v % q)
    if r < 0:
        r += q
    return r


def keccak_f1600(lanes):
    """Apply the 24-round permutation in place; lanes is 25 uint64."""
    # array('Q') carries the 'unsigned long long' buffer format, which on
    # LP64 platforms is not the same format character as uint64_t.
    cdef unsigned long long[::1] s = lanes
    cdef uint64_t st[25]
    cdef uint64_t b[25]
    cdef uint64_t c[5]
    cdef uint64_t d
    cdef int rnd, i, xx, row
    for i in range(25):
        st[i] = s[i]
    for rnd in range(24):
        for xx in range(5):
            c[xx] = st[xx] ^ st[xx + 5] ^ st[xx + 10] ^ st[xx + 15] ^ st[xx + 20]
        for xx in range(5):
            d = c[(xx + 4) % 5] ^ _rotl(c[(xx + 1) % 5], 1)
            for row in range(0, 25, 5):
                st[xx + row] ^= d
        for i in range(25):
            b[_PI_DST[i]] = _rotl(st[i], _RHO[i])
        for row in range(0, 25, 5):
            for xx in range(5):
                st[row + xx] = b[row + xx] ^ ((~b[row + (xx + 1) % 5]) &
                                              b[row + (xx + 2) % 5])
        st[0] ^= _RC[rnd]
    for i in range(25):
        s[i] = st[i]


def kyber_ntt(a):
    """7-layer negacyclic NTT over Z_3329, in place, canonical in/out."""
    cdef short[::1] v = a
    cdef int q = KYBER_Q
    cdef int k = 1, length = 128, start, j, zeta, t, u
    while length >= 2:
        start = 0
        while start < 256:
            zeta = _KY_ZETAS[k]
            k += 1
            for j in range(start, start + length):
                t = (zeta * v[j + length]) % q
                u = v[j]
                v[j + length] = _modq(u - t, q)
                v[j] = (u + t) % q
            start += 2 * length
        length >>= 1


def kyber_inv_ntt(a):
    cdef short[::1] v = a
    cdef int q = KYBER_Q
    cdef int k = 127, length = 2, start, j, zeta, t
    while length <= 128:
        start = 0
        while start < 256:
            zeta = _KY_ZETAS[k]
            k -= 1
            for j in range(start, start + length):
                t = v[j]
                v[j] = (t + v[j + length]) % q
                v[j + length] = _modq(<int64_t>zeta * (v[j + length] - t), q)
            start += 2 * length
        length <<= 1
    for j in range(256):
        v[j] = (v[j] * _KY_N_INV) % q


def kyber_basemul_acc(a, b, acc):
    """acc += a*b in the NTT domain (128 quadratic subring products)."""
    cdef short[::1] va = a
    cdef short[::1] vb = b
    cdef short[::1] vc = acc
    cdef int q = KYBER_Q
    cdef int i, j
    cdef int64_t zeta, a0, a1, a2, a3, b0, b1, b2, b3
    for i in range(64):
        j = 4 * i
        zeta = _KY_ZETAS[64 + i]
        a0 = va[j]; a1 = va[j + 1]; a2 = va[j + 2]; a3 = va[j + 3]
        b0 = vb[j]; b1 = vb[j + 1]; b2 = vb[j + 2]; b3 = vb[j + 3]
        vc[j] = _modq(vc[j] + a0 * b0 + zeta * a1 * b1, q)
        vc[j + 1] = _modq(vc[j + 1] + a0 * b1 + a1 * b0, q)
        vc[j + 2] = _modq(vc[j + 2] + a2 * b2 - zeta * a3 * b3, q)
        vc[j + 3] = _modq(vc[j + 3] + a2 * b3 + a3 * b2, q)


def kyber_poly_add(a, b):
    cdef short[::1] va = a
    cdef short[::1] vb = b
    cdef int j
    for j in range(256):
        va[j] = (va[j] + vb[j]) % KYBER_Q


def kyber_poly_sub(a, b):
    cdef short[::1] va = a
    cdef short[::1] vb = b
    cdef int j
    for j in range(256):
        va[j] = _modq(va[j] - vb[j], KYBER_Q)


def kyber_rej_uniform(out, pos, buf):
    """Fill out[pos:] with uniform mod-q values from 3-byte groups."""
    cdef short[::1] vo = out
    cdef const unsigned char[::1] vb = buf
    cdef int p = pos
    cdef Py_ssize_t i = 0, n = len(buf)
    cdef int b0, b1, b2, v0, v1
    while p < 256 and i + 3 <= n:
        b0 = vb[i]
        b1 = vb[i + 1]
        b2 = vb[i + 2]
        i += 3
        v0 = b0 | ((b1 & 0x0F) << 8)
        v1 = (b1 >> 4) | (b2 << 4)
        if v0 < KYBER_Q:
            vo[p] = v0
            p += 1
        if p < 256 and v1 < KYBER_Q:
            vo[p] = v1
            p += 1
    return p


def kyber_cbd(eta, buf, out):
    """Centered binomial sample from 64*eta bytes, canonical output."""
    cdef const unsigned char[::1] vb = buf
    cdef short[::1] vo = out
    cdef int i, j, a, b
    cdef unsigned int t, d
    if eta == 2:
        for i in range(32):
            t = (vb[4 * i] | (vb[4 * i + 1] << 8) | (vb[4 * i + 2] << 16)
                 | (<unsigned int>vb[4 * i + 3] << 24))
            d = (t & 0x55555555u) + ((t >> 1) & 0x55555555u)
            for j in range(8):
                a = (d >> (4 * j)) & 0x3
                b = (d >> (4 * j + 2)) & 0x3
                vo[8 * i + j] = _modq(a - b, KYBER_Q)
    elif eta == 3:
        for i in range(64):
            t = vb[3 * i] | (vb[3 * i + 1] << 8) | (vb[3 * i + 2] << 16)
            d = (t & 0x249249u) + ((t >> 1) & 0x249249u) + ((t >> 2) & 0x249249u)
            for j in range(4):
                a = (d >> (6 * j)) & 0x7
                b = (d >> (6 * j + 3)) & 0x7
                vo[4 * i + j] = _modq(a - b, KYBER_Q)
    else:
        raise ValueError("eta must be 2 or 3")


def kyber_compress_poly(a, d):
    """Compress each coefficient to d bits and pack LSB-first."""
    cdef short[::1] va = a
    cdef int q = KYBER_Q
    cdef int half = q // 2
    cdef int width = d
    cdef int mask = (1 << width) - 1
    out = bytearray((256 * width) // 8)
    cdef unsigned char[::1] vo = out
    cdef int64_t accum = 0
    cdef int bits = 0
    cdef Py_ssize_t idx = 0
    cdef int j, c
    for j in range(256):
        c = <int>((((<int64_t>va[j] << width) + half) // q) & mask)
        accum |= (<int64_t>c) << bits
        bits += width
        while bits >= 8:
            vo[idx] = accum & 0xFF
            accum >>= 8
            bits -= 8
            idx += 1
    return bytes(out)


def kyber_decompress_poly(buf, d, out):
    cdef const unsigned char[::1] vb = buf
    cdef short[::1] vo = out
    cdef int width = d
    cdef int mask = (1 << width) - 1
    cdef int64_t accum = 0
    cdef int bits = 0
    cdef Py_ssize_t idx = 0
    cdef int j, c
    for j in range(256):
        while bits < width:
            accum |= (<int64_t>vb[idx]) << bits
            idx += 1
            bits += 8
        c = <int>(accum & mask)
        accum >>= width
        bits -= width
        vo[j] = <short>((c * KYBER_Q + (1 << (width - 1))) >> width)


def kyber_pack12(a):
    cdef short[::1] va = a
    out = bytearray(384)
    cdef unsigned char[::1] vo = out
    cdef int i, c0, c1
    for i in range(128):
        c0 = va[2 * i]
        c1 = va[2 * i + 1]
        vo[3 * i] = c0 & 0xFF
        vo[3 * i + 1] = (c0 >> 8) | ((c1 & 0xF) << 4)
        vo[3 * i + 2] = c1 >> 4
    return bytes(out)


def kyber_unpack12(buf, out):
    cdef const unsigned char[::1] vb = buf
    cdef short[::1] vo = out
    cdef int i, b0, b1, b2
    for i in range(128):
        b0 = vb[3 * i]
        b1 = vb[3 * i + 1]
        b2 = vb[3 * i + 2]
        vo[2 * i] = ((b0 | ((b1 & 0xF) << 8))) % KYBER_Q
        vo[2 * i + 1] = (((b1 >> 4) | (b2 << 4))) % KYBER_Q
    return None


def dil_ntt(a):
    """Full 256-point NTT over Z_8380417, in place, canonical in/out."""
    cdef int[::1] v = a
    cdef int q = DIL_Q
    cdef int k = 0, length = 128, start, j, zeta, u
    cdef int64_t t
    while length >= 1:
        start = 0
        while start < 256:
            k += 1
            zeta = _DI_ZETAS[k]
            for j in range(start, start + length):
                t = (<int64_t>zeta * v[j + length]) % q
                u = v[j]
                v[j + length] = _modq(u - t, q)
                v[j] = <int>((u + t) % q)
            start += 2 * length
        length >>= 1


def dil_inv_ntt(a):
    cdef int[::1] v = a
    cdef int q = DIL_Q
    cdef int k = 256, length = 1, start, j, zeta, t
    while length <= 128:
        start = 0
        while start < 256:
            k -= 1
            zeta = _DI_ZETAS[k]
            for j in range(start, start + length):
                t = v[j]
                v[j] = _modq(<int64_t>t + v[j + length], q)
                v[j + length] = _modq(<int64_t>zeta * (v[j + length] - t), q)
            start += 2 * length
        length <<= 1
    for j in range(256):
        v[j] = <int>((<int64_t>v[j] * _DI_N_INV) % q)


def dil_pointwise_acc(a, b, acc):
    cdef int[::1] va = a
    cdef int[::1] vb = b
    cdef int[::1] vc = acc
    cdef int j
    for j in range(256):
        vc[j] = <int>((vc[j] + <int64_t>va[j] * vb[j]) % DIL_Q)


def dil_poly_add(a, b):
    cdef int[::1] va = a
    cdef int[::1] vb = b
    cdef int j
    for j in range(256):
        va[j] = <int>((<int64_t>va[j] + vb[j]) % DIL_Q)


def dil_poly_sub(a, b):
    cdef int[::1] va = a
    cdef int[::1] vb = b
    cdef int j
    for j in range(256):
        va[j] = _modq(<int64_t>va[j] - vb[j], DIL_Q)


def dil_rej_uniform(out, pos, buf):
    """Fill out[pos:] with uniform mod-q values from 3-byte groups."""
    cdef int[::1] vo = out
    cdef const unsigned char[::1] vb = buf
    cdef int p = pos
    cdef Py_ssize_t i = 0, n = len(buf)
    cdef int t
    while p < 256 and i + 3 <= n:
        t = (vb[i] | (vb[i + 1] << 8) | (vb[i + 2] << 16)) & 0x7FFFFF
        i += 3
        if t < DIL_Q:
            vo[p] = t
            p += 1
    return p


def dil_rej_eta(eta, out, pos, buf):
    """Rejection-sample half-byte candidates into [-eta, eta] mod q."""
    cdef int[::1] vo = out
    cdef const unsigned char[::1] vb = buf
    cdef int p = pos
    cdef Py_ssize_t i = 0, n = len(buf)
    cdef int b, t0, t1
    if eta == 2:
        while p < 256 and i < n:
            b = vb[i]
            i += 1
            t0 = b & 0x0F
            t1 = b >> 4
            if t0 < 15:
                vo[p] = _modq(2 - t0 % 5, DIL_Q)
                p += 1
            if p < 256 and t1 < 15:
                vo[p] = _modq(2 - t1 % 5, DIL_Q)
                p += 1
    elif eta == 4:
        while p < 256 and i < n:
            b = vb[i]
            i += 1
            t0 = b & 0x0F
            t1 = b >> 4
            if t0 < 9:
                vo[p] = _modq(4 - t0, DIL_Q)
                p += 1
            if p < 256 and t1 < 9:
                vo[p] = _modq(4 - t1, DIL_Q)
                p += 1
    else:
        raise ValueError("eta must be 2 or 4")
    return p


def dil_power2round_poly(a, a1, a0):
    """Split each coefficient as c = c1*2^13 + c0, c0 in (-2^12, 2^12]."""
    cdef int[::1] va = a
    cdef int[::1] v1 = a1
    cdef int[::1] v0 = a0
    cdef int j, c, c1
    for j in range(256):
        c = va[j]
        c1 = (c + (1 << 12) - 1) >> 13
        v1[j] = c1
        v0[j] = _modq(c - (c1 << 13), DIL_Q)


def dil_decompose_poly(a, gamma2, a1, a0):
    """High/low split with alpha = 2*gamma2 and the q-1 wrap fixed up."""
    cdef int[::1] va = a
    cdef int[::1] v1 = a1
    cdef int[::1] v0 = a0
    cdef int g2 = gamma2
    cdef int alpha = 2 * g2
    cdef int j, c, r0
    for j in range(256):
        c = va[j]
        r0 = c % alpha
        if r0 > g2:
            r0 -= alpha
        if c - r0 == DIL_Q - 1:
            v1[j] = 0
            v0[j] = _modq(r0 - 1, DIL_Q)
        else:
            v1[j] = (c - r0) // alpha
            v0[j] = _modq(r0, DIL_Q)


def dil_make_hint_poly(r, w1, gamma2, h):
    """h[j] = 1 where the high bits of r disagree with w1; returns count."""
    cdef int[::1] vr = r
    cdef int[::1] vw = w1
    cdef int[::1] vh = h
    cdef int g2 = gamma2
    cdef int alpha = 2 * g2
    cdef int j, c, r0, high, bit, count = 0
    for j in range(256):
        c = vr[j]
        r0 = c % alpha
        if r0 > g2:
            r0 -= alpha
        if c - r0 == DIL_Q - 1:
            high = 0
        else:
            high = (c - r0) // alpha
        bit = 1 if high != vw[j] else 0
        vh[j] = bit
        count += bit
    return count


def dil_use_hint_poly(r, h, gamma2, out):
    """Recover high bits of r, nudged by hint bits."""
    cdef int[::1] vr = r
    cdef int[::1] vh = h
    cdef int[::1] vo = out
    cdef int g2 = gamma2
    cdef int alpha = 2 * g2
    cdef int m = (DIL_Q - 1) // alpha
    cdef int j, c, r0, high
    for j in range(256):
        c = vr[j]
        r0 = c % alpha
        if r0 > g2:
            r0 -= alpha
        if c - r0 == DIL_Q - 1:
            high = 0
            r0 -= 1
        else:
            high = (c - r0) // alpha
        if vh[j]:
            if r0 > 0:
                vo[j] = _modq(high + 1, m)
            else:
                vo[j] = _modq(high - 1, m)
        else:
            vo[j] = high


def dil_chknorm(a, bound):
    """True when any coefficient has centered magnitude >= bound."""
    cdef int[::1] va = a
    cdef int half = (DIL_Q - 1) >> 1
    cdef int b = bound
    cdef int j, c
    for j in range(256):
        c = va[j]
        if c > half:
            c = DIL_Q - c
        if c >= b:
            return True
    return False


cdef bytes _pack_bits(int *vals, int width):
    out = bytearray((256 * width) // 8)
    cdef unsigned char[::1] vo = out
    cdef int64_t accum = 0
    cdef int bits = 0
    cdef Py_ssize_t idx = 0
    cdef int j
    for j in range(256):
        accum |= (<int64_t>vals[j]) << bits
        bits += width
        while bits >= 8:
            vo[idx] = accum & 0xFF
            accum >>= 8
            bits -= 8
            idx += 1
    return bytes(out)


cdef void _unpack_bits(const unsigned char[::1] buf, int width, int *vals):
    cdef int mask = (1 << width) - 1
    cdef int64_t accum = 0
    cdef int bits = 0
    cdef Py_ssize_t idx = 0
    cdef int j
    for j in range(256):
        while bits < width:
            accum |= (<int64_t>buf[idx]) << bits
            idx += 1
            bits += 8
        vals[j] = <int>(accum & mask)
        accum >>= width
        bits -= width


def dil_pack_z(a, gamma1):
    """Pack gamma1 - c (centered) at 18 or 20 bits per coefficient."""
    cdef int[::1] va = a
    cdef int g1 = gamma1
    cdef int half = (DIL_Q - 1) >> 1
    cdef int width = 18 if g1 == (1 << 17) else 20
    cdef int vals[256]
    cdef int j, c
    for j in range(256):
        c = va[j]
        if c > half:
            c -= DIL_Q
        vals[j] = g1 - c
    return _pack_bits(vals, width)


def dil_unpack_z(buf, gamma1, out):
    cdef const unsigned char[::1] vb = buf
    cdef int[::1] vo = out
    cdef int g1 = gamma1
    cdef int width = 18 if g1 == (1 << 17) else 20
    cdef int vals[256]
    cdef int j
    _unpack_bits(vb, width, vals)
    for j in range(256):
        vo[j] = _modq(g1 - vals[j], DIL_Q)


def dil_pack_t1(a):
    cdef int[::1] va = a
    cdef int vals[256]
    cdef int j
    for j in range(256):
        vals[j] = va[j]
    return _pack_bits(vals, 10)


def dil_unpack_t1(buf, out):
    cdef const unsigned char[::1] vb = buf
    cdef int[::1] vo = out
    cdef int vals[256]
    cdef int j
    _unpack_bits(vb, 10, vals)
    for j in range(256):
        vo[j] = vals[j]


def dil_pack_t0(a):
    """Pack 2^12 - c (centered) at 13 bits per coefficient."""
    cdef int[::1] va = a
    cdef int half = (DIL_Q - 1) >> 1
    cdef int vals[256]
    cdef int j, c
    for j in range(256):
        c = va[j]
        if c > half:
            c -= DIL_Q
        vals[j] = (1 << 12) - c
    return _pack_bits(vals, 13)


def dil_unpack_t0(buf, out):
    cdef const unsigned char[::1] vb = buf
    cdef int[::1] vo = out
    cdef int vals[256]
    cdef int j
    _unpack_bits(vb, 13, vals)
    for j in range(256):
        vo[j] = _modq((1 << 12) - vals[j], DIL_Q)


def dil_pack_eta(a, eta):
    cdef int[::1] va = a
    cdef int e = eta
    cdef int width = 3 if e == 2 else 4
    cdef int vals[256]
    cdef int j, c
    for j in range(256):
        c = va[j]
        if c > e:
            c -= DIL_Q
        vals[j] = e - c
    return _pack_bits(vals, width)


def dil_unpack_eta(buf, eta, out):
    cdef const unsigned char[::1] vb = buf
    cdef int[::1] vo = out
    cdef int e = eta
    cdef int width = 3 if e == 2 else 4
    cdef int vals[256]
    cdef int j
    _unpack_bits(vb, width, vals)
    for j in range(256):
        vo[j] = _modq(e - vals[j], DIL_Q)


def dil_pack_w1(a, gamma2):
    cdef int[::1] va = a
    cdef int width = 6 if gamma2 == (DIL_Q - 1) // 88 else 4
    cdef int vals[256]
    cdef int j
    for j in range(256):
        vals[j] = va[j]
    return _pack_bits(vals, width)
