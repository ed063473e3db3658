"""SHA-3 and SHAKE on top of the Keccak-f[1600] sponge.

The permutation itself lives in the kernel backends; this module owns
the sponge state machine (absorb, pad, squeeze) shared by both, which
keeps the byte-stream semantics identical across backends by
construction.
"""

from array import array

from . import backends

_RATES = {
    "SHAKE128": 168,
    "SHA3-256": 136,
    "SHAKE256": 136,
    "SHA3-512": 72,
}
_VALID_RATES = (168, 136, 104, 72)

_SHA3_DOMAIN = 0x06
_SHAKE_DOMAIN = 0x1F


class SpongeState:
    """Single-owner Keccak sponge over one of the FIPS-202 rates.

    The state starts in the absorbing phase; ``finalize`` applies the
    domain-separated padding and flips it to squeezing, after which
    absorption is rejected.  Repeated ``squeeze`` calls continue the
    same output stream.
    """

    __slots__ = ("lanes", "rate", "position", "phase", "_kern")

    def __init__(self, rate, *, backend="auto"):
        if rate not in _VALID_RATES:
            raise ValueError(f"rate must be one of {_VALID_RATES}, got {rate}")
        self.lanes = array("Q", bytes(200))
        self.rate = rate
        self.position = 0
        self.phase = "absorbing"
        self._kern = backends.get_kernels(backend)

    def _xor_in(self, pos, chunk):
        lanes = self.lanes
        i = 0
        n = len(chunk)
        while i < n and (pos + i) & 7:
            j = pos + i
            lanes[j >> 3] ^= chunk[i] << ((j & 7) << 3)
            i += 1
        while n - i >= 8:
            j = pos + i
            lanes[j >> 3] ^= int.from_bytes(chunk[i:i + 8], "little")
            i += 8
        while i < n:
            j = pos + i
            lanes[j >> 3] ^= chunk[i] << ((j & 7) << 3)
            i += 1

    def _read_out(self, pos, n):
        lanes = self.lanes
        out = bytearray(n)
        i = 0
        while i < n and (pos + i) & 7:
            j = pos + i
            out[i] = (lanes[j >> 3] >> ((j & 7) << 3)) & 0xFF
            i += 1
        while n - i >= 8:
            j = pos + i
            out[i:i + 8] = lanes[j >> 3].to_bytes(8, "little")
            i += 8
        while i < n:
            j = pos + i
            out[i] = (lanes[j >> 3] >> ((j & 7) << 3)) & 0xFF
            i += 1
        return bytes(out)

    def absorb(self, data):
        if self.phase != "absorbing":
            raise ValueError("cannot absorb after squeezing has begun")
        mv = memoryview(data)
        while mv:
            take = min(self.rate - self.position, len(mv))
            self._xor_in(self.position, mv[:take])
            self.position += take
            mv = mv[take:]
            if self.position == self.rate:
                self._kern.keccak_f1600(self.lanes)
                self.position = 0
        return self

    def finalize(self, domain=_SHAKE_DOMAIN):
        if self.phase != "absorbing":
            raise ValueError("state is already squeezing")
        self._xor_in(self.position, bytes((domain,)))
        self._xor_in(self.rate - 1, b"\x80")
        self._kern.keccak_f1600(self.lanes)
        self.position = 0
        self.phase = "squeezing"
        return self

    def squeeze(self, n):
        if self.phase != "squeezing":
            raise ValueError("finalize the sponge before squeezing")
        out = bytearray()
        while len(out) < n:
            take = min(n - len(out), self.rate - self.position)
            out += self._read_out(self.position, take)
            self.position += take
            if self.position == self.rate:
                self._kern.keccak_f1600(self.lanes)
                self.position = 0
        return bytes(out)


def permute(state):
    """Run the 24-round permutation on the state in place."""
    state._kern.keccak_f1600(state.lanes)
    return state


def hash(variant, data, *, backend="auto"):
    """FIPS-202 digest; variant is "SHA3-256" or "SHA3-512"."""
    if variant == "SHA3-256":
        out_len = 32
    elif variant == "SHA3-512":
        out_len = 64
    else:
        raise ValueError(f"unknown hash variant {variant!r}")
    state = SpongeState(_RATES[variant], backend=backend)
    state.absorb(data)
    state.finalize(_SHA3_DOMAIN)
    return state.squeeze(out_len)


def xof(variant, data, out_len, *, backend="auto"):
    """First out_len bytes of the SHAKE128/SHAKE256 stream over data."""
    if variant not in ("SHAKE128", "SHAKE256"):
        raise ValueError(f"unknown xof variant {variant!r}")
    if out_len < 0:
        raise ValueError("out_len must be non-negative")
    state = SpongeState(_RATES[variant], backend=backend)
    state.absorb(data)
    state.finalize(_SHAKE_DOMAIN)
    return state.squeeze(out_len)


def shake_stream(variant, data, *, backend="auto"):
    """A finalized sponge ready for incremental squeezing."""
    state = SpongeState(_RATES[variant], backend=backend)
    state.absorb(data)
    state.finalize(_SHAKE_DOMAIN)
    return state
