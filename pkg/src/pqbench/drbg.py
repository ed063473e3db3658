"""AES-256 counter-mode deterministic byte generator.

This is the generator the known-answer harness uses to expand a 48-byte
record seed into the key, coin, and message draws of each test record.
Determinism and byte-exact agreement with recorded answer files are the
whole point; it is not a general-purpose RNG.
"""

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

_ENTROPY_BYTES = 48


def _aes256_ecb(key, data):
    enc = Cipher(algorithms.AES(key), modes.ECB()).encryptor()
    return enc.update(data) + enc.finalize()


class AesCtrDrbg:
    """Counter-mode DRBG with the KAT harness update schedule.

    Construction seeds the state from 48 bytes of entropy (optionally
    XORed with a 48-byte personalization string); ``random_bytes``
    mirrors one harness draw, including the post-draw state update, so a
    sequence of draws reproduces the recorded schedule exactly.
    """

    def __init__(self, entropy, personalization=None):
        if len(entropy) != _ENTROPY_BYTES:
            raise ValueError(f"entropy must be {_ENTROPY_BYTES} bytes")
        seed = bytearray(entropy)
        if personalization is not None:
            if len(personalization) != _ENTROPY_BYTES:
                raise ValueError(f"personalization must be {_ENTROPY_BYTES} bytes")
            for i in range(_ENTROPY_BYTES):
                seed[i] ^= personalization[i]
        self._key = bytes(32)
        self._v = bytes(16)
        self._update(bytes(seed))

    def _counter_blocks(self, count):
        v = int.from_bytes(self._v, "big")
        out = bytearray()
        for _ in range(count):
            v = (v + 1) % (1 << 128)
            out += v.to_bytes(16, "big")
        return bytes(out)

    def _update(self, provided):
        temp = bytearray(_aes256_ecb(self._key, self._counter_blocks(3)))
        if provided is not None:
            for i in range(_ENTROPY_BYTES):
                temp[i] ^= provided[i]
        self._key = bytes(temp[:32])
        self._v = bytes(temp[32:48])

    def random_bytes(self, n):
        """Draw n bytes and advance the state like one harness call."""
        if n < 0:
            raise ValueError("n must be non-negative")
        blocks = (n + 15) // 16
        counters = self._counter_blocks(blocks)
        stream = _aes256_ecb(self._key, counters)
        if blocks:
            self._v = counters[-16:]
        self._update(None)
        return stream[:n]
