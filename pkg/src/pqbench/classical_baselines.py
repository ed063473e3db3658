"""Adapter over the host crypto provider for classical baseline schemes.

Wraps ECDH, ECDSA, and RSA from the host provider (OpenSSL via the
``cryptography`` package) behind uniform unit-of-work closures so the
measurement engine can time them exactly like the lattice schemes.
Input preparation, padding setup, and the one-shot correctness gate all
happen outside the returned closure; each closure invocation performs
exactly one cryptographic operation.
"""

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class ClassicalScheme:
    """One comparison-table row: what it is and what it claims."""

    kind: str  # "key-exchange" | "signature" | "encryption"
    name: str
    claimed_security_bits: int


# Row set and claimed bits for the comparison table.  The printed
# "P-512" label has no standard curve; it runs on P-521 (see footnote).
CLASSICAL_SCHEMES = (
    ClassicalScheme("signature", "ECDSA(P-256)", 128),
    ClassicalScheme("signature", "ECDSA(P-384)", 192),
    ClassicalScheme("signature", "ECDSA(P-512)", 256),
    ClassicalScheme("encryption", "RSA-2048", 112),
    ClassicalScheme("encryption", "RSA-3072", 128),
    ClassicalScheme("key-exchange", "ECDH(P-256)", 128),
    ClassicalScheme("key-exchange", "ECDH(P-384)", 192),
    ClassicalScheme("key-exchange", "ECDH(P-521)", 256),
)

P512_FOOTNOTE = 'the "P-512" row runs on the standard P-521 curve'

_CURVE_NAMES = {
    "ECDSA(P-256)": "secp256r1",
    "ECDSA(P-384)": "secp384r1",
    "ECDSA(P-512)": "secp521r1",
    "ECDH(P-256)": "secp256r1",
    "ECDH(P-384)": "secp384r1",
    "ECDH(P-521)": "secp521r1",
}

_RSA_BITS = {"RSA-2048": 2048, "RSA-3072": 3072}

_VALID_OPS = {
    "key-exchange": ("keygen", "agree"),
    "signature": ("keygen", "sign", "verify"),
    "encryption": ("keygen", "encrypt", "decrypt"),
}

# How per-operation timings compose into one "total" row, by kind.
# The policy is explicit configuration because different benchmarks
# disagree on it: a key exchange counts both sides' shared-secret
# computations, a signature counts the full keygen/sign/verify pipeline,
# and RSA counts an OAEP encrypt/decrypt pair with keygen excluded.
# Each entry is (row_name, base_op); rows with the same base op get
# independent closures and independent timings.
DEFAULT_COMPOSITION = {
    "key-exchange": (
        ("keygen", "keygen"),
        ("agree-init", "agree"),
        ("agree-resp", "agree"),
    ),
    "signature": (
        ("keygen", "keygen"),
        ("sign", "sign"),
        ("verify", "verify"),
    ),
    "encryption": (
        ("encrypt", "encrypt"),
        ("decrypt", "decrypt"),
    ),
}


class CapabilityError(RuntimeError):
    """Requested scheme or operation is not available on this handle."""


@dataclass(frozen=True)
class ProviderHandle:
    """Opaque provider connection plus per-scheme capability flags."""

    provider: str
    capabilities: frozenset

    def supports(self, scheme):
        return scheme.name in self.capabilities


def _curve(scheme_name):
    from cryptography.hazmat.primitives.asymmetric import ec

    return {
        "secp256r1": ec.SECP256R1,
        "secp384r1": ec.SECP384R1,
        "secp521r1": ec.SECP521R1,
    }[_CURVE_NAMES[scheme_name]]()


def _ecdsa_algo(scheme_name):
    from cryptography.hazmat.primitives import hashes
    from cryptography.hazmat.primitives.asymmetric import ec

    digest = {
        "secp256r1": hashes.SHA256,
        "secp384r1": hashes.SHA384,
        "secp521r1": hashes.SHA512,
    }[_CURVE_NAMES[scheme_name]]()
    return ec.ECDSA(digest)


def _oaep():
    from cryptography.hazmat.primitives import hashes
    from cryptography.hazmat.primitives.asymmetric import padding

    return padding.OAEP(
        mgf=padding.MGF1(algorithm=hashes.SHA256()),
        algorithm=hashes.SHA256(),
        label=None,
    )


_PROBE_CACHE = None


def probe_provider():
    """Enumerate which comparison-table schemes the host supports.

    Never raises: a missing or partial provider yields a handle with the
    corresponding capabilities absent, and downstream tables render
    those rows as unavailable.
    """
    global _PROBE_CACHE
    if _PROBE_CACHE is not None:
        return _PROBE_CACHE
    caps = set()
    provider = "none"
    try:
        import cryptography
        from cryptography.hazmat.backends.openssl import backend

        provider = "openssl %s / cryptography %s" % (
            backend.openssl_version_text(),
            cryptography.__version__,
        )
    except Exception:
        _PROBE_CACHE = ProviderHandle("none", frozenset())
        return _PROBE_CACHE
    for scheme in CLASSICAL_SCHEMES:
        if scheme.name in _CURVE_NAMES:
            try:
                from cryptography.hazmat.primitives.asymmetric import ec

                ec.generate_private_key(_curve(scheme.name))
            except Exception:
                continue
            caps.add(scheme.name)
    # One generation proves the RSA stack; the modulus size is a
    # parameter of the call, not a separate provider capability.
    try:
        from cryptography.hazmat.primitives.asymmetric import rsa

        rsa.generate_private_key(public_exponent=65537, key_size=2048)
    except Exception:
        pass
    else:
        caps.update(_RSA_BITS)
    _PROBE_CACHE = ProviderHandle(provider, frozenset(caps))
    return _PROBE_CACHE


def run_classical_op(handle, scheme, op):
    """Build a unit-of-work closure performing exactly one operation.

    All inputs are pre-generated here, and the scheme passes a one-shot
    roundtrip gate before the closure is returned.  Each call prepares
    fresh independent state, so two closures never share mutable data.
    """
    if not handle.supports(scheme):
        raise CapabilityError(f"{scheme.name} is not available on this provider")
    if op not in _VALID_OPS.get(scheme.kind, ()):
        raise CapabilityError(f"operation {op!r} is not defined for {scheme.kind}")
    if scheme.kind == "key-exchange":
        return _ecdh_op(scheme, op)
    if scheme.kind == "signature":
        return _ecdsa_op(scheme, op)
    return _rsa_op(scheme, op)


def _ecdh_op(scheme, op):
    from cryptography.hazmat.primitives.asymmetric import ec

    curve = _curve(scheme.name)
    if op == "keygen":
        def work():
            ec.generate_private_key(curve)

        return work
    side_a = ec.generate_private_key(curve)
    side_b = ec.generate_private_key(curve)
    pub_a = side_a.public_key()
    pub_b = side_b.public_key()
    if side_a.exchange(ec.ECDH(), pub_b) != side_b.exchange(ec.ECDH(), pub_a):
        raise CapabilityError(f"{scheme.name} roundtrip gate failed")

    def work():
        side_a.exchange(ec.ECDH(), pub_b)

    return work


def _ecdsa_op(scheme, op):
    from cryptography.hazmat.primitives.asymmetric import ec

    curve = _curve(scheme.name)
    algo = _ecdsa_algo(scheme.name)
    if op == "keygen":
        def work():
            ec.generate_private_key(curve)

        return work
    key = ec.generate_private_key(curve)
    public = key.public_key()
    message = os.urandom(32)
    signature = key.sign(message, algo)
    public.verify(signature, message, algo)  # roundtrip gate; raises on failure
    if op == "sign":
        def work():
            key.sign(message, algo)

        return work

    def work():
        public.verify(signature, message, algo)

    return work


def _rsa_op(scheme, op):
    from cryptography.hazmat.primitives.asymmetric import rsa

    bits = _RSA_BITS[scheme.name]
    if op == "keygen":
        def work():
            rsa.generate_private_key(public_exponent=65537, key_size=bits)

        return work
    key = rsa.generate_private_key(public_exponent=65537, key_size=bits)
    public = key.public_key()
    pad = _oaep()
    message = os.urandom(32)
    ciphertext = public.encrypt(message, pad)
    if key.decrypt(ciphertext, pad) != message:
        raise CapabilityError(f"{scheme.name} roundtrip gate failed")
    if op == "encrypt":
        def work():
            public.encrypt(message, pad)

        return work

    def work():
        key.decrypt(ciphertext, pad)

    return work
