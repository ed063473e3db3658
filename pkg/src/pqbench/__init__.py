"""Round-3 lattice KEM and signature schemes with a benchmarking harness.

Implements the Kyber key-encapsulation mechanism and the Dilithium
signature scheme for all round-3 parameter sets, selectable between a
pure-Python reference backend and compiled kernels with bit-identical
outputs, plus a measurement engine and classical-scheme baselines for
side-by-side comparison.
"""

__version__ = "0.1.0"

from .backends import accelerated_available, get_kernels

__all__ = ["accelerated_available", "get_kernels", "__version__"]
