"""Backend selection: pure-Python reference vs compiled kernels.

Both backends expose the same kernel functions with canonical-output
contracts, so every scheme produces bit-identical bytes on either one.
"""

from . import _kernels_ref

_accel = None
_accel_checked = False

VALID_BACKENDS = ("reference", "accelerated", "auto")


def _load_accel():
    global _accel, _accel_checked
    if not _accel_checked:
        _accel_checked = True
        try:
            from . import _accel as mod
        except ImportError:
            mod = None
        _accel = mod
    return _accel


def accelerated_available():
    """True when the compiled kernel extension imported successfully."""
    return _load_accel() is not None


def get_kernels(backend="auto"):
    """Resolve a backend name to its kernel namespace.

    "auto" prefers the compiled kernels and falls back to the reference
    implementation; asking for "accelerated" when the extension is not
    installed is an error rather than a silent downgrade.
    """
    if backend == "reference":
        return _kernels_ref
    if backend == "accelerated":
        mod = _load_accel()
        if mod is None:
            raise RuntimeError(
                "accelerated backend requested but the compiled extension "
                "is not available"
            )
        return mod
    if backend == "auto":
        mod = _load_accel()
        return mod if mod is not None else _kernels_ref
    raise ValueError(f"unknown backend {backend!r}; expected one of "
                     f"{', '.join(VALID_BACKENDS)}")
