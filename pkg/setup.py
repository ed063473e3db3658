import os

from setuptools import Extension, setup


def build_ext_modules():
    # The compiled kernels are optional: when Cython or a C toolchain is
    # missing the package installs with the pure-Python reference backend
    # only and everything keeps working, just slower.
    if os.environ.get("PQBENCH_NO_ACCEL"):
        return []
    try:
        from Cython.Build import cythonize
    except Exception:
        return []
    if not os.path.exists(os.path.join("src", "pqbench", "_accel.pyx")):
        return []
    ext = Extension(
        name="pqbench._accel",
        sources=[os.path.join("src", "pqbench", "_accel.pyx")],
        extra_compile_args=["-O3"],
        language="c",
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=build_ext_modules())
