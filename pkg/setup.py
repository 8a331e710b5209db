"""Build script: compiles the calibration hot-loop kernels when Cython and a
C compiler are available. The package works without the extension; the numpy
fallback in factgate.confidence is selected at import time."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "factgate.confidence._calkernel",
                ["src/factgate/confidence/_calkernel.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
