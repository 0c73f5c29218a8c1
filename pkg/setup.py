"""Build script: compiles the optional Cython simulation kernel.

The package works without the compiled extension (a NumPy fallback is
selected at import time), so a failed compile is downgraded to a warning.
"""

import warnings

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "eccmar._kernels._sim",
                ["src/eccmar/_kernels/_sim.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    warnings.warn(f"Cython kernel not built, using NumPy fallback: {exc}")
    extensions = []

setup(ext_modules=extensions)
