"""Build script: compiles the optional integration kernel extension.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time); set CARBONLAB_NO_EXT=1 to skip the
compile step entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CARBONLAB_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "carbonlab._kernels",
                    ["src/carbonlab/_kernels.pyx"],
                    # -ffp-contract=off keeps the compiled kernel bit-identical
                    # to the pure-Python fallback (no FMA contraction).
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            language_level=3,
        )

setup(ext_modules=ext_modules)
