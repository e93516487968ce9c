"""Build script: compiles the optional GF(2) elimination core.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed compile only costs speed, not functionality.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy as np
    from setuptools import Extension

    ext = Extension(
        "cocyc._gf2_cy",
        ["src/cocyc/_gf2_cy.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level="3")
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(
        "cocyc: skipping compiled GF(2) core (%s); pure-Python fallback will be used\n" % exc
    )

setup(ext_modules=ext_modules)
