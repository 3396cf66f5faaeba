# Builds the compiled kernel extension. The package works without it (a numpy
# fallback is selected at import time), so any build failure here is non-fatal
# for pure-Python installs built with --no-build-isolation and no compiler.
import os

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    if not os.path.exists("src/hilmo/approx/_kernels_cy.pyx"):
        raise ImportError
    ext = Extension(
        "hilmo.approx._kernels_cy",
        sources=["src/hilmo/approx/_kernels_cy.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    pass

setup(ext_modules=ext_modules)
