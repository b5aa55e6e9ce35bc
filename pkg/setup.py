"""Build script: compiles the optional query-kernel extension.

The package works without the extension (a pure-Python twin is selected
at import time), so a missing compiler only costs speed, not features.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("MATCHEST_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "matchest._kernel._ckern",
                    sources=["src/matchest/_kernel/_ckern.pyx"],
                    language="c++",
                    extra_compile_args=["-O3", "-std=c++17"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
