"""Build script: compiles the optional pair-scoring extension.

The package works without the extension (a pure-Python backend is picked
at import time), so a missing compiler or Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "storygraph.kernels._native",
                ["src/storygraph/kernels/_native.pyx"],
                # keep float contraction off so margins match the pure-Python
                # backend bit for bit
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
