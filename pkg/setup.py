"""Builds the optional C extension holding the hot SGD kernels.

The package works without it: ideascreen.olr.kernels falls back to the
pure-Python implementation when the extension is missing or fails to build.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "ideascreen.olr._speedups",
                ["src/ideascreen/olr/_speedups.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
