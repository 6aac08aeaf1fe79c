"""Build script: compiles the optional Cython kernels when Cython is available.

Without Cython (or if compilation fails) the package still installs and falls
back to the pure-Python kernel implementations at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/dhtvote/_fast.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
