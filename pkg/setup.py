"""Build script: compiles the optional feature-extraction kernel.

The package works without the extension (a numpy fallback is selected at
import time); building it just makes the per-frame scan loop faster.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/clipforge/_featcore.pyx",
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
