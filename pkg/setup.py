"""Build the optional compiled normalization kernel.

The package works without the extension (a pure-Python kernel is selected at
import time); set RECMAA_NO_EXTENSION=1 to skip the build deliberately.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("RECMAA_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/recmaa/engine/_kernel.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
