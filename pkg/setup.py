import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "dipsim._kernels._lindblad_cy",
                ["src/dipsim/_kernels/_lindblad_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-python fallback kernel is selected at import time, so a build
    # without Cython still yields a working package.
    ext_modules = []

setup(ext_modules=ext_modules)
