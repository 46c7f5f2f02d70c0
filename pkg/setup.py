"""Build hook for the optional compiled evaluation kernels.

The package is pure Python plus one Cython extension for the hot inner
loop (batched form evaluation).  The extension is marked optional: if it
cannot be built the install still succeeds and the numpy fallback in
``calibra._kernels_py`` is used at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "calibra._kernels",
                ["src/calibra/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
