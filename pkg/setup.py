import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SPINQUENCH_PURE", "0") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "spinquench._speedups",
                    ["src/spinquench/_speedups.pyx"],
                    include_dirs=[np.get_include()],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # No Cython/NumPy at build time: install the pure-python package,
        # kernels.py falls back to the numpy backend at import.
        ext_modules = []

setup(ext_modules=ext_modules)
