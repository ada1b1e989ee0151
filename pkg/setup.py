import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("TRIMERSENSE_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "trimersense.backends._kernels",
                    ["src/trimersense/backends/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython available: install with the pure-Python kernels only.
        ext_modules = []

setup(ext_modules=ext_modules)
