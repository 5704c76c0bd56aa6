import os

from setuptools import Extension, setup

# The compiled kernel is optional: sc_arrays.kernels falls back to the pure
# implementation when the extension is missing or SC_ARRAYS_FORCE_PURE is set.
ext_modules = []
if os.environ.get("SC_ARRAYS_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "sc_arrays._kernels",
                    ["src/sc_arrays/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
