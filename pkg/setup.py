"""Build hook for the optional Cython kernel; metadata lives in pyproject.toml."""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ANOMAL_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:  # pure-Python install
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "anomal._kernels._ckernels",
                    ["src/anomal/_kernels/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
