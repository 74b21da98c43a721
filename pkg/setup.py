import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("LAMTORUS_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext = Extension(
            "lamtorus._kernels",
            ["src/lamtorus/_kernels.pyx"],
            extra_compile_args=["-O2", "-ffp-contract=off", "-fno-builtin"],
        )
        ext_modules = cythonize([ext], language_level=3)

setup(ext_modules=ext_modules)
