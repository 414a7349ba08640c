import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "conelift._jetkernel",
                ["src/conelift/_jetkernel.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # The pure-python kernel in conelift._kernel_py keeps the package usable
    # when Cython is unavailable; conelift._kernel falls back at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
