# Builds the optional compiled kernel core. The package imports fine without
# it (gestrec._kernels falls back to the numpy backend), so a failed compile
# only costs speed.
import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "gestrec._kernels._ckernels",
        ["src/gestrec/_kernels/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
        },
    )
)
