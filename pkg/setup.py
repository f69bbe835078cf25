"""Build script for the optional compiled kernel extension.

The package is pure Python plus one Cython module with the elementwise
hot loops (layer norm, softmax, Adam).  If the extension cannot be
built the install still succeeds and the numpy fallback is used at
runtime.  Set TREESEQ_SKIP_EXT=1 to skip the extension on purpose.
"""

import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("TREESEQ_SKIP_EXT") == "1":
        return []
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "treeseq._kernels._core",
        sources=["src/treeseq/_kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions())
