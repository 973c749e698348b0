"""Build hook for the optional compiled kernels.

The package is fully functional without the extension (a SciPy-backed
fallback is selected at import time); the Cython module only accelerates
the tridiagonal solves and the fused time-stepping loop.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "cglwaves._kernels._core",
                ["src/cglwaves/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
