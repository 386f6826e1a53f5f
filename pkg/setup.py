from setuptools import Extension, setup

# The compiled kernels are optional: without Cython (or numpy headers) at
# build time the package falls back to the pure-numpy implementations in
# qli._kernels._pure.
try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "qli._kernels._core",
                ["src/qli/_kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
