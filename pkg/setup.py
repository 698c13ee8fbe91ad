import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; kernels fall back at import
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "mpoxnet._kernels",
                ["src/mpoxnet/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                language="c++",
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
