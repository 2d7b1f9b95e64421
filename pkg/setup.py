import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Without Cython the package still installs and uses the numpy fallback.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "lpimprove._core",
                ["src/lpimprove/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
