import os

from setuptools import setup

ext_modules = []
if not os.environ.get("XORSMC_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension(
                "xorsmc._kernels._ccore",
                ["src/xorsmc/_kernels/_ccore.pyx"],
                language="c++",
                extra_compile_args=["-O3"],
            )],
            language_level="3",
        )

setup(ext_modules=ext_modules)
