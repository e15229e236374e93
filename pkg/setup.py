import os

from setuptools import setup

ext_modules = []
if os.environ.get("COAMOEBA_LAB_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        from setuptools import Extension
        ext_modules = cythonize(
            [Extension("coamoeba_lab._kernels._collapse",
                       ["src/coamoeba_lab/_kernels/_collapse.pyx"],
                       language="c++", extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
