import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("FIVEG_TTP_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("fiveg_ttp._kernel", ["src/fiveg_ttp/_kernel.pyx"], optional=True)],
            compiler_directives={"language_level": 3, "boundscheck": False, "wraparound": False},
        )

setup(ext_modules=ext_modules)
