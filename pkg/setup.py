"""Build script for the optional compiled recurrence kernels.

The package works without the extension (a numpy fallback is selected at
import time); building it just makes LSTM/GRU training faster.  Run
``python setup.py build_ext --inplace`` or a regular ``pip install`` to
compile.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "ddpredict.models._recurrence_c",
                ["src/ddpredict/models/_recurrence_c.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
