"""Build script with an optional compiled kernel extension.

The package is pure Python plus one optional Cython extension
(``spechit._kernels._corex``) holding the hot inner loops: bitmask
enumeration of connected subsets and Monte-Carlo trajectory stepping.
If Cython or a C compiler is unavailable the build silently falls back
to the pure-Python kernels; the package selects the backend at import.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Try to build the extension; on any failure, continue without it."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            print(f"spechit: skipping compiled kernels ({exc!r}); "
                  "pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"spechit: failed to compile {ext.name} ({exc!r}); "
                  "pure-Python fallback will be used")


def make_extensions():
    if os.environ.get("SPECHIT_NO_EXT"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        ["src/spechit/_kernels/_corex.pyx"],
        language_level=3,
        include_path=[numpy.get_include()],
    ), [numpy.get_include()]


exts = make_extensions()
if exts:
    ext_modules, include_dirs = exts
    setup(
        ext_modules=ext_modules,
        include_dirs=include_dirs,
        cmdclass={"build_ext": OptionalBuildExt},
    )
else:
    setup()
