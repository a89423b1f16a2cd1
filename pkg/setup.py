"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension: a vectorized numpy
backend is selected at import time when ``ergokit._core`` is missing.  The
extension build therefore degrades gracefully when Cython or a C compiler
is unavailable.  Set ERGOKIT_NO_EXT=1 to skip the build entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that warns instead of failing when compilation breaks."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, broken toolchain
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._skip(exc)

    @staticmethod
    def _skip(exc):
        print(f"WARNING: skipping ergokit._core build ({exc}); "
              "the pure-python backend will be used")


def extensions():
    if os.environ.get("ERGOKIT_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "ergokit._core",
        sources=["src/ergokit/_core.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
