"""Build script: compiles the optional speedup extension when a toolchain exists.

The package is fully functional without the extension (pure-Python twin
selected at import time), so compile failures are downgraded to a warning.
Set DEIDPIPE_REQUIRE_SPEEDUPS=1 to turn a failed build into a hard error.
"""

import os
import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing or broken
            self._fail_or_warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._fail_or_warn(exc)

    def _fail_or_warn(self, exc):
        if os.environ.get("DEIDPIPE_REQUIRE_SPEEDUPS"):
            raise exc
        warnings.warn(f"skipping compiled speedups, falling back to pure Python: {exc}")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        ["src/deidpipe/_speedups.pyx"],
        language_level="3",
    )


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
