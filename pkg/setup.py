"""Build script: compiles the optional fast ball-scan kernel.

The package is fully functional without the compiled extension (a pure
Python fallback is selected at import time), so any compiler failure is
downgraded to a warning.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that tolerates a missing or broken C toolchain."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"compiled kernel skipped ({exc}); using pure Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"compiled kernel skipped ({exc}); using pure Python fallback")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "starfree._kernels._ballscan",
                sources=["src/starfree/_kernels/_ballscan.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:  # pragma: no cover - Cython not installed
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
