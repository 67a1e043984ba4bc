"""Build script: compiles the optional elimination kernel.

The compiled extension is a pure speedup; if Cython or a C compiler is
missing the build falls back to the pure-Python kernel silently.
"""

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping compiled kernel ({exc}); pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not compile {ext.name} ({exc}); pure-Python fallback will be used")


ext_modules = []
try:
    from setuptools import Extension
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "ruminbgg._kernel._ffelim",
                ["src/ruminbgg/_kernel/_ffelim.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    print("warning: Cython not available; building without the compiled kernel")

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
