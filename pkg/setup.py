from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the counting-kernel extension when possible; the package falls
    back to the pure-numpy kernels at import time if it is missing."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"warning: skipping compiled kernels ({exc}); "
                  "the pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); "
                  "the pure-Python fallback will be used")


extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "rulecover._kernels._core",
                ["src/rulecover/_kernels/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    print("warning: Cython not available; building without compiled kernels")

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
