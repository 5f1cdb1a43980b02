import numpy
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the accelerator extension, but fall back to pure Python on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"WARNING: building lpdec._kernels._compiled failed ({exc}); "
                  "the pure-Python kernels will be used.")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: compiling {ext.name} failed ({exc}); "
                  "the pure-Python kernels will be used.")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "lpdec._kernels._compiled",
                ["src/lpdec/_kernels/_compiled.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
