"""Build the optional compiled kernels; the package works without them."""
from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler or no Cython: keep the NumPy kernels
            print(f"warning: compiled kernels not built ({exc}); using the NumPy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); using the NumPy fallback")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension("twistgpd._kernels", ["src/twistgpd/_kernels.pyx"], extra_compile_args=["-O3"])
    return cythonize([ext], quiet=True)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
