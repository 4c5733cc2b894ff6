"""Optional compiled kernels.  Without Cython or a compiler the package
falls back to the pure-Python kernels."""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("fpvkit._kernels", ["src/fpvkit/_kernels.pyx"], extra_compile_args=["-O2"])],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"compiled kernels disabled: {exc}")

setup(ext_modules=ext_modules)
