from Cython.Build import cythonize
from setuptools import Extension, setup

# -ffp-contract=off keeps the compiled kernel bit-compatible with the
# pure-Python fallback (no fused multiply-adds).
extensions = [
    Extension(
        "sorlayout._kernel",
        ["src/sorlayout/_kernel.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
