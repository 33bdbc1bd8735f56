from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernel is optional: politeplan._kernel falls back to the
# pure-Python solver when the extension is absent.
extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "politeplan._kernel._bb",
                ["src/politeplan/_kernel/_bb.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=extensions)
