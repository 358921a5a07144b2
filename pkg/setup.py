from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("newton_switch._fastscan", ["src/newton_switch/_fastscan.py"])],
        language_level=3,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    # No Cython at build time: the package falls back to the pure-Python
    # kernel (same file, interpreted).
    extensions = []

setup(ext_modules=extensions)
