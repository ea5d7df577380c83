from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("sgclust._kernels", ["src/sgclust/_kernels.pyx"], language="c++")],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
