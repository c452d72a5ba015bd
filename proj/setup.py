"""Builds the cesshare extension directly with setuptools + pybind11.

The CMake build (see CMakeLists.txt) stays the primary way to get the CLI
and the test suites; this file only exists so `pip install -e .
--no-build-isolation` works with nothing but setuptools on the machine.
"""

import glob
import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup


def eigen_include():
    for candidate in ("/usr/include/eigen3", "/usr/local/include/eigen3"):
        if os.path.isdir(candidate):
            return candidate
    raise RuntimeError("Eigen3 headers not found; install libeigen3-dev")


ext = Pybind11Extension(
    "cesshare._core",
    sorted(glob.glob("src/*/*.cpp")) + ["bindings/module.cpp"],
    include_dirs=["include", "vendor", eigen_include()],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
