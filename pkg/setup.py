#!/usr/bin/env python
# -*- coding: utf-8 -*-

import os

from setuptools import setup
from setuptools import find_packages

# Utility function to read the README file.
def read(fname):
    with open(os.path.join(os.path.dirname(__file__), fname)) as f:
        return f.read()

setup(
    name = "uhrfrac",
    version = "0.3.0",
    description = "Solver and stability certifier for non-instantaneous "
                  "impulsive psi-Hilfer fractional integrodifferential "
                  "equations.",
    long_description = read("README.txt"),
    keywords = "fractional calculus psi-Hilfer Mittag-Leffler Volterra "
               "Picard impulsive Ulam-Hyers-Rassias",
    license = "BSD",
    author = "uhrfrac developers",
    packages = find_packages(exclude=["tests", "tests.*"]),
    package_data = {
        "uhrfrac.model": ["scenarios/*.cfg"]},
    python_requires = ">=3.8",
    install_requires = ["numpy", "scipy"],
    extras_require = {
        "test": ["pytest", "mpmath"]},
    entry_points = {
        "console_scripts": ["uhrfrac = uhrfrac.cli:main"]},
    classifiers = [
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Software Development :: Libraries :: Python Modules",
    ]
)
