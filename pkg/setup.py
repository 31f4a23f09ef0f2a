"""Setup script for rigidity-lab."""

from setuptools import setup, find_packages

setup(
    name="rigidity-lab",
    description="Matching-window and disjointness experiments for special flows over rotations",
    author="SpaceTrucker2196",
    license="MIT",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.24",
        "mpmath>=1.3",
    ],
    extras_require={
        "dev": [
            "behave",
            "flake8",
        ],
    },
    version="1.0.0",
    entry_points={
        "console_scripts": [
            "rigidity-lab=rigidity_lab.cli:main",
            "rlab=rigidity_lab.cli:main",
        ],
    },
)
