"""rigidity-lab - numerics workbench for special flows over irrational rotations."""

__version__ = "1.0.0"
