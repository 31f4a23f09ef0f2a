"""Roofs, special flows, arc combinatorics, cohomology and joining statistics."""
