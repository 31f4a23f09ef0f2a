"""Exact and certified arithmetic: continued fractions, circle geometry, summation."""
