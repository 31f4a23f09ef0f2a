"""Matching-window engine: constants, sample sets, windows and the criterion audit."""
