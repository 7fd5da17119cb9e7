"""Numerical toolkit for manifolds with (alpha, epsilon)-structures."""
