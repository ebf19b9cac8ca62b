"""Exact-arithmetic toolkit for semi-stable partitions of reflexive polytopes,
induced toric fibrations and hybrid Landau-Ginzburg models, strata Euler
calculus, and weight / monodromy-weight / flag spectral-sequence pages."""

__version__ = "0.1.0"
