"""Numerical laboratory for the integrable structure of the six-vertex model.

Modules
-------
weights     Boltzmann weights, fields, anisotropy, regime parametrization.
algebra     R-matrix, quantum-group irreps, L-operators, YBE/RLL residuals.
lattice     Exhaustive enumeration oracle, heights, measure, Monte Carlo.
transfer    Row transfer operators, spectra, modular and fusion checks.
bethe       Twisted inhomogeneous Bethe equations and eigenvectors.
thermo      Free energy, phase diagram, boundary curves, surface tension.
limitshape  Variational limit-shape solver and diagnostics.
cli         Batch command-line interface writing CSV/JSON artifacts.
"""

__version__ = "0.1.0"
