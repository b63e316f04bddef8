"""
Test suite for the Regulator Spectral Lab.

Unit tests cover the exact and numerical cores (ℂ/ℤ values, trigonometric
polynomials, forms, regulators, window operators, Dirac invariants, cyclic
chains, cocycles, Deligne classes); scenario, service, CLI and HTTP tests run
the named checks end to end. Full-size scenario runs are marked ``slow``.
"""
