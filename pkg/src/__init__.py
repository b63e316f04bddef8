"""
Regulator / Spectral Lab

A desk-scale numerical and symbolic laboratory cross-checking regulator forms of
smooth function algebras against spectral invariants of circle Dirac operators:
eta and xi invariants, Toeplitz determinant invariants, cyclic cocycles and
Deligne pairings on the circle.
"""

__version__ = "0.1.0"
