"""Spectral toolkit for the attractive delta-prime interaction on a closed contour.

Subpackages and modules:

* ``bessel``: self-contained modified Bessel functions I0, I1, K0, K1.
* ``circle``: exact circle ground state via the secular equation.
* ``geometry``: Fourier contours, signed distance, level-set profiles.
* ``bound``: parallel-coordinate Rayleigh quotient upper bounds.
* ``fem``: interface-fitted finite element eigensolver.
* ``service``: FastAPI wrapper exposing the solvers.
* ``cli``: command line client.
"""

__version__ = "0.1.0"
