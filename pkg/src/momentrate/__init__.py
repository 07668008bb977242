"""MomentRate - large-deviation rate functions for moment map estimation.

Evaluates the rate functions of covariant measurements on tensor powers of unitary
representations of tori, SU(2), U(d) and their products, and simulates those
measurements on qubit and torus systems.
"""

__version__ = "0.1.0"
