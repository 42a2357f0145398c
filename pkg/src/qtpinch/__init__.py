"""
Quantum Teichmuller pinching toolkit.

Combinatorial ideal triangulations and normal multicurves, exact arithmetic in
the Chekhov-Fock quantum torus, the pinching homomorphism attached to cutting a
surface along a multicurve, flip coordinate changes and their degenerate
limits, root-of-unity representations, and numerical checks of how those
representations split when a multicurve is pinched.
"""

__version__ = "0.1.0"
