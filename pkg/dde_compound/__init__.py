"""Compound DDE.

Numerical toolkit for the exterior-power (compound) theory of the scalar
periodic delay equation x'(t) = -α(t)x(t) - β(t)x(t-1): discrete evolution of
segments and of their m-fold compounds, cone positivity certificates, Floquet
multipliers with lap numbers, and the positivity of the u0 operators.
"""

__version__ = "1.0.0"
__author__ = "Development Team"
__email__ = "dev@example.com"
