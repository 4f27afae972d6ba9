"""Rational points, ternary reductions, Frey curves and certified exponent bounds
for the curves x(x+1)...(x+k-1) = y^ell."""

__version__ = "0.1.0"
