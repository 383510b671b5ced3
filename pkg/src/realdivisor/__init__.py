"""Period matrices, real Jacobians and totally real divisor bounds for real hyperelliptic curves."""

__version__ = "0.1.0"
