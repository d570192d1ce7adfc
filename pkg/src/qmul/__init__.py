"""Log-squared depth quantum multiplier built from X, CNOT and Toffoli gates."""

__version__ = "0.1.0"
