"""
entbounds - two-sided entropy estimates from power sums

Converts known sums of powers of probabilities into lower and upper
bounds on the Shannon entropy, and applies them to POVMs assigned to
quantum t-designs.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
