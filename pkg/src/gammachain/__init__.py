"""Linear invariants of Gamma decompositions: exact chain-level computations."""

__version__ = "0.1.0"
