"""Pseudoentropy attack toolkit - non-uniform distinguishers against low smooth min-entropy."""

__version__ = "1.0.0"
