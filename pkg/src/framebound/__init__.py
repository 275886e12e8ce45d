"""Framebound - rotating-frame evolution-time estimation for driven NMR spins."""

__version__ = "0.1.0"
