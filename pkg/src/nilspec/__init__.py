"""Reidemeister numbers and spectra of torsion-free 2-step nilpotent groups."""
__version__ = "0.1.0"
