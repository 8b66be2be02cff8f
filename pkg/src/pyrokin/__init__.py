"""Pyrolysis TGA analysis: preprocessing, isoconversional kinetics,
activation thermodynamics, synthetic ground truth, and LSTM mass-loss
prediction, with a reproducible batch CLI."""

__version__ = "0.1.0"
