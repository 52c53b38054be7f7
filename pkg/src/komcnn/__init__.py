"""Gate-level Karatsuba-Ofman and baseline multipliers, a cycle-accurate
systolic MAC engine, and a calibrated CNN resource model."""

__version__ = "0.1.0"
