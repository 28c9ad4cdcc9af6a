"""Classical and quantum (EWL-type) analysis of two-type signaling games."""

__version__ = "0.1.0"
