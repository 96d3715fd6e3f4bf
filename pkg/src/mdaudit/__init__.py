"""Physics-consistency auditing for MoCap-to-radar micro-Doppler models."""

__version__ = "0.1.0"
