"""Word-level confidence measures for machine translation output."""

__version__ = "0.1.0"
