"""desksim: deterministic desk-scale driving and UAV-tracking simulator."""

__version__ = "0.1.0"
