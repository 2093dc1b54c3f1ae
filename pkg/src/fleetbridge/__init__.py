"""Desk-scale multi-agent teaming stack: relay, frames, sim, operator core."""

__version__ = "0.1.0"
