"""Congestion-aware swarm splitting, obstacle transit and formation recovery."""

__version__ = "0.1.0"
