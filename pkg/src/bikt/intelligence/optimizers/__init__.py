"""
Gradient-based optimizers.
"""

from bikt.intelligence.optimizers.adam import Adam

__all__ = ["Adam"]
