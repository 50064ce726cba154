"""
BiKT - bi-directional knowledge transfer between a graph model and its derived MLP.
"""

__version__ = "0.1.0"
