"""
Configuration module for BiKT.
"""

from config.settings import Settings

__all__ = ["Settings"]
