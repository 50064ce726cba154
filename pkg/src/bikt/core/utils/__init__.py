"""
Utility functions for metrics and serialization.
"""

__all__ = ["metrics", "transformers"]
