"""
Core numerical and graph building blocks.
"""
