"""
Command-line interface for BiKT.
"""
