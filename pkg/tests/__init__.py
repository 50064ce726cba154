"""
Team Alchemy test suite.
"""
