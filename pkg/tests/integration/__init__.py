"""
Integration tests for QuadBound.
"""
