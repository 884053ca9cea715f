"""QuadBound - worst-case error bounds for quadrature of bounded analytic functions."""

__version__ = "0.1.0"
