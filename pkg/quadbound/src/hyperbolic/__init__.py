"""
Hyperbolic Package

This package provides disk distances, conformal maps of nice domains and the
induced pseudodistance.
"""

from quadbound.src.hyperbolic.hyperbolic import (
    ConformalMap,
    DiskMap,
    EllipseMap,
    conformal_map,
    cstar,
    cstar_koebe_lower,
    disk_automorphism,
    ellipse_map,
    ellipse_to_disk,
    hyperbolic_density,
    mobius_m,
    poincare_p,
    segment_coordinate,
)

__all__ = [
    "ConformalMap",
    "DiskMap",
    "EllipseMap",
    "conformal_map",
    "cstar",
    "cstar_koebe_lower",
    "disk_automorphism",
    "ellipse_map",
    "ellipse_to_disk",
    "hyperbolic_density",
    "mobius_m",
    "poincare_p",
    "segment_coordinate",
]
