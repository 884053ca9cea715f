"""
Domains Package

This package provides nice domains (ellipses, disks, generic delta_D specs)
and their distance-to-boundary geometry.
"""

from quadbound.src.domains.domains import (
    DiskDomain,
    Domain,
    EllipseDomain,
    NiceDomainSpec,
    delta_sup,
    ellipse_contains,
    ellipse_delta_at,
    ellipse_params,
    koebe_constant,
    named_preset,
)

__all__ = [
    "DiskDomain",
    "Domain",
    "EllipseDomain",
    "NiceDomainSpec",
    "delta_sup",
    "ellipse_contains",
    "ellipse_delta_at",
    "ellipse_params",
    "koebe_constant",
    "named_preset",
]
