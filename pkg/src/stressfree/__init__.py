"""Exactly stress-free piecewise-affine constructions in regular n-gons,
their nematic and linearized limits, and 3D tetrahedral counterparts.

Submodules are imported on demand::

    from stressfree.ngon_geometry import build_config
    from stressfree.single_layer import build_single_layer
"""

__version__ = "0.1.0"

from ._accel import backend  # noqa: E402

__all__ = ["__version__", "backend"]
