"""Null coframes, curvature and CR structures, evaluated with truncated Taylor jets."""
from .catalog import Scenario, catalog_get, catalog_list
from .coframe import NullCoframe, frame_geometry, optical_scalars
from .crstruct import CRStructure
from .curvature import riemann_packet, weyl_scalars
from .jets import Jet
from .lift import LiftParameters, lift_fefferman, lift_general, lift_reduced
from .maxwell import maxwell_check
from .petrov import PetrovLabel, classify

__version__ = "0.1.0"

__all__ = [
    "Jet", "NullCoframe", "frame_geometry", "optical_scalars", "riemann_packet", "weyl_scalars",
    "PetrovLabel", "classify", "CRStructure", "LiftParameters", "lift_general", "lift_reduced",
    "lift_fefferman", "maxwell_check", "Scenario", "catalog_get", "catalog_list",
]
