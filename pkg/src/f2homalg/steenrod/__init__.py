"""The mod-2 Steenrod algebra, finite modules over it, minimal resolutions and Ext charts."""

from .ext import ExtChart, ext_chart, product_action
from .milnor import SteenrodAlgebra, a1_algebra, steenrod_algebra
from .modules import FiniteModule, a1_ij_module, c2_module, trivial_module
from .resolution import Resolution, minimal_resolution

__all__ = [
    "ExtChart", "FiniteModule", "Resolution", "SteenrodAlgebra", "a1_algebra", "a1_ij_module",
    "c2_module", "ext_chart", "minimal_resolution", "product_action", "steenrod_algebra",
    "trivial_module",
]
