"""Tilings of de Bruijn and Kautz graphs by identical boards."""

from .graphs import HostGraph, Kind, LatinSquare, Projection, build_host
from .stratification import LoopTrace, TileGraph, TileReport, stratify, validate_tile
from .tiling import Tiling, TilingReport, build_tiling, verify_tiling

__all__ = [
    "HostGraph",
    "Kind",
    "LatinSquare",
    "LoopTrace",
    "Projection",
    "TileGraph",
    "TileReport",
    "Tiling",
    "TilingReport",
    "build_host",
    "build_tiling",
    "stratify",
    "validate_tile",
    "verify_tiling",
]
