"""Representations asserted by the almost-twin corollaries"""
from .search import (
    RepresentationQuery,
    SearchResult,
    MODES,
    find_ternary,
    find_binary,
    count_chen,
    cor2_exceptions,
    shifted_omegas,
)
