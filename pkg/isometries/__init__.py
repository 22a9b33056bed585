"""
Partial isometries, their graphs and groupoids, and the C*-algebras they generate
"""

from .analyzer import FamilyAnalyzer, cayley_suite
from .blocks import block_structure, generate_odd_orbit_family, matricial_representation, wold_partition
from .expr import normalize, structurally_equal, to_text
from .family import Family, load_family, parse_family
from .graph import (AdmissibilityTable, DirectedGraph, GeneratorKind, GeneratorSpec,
                    conditional_glue, corresponding_graph, g_graph, glue, pi_validate)
from .groupoid import ShadowedGraph, enumerate_elements, multiply
from .index import INF, ExtNat, StarIndex, classify_single, star_equivalent

__all__ = [
    'FamilyAnalyzer',
    'cayley_suite',
    'block_structure',
    'generate_odd_orbit_family',
    'matricial_representation',
    'wold_partition',
    'normalize',
    'structurally_equal',
    'to_text',
    'Family',
    'load_family',
    'parse_family',
    'AdmissibilityTable',
    'DirectedGraph',
    'GeneratorKind',
    'GeneratorSpec',
    'conditional_glue',
    'corresponding_graph',
    'g_graph',
    'glue',
    'pi_validate',
    'ShadowedGraph',
    'enumerate_elements',
    'multiply',
    'INF',
    'ExtNat',
    'StarIndex',
    'classify_single',
    'star_equivalent',
]
