"""
合成 KKT 序列生成器
"""

from .kkt_generator import (
    IndefinitenessClass,
    GeneratorSpec,
    grid_graph_edges,
    generate_sequence,
    generate_to_directory,
    verify_class,
    h_tilde_extreme_eigenvalues,
    ORACLE_LIMIT,
)

__all__ = [
    'IndefinitenessClass',
    'GeneratorSpec',
    'grid_graph_edges',
    'generate_sequence',
    'generate_to_directory',
    'verify_class',
    'h_tilde_extreme_eigenvalues',
    'ORACLE_LIMIT',
]
