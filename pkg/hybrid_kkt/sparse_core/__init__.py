"""
稀疏核心: 存储、乘法、排序、符号分析、Cholesky 分解与三角求解
"""

from .csc_matrix import (
    CompressedColumnMatrix,
    Permutation,
    spmv,
    symmetric_spmv,
    inf_norm,
    symmetric_inf_norm,
    row_abs_sums,
    col_abs_sums,
    symmetric_row_abs_sums,
    symmetric_lower_pattern,
    symmetric_permute,
    gram_lower_triplets,
)
from .amd_ordering import (
    OrderingMethod,
    amd_order,
    rcm_order,
    natural_order,
    compute_ordering,
)
from .cholesky import (
    DEFAULT_RELATIVE_PIVOT_FLOOR,
    SymbolicFactor,
    NumericCholesky,
    NotSpdFailure,
    symbolic_cholesky,
    numeric_cholesky,
    factor_solve,
    analyze,
    default_pivot_floor,
)
from .matrix_market import (
    read_matrix_market,
    read_matrix_market_with_symmetry,
    write_matrix_market,
)

__all__ = [
    'CompressedColumnMatrix',
    'Permutation',
    'spmv',
    'symmetric_spmv',
    'inf_norm',
    'symmetric_inf_norm',
    'row_abs_sums',
    'col_abs_sums',
    'symmetric_row_abs_sums',
    'symmetric_lower_pattern',
    'symmetric_permute',
    'gram_lower_triplets',
    'OrderingMethod',
    'amd_order',
    'rcm_order',
    'natural_order',
    'compute_ordering',
    'DEFAULT_RELATIVE_PIVOT_FLOOR',
    'SymbolicFactor',
    'NumericCholesky',
    'NotSpdFailure',
    'symbolic_cholesky',
    'numeric_cholesky',
    'factor_solve',
    'analyze',
    'default_pivot_floor',
    'read_matrix_market',
    'read_matrix_market_with_symmetry',
    'write_matrix_market',
]
