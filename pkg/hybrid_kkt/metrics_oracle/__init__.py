"""
指标与预言机: 后向误差、相对残差、分解密度, 以及小规模稠密预言机
"""

from .error_metrics import (
    ErrorReport,
    error_report,
    apply_kkt4x4,
    apply_kkt2x2,
    kkt4x4_inf_norm,
    kkt2x2_inf_norm,
    matrix_inf_norm,
    kkt4x4_errors,
    kkt2x2_errors,
)
from .density import (
    DensityReport,
    density_report,
)
from .dense_oracle import (
    DenseMatrix,
    DEFAULT_RANK_TOL,
    dense_solve,
    dense_sym_eig,
    dense_rank,
    condition_number,
    min_positive_eigenvalue,
    densify_kkt2x2,
    densify_kkt4x4,
    dense_solve_kkt4x4,
    dense_solve_kkt2x2,
    kkt_condition_number,
    h_gamma_dense,
    nullspace_min_eigenvalue,
    gamma_min,
    schur_spectrum,
)

__all__ = [
    'ErrorReport',
    'error_report',
    'apply_kkt4x4',
    'apply_kkt2x2',
    'kkt4x4_inf_norm',
    'kkt2x2_inf_norm',
    'matrix_inf_norm',
    'kkt4x4_errors',
    'kkt2x2_errors',
    'DensityReport',
    'density_report',
    'DenseMatrix',
    'DEFAULT_RANK_TOL',
    'dense_solve',
    'dense_sym_eig',
    'dense_rank',
    'condition_number',
    'min_positive_eigenvalue',
    'densify_kkt2x2',
    'densify_kkt4x4',
    'dense_solve_kkt4x4',
    'dense_solve_kkt2x2',
    'kkt_condition_number',
    'h_gamma_dense',
    'nullspace_min_eigenvalue',
    'gamma_min',
    'schur_spectrum',
]
