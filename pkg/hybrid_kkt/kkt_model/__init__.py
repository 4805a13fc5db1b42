"""
KKT 模型: 块 4×4 系统、约化到块 2×2、解的恢复、对称 Ruiz 缩放与序列读写
"""

from .block_system import (
    BlockKkt4x4,
    Reduced2x2,
    FullSolution,
    reduce,
    recover,
)
from .ruiz_scaling import (
    RuizScaling,
    ruiz_scale,
    unscale_solution,
    scale_solution,
    kkt2x2_row_inf_norms,
)
from .sequence_io import (
    KktSequence,
    SequenceManifest,
    SystemEntry,
    load_sequence,
    write_sequence,
    read_manifest,
    patterns_uniform,
)

__all__ = [
    'BlockKkt4x4',
    'Reduced2x2',
    'FullSolution',
    'reduce',
    'recover',
    'RuizScaling',
    'ruiz_scale',
    'unscale_solution',
    'scale_solution',
    'kkt2x2_row_inf_norms',
    'KktSequence',
    'SequenceManifest',
    'SystemEntry',
    'load_sequence',
    'write_sequence',
    'read_manifest',
    'patterns_uniform',
]
