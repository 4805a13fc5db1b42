"""
KKT求解工具包的结构化异常

所有异常都继承自 ValueError, 与既有的 ``except ValueError`` 调用方式保持兼容。
数值上"预期内"的结果(非正定、δ超限、CG小二次型)不走异常路径, 以返回值表示。
"""

from pathlib import Path
from typing import Optional, Union


class KktError(ValueError):
    """工具包异常基类"""


class DimensionMismatchError(KktError):
    """向量或矩阵维度不一致"""


class StructureMismatchError(KktError):
    """数值矩阵的稀疏结构与符号分解不匹配"""


class SingularMatrixError(KktError):
    """稠密矩阵在工作精度下奇异"""


class NotSymmetricError(KktError):
    """要求对称的输入不对称"""


class NotSpdError(KktError):
    """稠密预言机要求正定但输入不正定"""


class GeneratorSpecError(KktError):
    """合成数据规格不可行"""


class MatrixMarketParseError(KktError):
    """Matrix Market 文件解析失败, 携带文件与行号"""

    def __init__(self, path: Union[str, Path], line_number: Optional[int], message: str):
        self.path = str(path)
        self.line_number = line_number
        location = f"{self.path}:{line_number}" if line_number is not None else self.path
        super().__init__(f"{location}: {message}")


class ManifestError(KktError):
    """序列清单文件无效"""

    def __init__(self, path: Union[str, Path], message: str):
        self.path = str(path)
        super().__init__(f"{self.path}: {message}")
