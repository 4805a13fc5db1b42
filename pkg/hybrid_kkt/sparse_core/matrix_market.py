"""
Matrix Market 坐标格式读写 (real, general / symmetric)

磁盘上 1 起始索引, 内存中 0 起始; 重复元素在读入时求和。
symmetric 文件读入后为下三角存储, 上三角出现的元素被镜像到下三角。
"""

from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ..exceptions import MatrixMarketParseError
from .csc_matrix import CompressedColumnMatrix

PathLike = Union[str, Path]

SUPPORTED_SYMMETRY = ("general", "symmetric")


def _parse_header(path: Path, line: str) -> str:
    tokens = line.strip().split()
    if len(tokens) != 5 or tokens[0].lower() != "%%matrixmarket":
        raise MatrixMarketParseError(path, 1, "缺少 %%MatrixMarket 头部")
    obj, fmt, field, symmetry = (t.lower() for t in tokens[1:])
    if obj != "matrix" or fmt != "coordinate":
        raise MatrixMarketParseError(path, 1, f"只支持 matrix coordinate 格式, 实际为 {obj} {fmt}")
    if field not in ("real", "integer"):
        raise MatrixMarketParseError(path, 1, f"不支持的数值类型: {field}")
    if symmetry not in SUPPORTED_SYMMETRY:
        raise MatrixMarketParseError(path, 1, f"不支持的对称性限定: {symmetry}")
    return symmetry


def read_matrix_market_with_symmetry(path: PathLike) -> Tuple[CompressedColumnMatrix, str]:
    """
    读取 Matrix Market 文件

    Args:
        path: 文件路径

    Returns:
        Tuple[CompressedColumnMatrix, str]: 矩阵与对称性限定 ("general" 或 "symmetric")

    Raises:
        MatrixMarketParseError: 文件缺失或格式错误, 携带文件与行号
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise MatrixMarketParseError(path, None, f"无法读取文件: {exc}") from exc
    if not lines:
        raise MatrixMarketParseError(path, None, "文件为空")
    symmetry = _parse_header(path, lines[0])

    size: Optional[Tuple[int, int, int]] = None
    rows, cols, vals = [], [], []
    for number, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        tokens = line.split()
        if size is None:
            try:
                if len(tokens) != 3:
                    raise ValueError
                size = tuple(int(t) for t in tokens)
            except ValueError:
                raise MatrixMarketParseError(path, number, f"尺寸行应为 'nrows ncols nnz': {line}") from None
            if min(size) < 0:
                raise MatrixMarketParseError(path, number, "尺寸不能为负")
            continue
        if len(tokens) != 3:
            raise MatrixMarketParseError(path, number, f"数据行应为 'row col value': {line}")
        try:
            r, c, v = int(tokens[0]) - 1, int(tokens[1]) - 1, float(tokens[2])
        except ValueError:
            raise MatrixMarketParseError(path, number, f"无法解析数据行: {line}") from None
        if not (0 <= r < size[0] and 0 <= c < size[1]):
            raise MatrixMarketParseError(path, number, f"索引 ({r + 1}, {c + 1}) 超出尺寸 {size[0]}x{size[1]}")
        if not np.isfinite(v):
            raise MatrixMarketParseError(path, number, f"数值不是有限数: {tokens[2]}")
        if symmetry == "symmetric" and r < c:
            r, c = c, r
        rows.append(r)
        cols.append(c)
        vals.append(v)

    if size is None:
        raise MatrixMarketParseError(path, None, "缺少尺寸行")
    if len(vals) != size[2]:
        raise MatrixMarketParseError(path, None, f"声明 {size[2]} 个元素, 实际读到 {len(vals)} 个")
    if symmetry == "symmetric" and size[0] != size[1]:
        raise MatrixMarketParseError(path, None, "symmetric 矩阵必须是方阵")
    matrix = CompressedColumnMatrix.from_triplets(rows, cols, vals, (size[0], size[1]))
    return matrix, symmetry


def read_matrix_market(path: PathLike) -> CompressedColumnMatrix:
    """读取 Matrix Market 文件, 只返回矩阵"""
    return read_matrix_market_with_symmetry(path)[0]


def write_matrix_market(
    path: PathLike,
    matrix: CompressedColumnMatrix,
    symmetric: bool = False,
    comment: Optional[str] = None,
) -> Path:
    """
    写出 Matrix Market 文件

    数值使用 Python 的最短往返表示, 写出再读入可逐位复现。

    Args:
        path: 输出路径
        matrix: 矩阵; symmetric=True 时应为下三角存储
        symmetric: 是否写为 symmetric 限定
        comment: 可选注释行

    Returns:
        Path: 写出的文件路径
    """
    path = Path(path)
    if symmetric and not matrix.is_lower():
        raise ValueError("symmetric 输出要求下三角存储")
    header = f"%%MatrixMarket matrix coordinate real {'symmetric' if symmetric else 'general'}"
    out = [header]
    if comment:
        out.extend(f"% {text}" for text in comment.splitlines())
    out.append(f"{matrix.nrows} {matrix.ncols} {matrix.nnz}")
    for r, c, v in zip(matrix.row_idx.tolist(), matrix.col_idx.tolist(), matrix.values.tolist()):
        out.append(f"{r + 1} {c + 1} {v!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path
