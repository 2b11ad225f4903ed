"""文件读写: 边列表、隶属矩阵 CSV 与 key=value 元数据"""

from pathlib import Path
from typing import Dict, Mapping, Optional, Union

import numpy as np
import pandas as pd

from occam.core.exceptions import GraphParseError, ParseError
from occam.models.network import AdjacencyMatrix, as_matrix

PathLike = Union[str, Path]

FLOAT_FORMAT = "%.12g"


def _ensure_parent(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_edge_list(a: AdjacencyMatrix, path: PathLike) -> None:
    """写出边列表: 首行 "# n=N"，其后每行 "i j"（0 起始，i<j，按字典序）"""
    rows, cols = np.nonzero(np.triu(a.entries, k=1))
    lines = [f"# n={a.n}"] + [f"{i} {j}" for i, j in zip(rows.tolist(), cols.tolist())]
    _ensure_parent(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_node(token: str, line_number: int) -> int:
    try:
        node = int(token)
    except ValueError:
        raise GraphParseError(f"节点编号不是整数: {token!r}", line_number) from None
    if node < 0:
        raise GraphParseError(f"节点编号不能为负: {node}", line_number)
    return node


def read_edge_list(path: PathLike, n: Optional[int] = None) -> AdjacencyMatrix:
    """读取边列表

    以 # 开头的行为注释，"# n=N" 给出节点数；否则节点数取最大编号加一。

    Args:
        path: 文件路径
        n: 显式节点数，优先于文件头

    Raises:
        GraphParseError: 行格式错误、自环或编号越界，附带行号
    """
    edges = []
    header_n: Optional[int] = None
    with open(path, "r", encoding="utf-8") as f:
        for line_number, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("n="):
                    try:
                        header_n = int(body[2:])
                    except ValueError:
                        raise GraphParseError(f"无法解析节点数: {body!r}", line_number) from None
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise GraphParseError(f"每行应为两个节点编号，实际: {line!r}", line_number)
            i, j = (_parse_node(t, line_number) for t in tokens)
            if i == j:
                raise GraphParseError(f"不允许自环: {i}", line_number)
            edges.append((line_number, i, j))

    size = n if n is not None else header_n
    if size is None:
        size = max((max(i, j) for _, i, j in edges), default=-1) + 1
    for line_number, i, j in edges:
        if max(i, j) >= size:
            raise GraphParseError(f"节点编号 {max(i, j)} 超出节点数 {size}", line_number)

    entries = np.zeros((size, size), dtype=np.uint8)
    for _, i, j in edges:
        entries[i, j] = entries[j, i] = 1
    return AdjacencyMatrix(entries)


def write_membership_csv(matrix, path: PathLike) -> None:
    """写出无表头、K 列的隶属矩阵 CSV；二值矩阵按整数写出"""
    values = np.asarray(as_matrix(matrix))
    frame = pd.DataFrame(values)
    if np.issubdtype(values.dtype, np.integer):
        frame.to_csv(_ensure_parent(path), header=False, index=False)
    else:
        frame.to_csv(_ensure_parent(path), header=False, index=False, float_format=FLOAT_FORMAT)


def read_membership_csv(path: PathLike) -> np.ndarray:
    """读取无表头的隶属矩阵 CSV

    Raises:
        ParseError: 存在非数值或缺失项
    """
    try:
        frame = pd.read_csv(path, header=None, comment="#", skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise ParseError(f"隶属矩阵文件为空: {path}") from None
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna().any(axis=1)
    if bad.any():
        # 数据行号（不计注释与空行）
        raise ParseError(f"隶属矩阵存在非数值或缺失项: {path}", int(np.flatnonzero(bad.to_numpy())[0]) + 1)
    return numeric.to_numpy(dtype=float)


def write_key_values(values: Mapping[str, object], path: PathLike) -> None:
    """写出扁平 key=value 文本"""
    lines = [f"{key}={value}" for key, value in values.items()]
    _ensure_parent(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_key_values(path: PathLike) -> Dict[str, str]:
    """读取扁平 key=value 文本，忽略空行与 # 注释

    Raises:
        ParseError: 行中没有等号或键为空
    """
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_number, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise ParseError(f"应为 key=value 格式: {line!r}", line_number)
            values[key.strip()] = value.strip()
    return values
