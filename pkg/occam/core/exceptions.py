"""异常定义

参数类错误同时继承 ValueError，捕获 ValueError 的调用方无需改动。
"""

from typing import Optional


class OccamError(Exception):
    """所有 OCCAM 错误的基类"""


class InvalidParameterError(OccamError, ValueError):
    """参数不满足前置条件"""


class DimensionMismatch(InvalidParameterError):
    """模型参数维度不一致"""


class ShapeMismatch(InvalidParameterError):
    """两个待比较矩阵形状不一致"""


class EntryOutOfRange(OccamError, ValueError):
    """期望边概率矩阵存在 [0, 1] 之外的元素"""


class DegreeTooLarge(EntryOutOfRange):
    """目标平均度过大，导致边概率超过 1"""


class NotPSD(InvalidParameterError):
    """矩阵不是半正定的"""


class InvalidProfile(InvalidParameterError):
    """重叠结构（块与质量）格式错误"""


class NonpositiveAlpha(InvalidParameterError):
    """稀疏度估计不为正，无法计算正则化参数"""


class TooFewPoints(InvalidParameterError):
    """样本数少于聚类数"""


class DeficientSpectrum(OccamError, RuntimeError):
    """选出的 K 个特征值全部非正"""


class DeficientSpectrumWarning(UserWarning):
    """部分选出的特征值非正，对应列已置零"""


class SingularCenters(OccamError, ArithmeticError):
    """聚类中心的 Gram 矩阵接近奇异"""


class ConvergenceError(OccamError, RuntimeError):
    """迭代过程违反单调性"""


class ParseError(OccamError, ValueError):
    """文本文件解析失败"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"第 {line_number} 行: {message}"
        super().__init__(message)


class GraphParseError(ParseError):
    """边列表文件解析失败"""
