"""OCCAM 重叠连续社区分配模型工具"""

__version__ = "1.0.0"
