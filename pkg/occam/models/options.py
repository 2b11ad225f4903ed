"""估计器选项模型

默认值取自全局配置（config.yaml / 环境变量），可逐项覆盖。
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from occam.utils.config import get_settings


def _kmedians_default(name: str):
    return lambda: getattr(get_settings().kmedians, name)


class KMediansConfig(BaseModel):
    """K-medians 聚类配置"""

    model_config = ConfigDict(frozen=True)

    restarts: int = Field(default_factory=_kmedians_default("restarts"), gt=0, description="随机重启次数")
    max_outer_iters: int = Field(default_factory=_kmedians_default("max_outer_iters"), gt=0, description="最大外层迭代次数")
    weiszfeld_tol: float = Field(default_factory=_kmedians_default("weiszfeld_tol"), gt=0, description="Weiszfeld 收敛容差")
    weiszfeld_max_iters: int = Field(
        default_factory=_kmedians_default("weiszfeld_max_iters"), gt=0, description="Weiszfeld 最大迭代次数"
    )
    loss_tol: float = Field(default_factory=_kmedians_default("loss_tol"), gt=0, description="损失改善量低于此值即停止")
    seed: int = Field(default_factory=lambda: get_settings().fit.seed, description="随机种子")


class OccamOptions(BaseModel):
    """OCCAM 估计器选项"""

    model_config = ConfigDict(frozen=True)

    c_tau: float = Field(default_factory=lambda: get_settings().fit.c_tau, gt=0, description="正则化常数 C_τ")
    tau_override: Optional[float] = Field(default=None, gt=0, description="直接指定 τ，忽略 C_τ")
    kmedians: KMediansConfig = Field(default_factory=KMediansConfig)
    threshold: Optional[float] = Field(default=None, description="二值化阈值，默认 1/K")
    seed: int = Field(default_factory=lambda: get_settings().fit.seed, description="随机种子")

    @field_validator("threshold")
    @classmethod
    def validate_threshold(cls, v):
        """显式阈值必须在 (0, 1) 内"""
        if v is not None and not 0 < v < 1:
            raise ValueError("阈值必须在 (0, 1) 内")
        return v

    def resolved_threshold(self, k: int) -> float:
        return self.threshold if self.threshold is not None else 1.0 / k
