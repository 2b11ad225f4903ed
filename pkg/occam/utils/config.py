"""配置管理模块"""

import os
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Type

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field
from pydantic.fields import FieldInfo
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

# 加载环境变量
load_dotenv()

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "config.yaml"


class ConfigManager:
    """YAML配置管理器"""

    def __init__(self, config_path: Optional[str] = None):
        """初始化配置管理器

        Args:
            config_path: 配置文件路径，默认依次读取 OCCAM_CONFIG_FILE 环境变量和包内的 config.yaml
        """
        if config_path is None:
            config_path = os.getenv("OCCAM_CONFIG_FILE") or DEFAULT_CONFIG_PATH

        self.config_path = Path(config_path)
        self._config: Dict[str, Any] = {}
        self._load_config()

    def _load_config(self) -> None:
        """加载配置文件"""
        if not self.config_path.exists():
            raise FileNotFoundError(f"配置文件不存在: {self.config_path}")
        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                self._config = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise RuntimeError(f"加载配置文件失败: {e}") from e

    def get(self, key: str, default: Any = None) -> Any:
        """获取配置值

        Args:
            key: 配置键，支持点号分隔的嵌套键，如 'kmedians.restarts'
            default: 默认值

        Returns:
            配置值
        """
        value: Any = self._config
        for k in key.split("."):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        # 字符串形式的环境变量引用 ${NAME}
        if isinstance(value, str) and value.startswith("${") and value.endswith("}"):
            return os.getenv(value[2:-1], default)

        return value

    def as_dict(self) -> Dict[str, Any]:
        """返回完整配置的副本"""
        return {key: self.get(key) for key in self._config}

    def reload(self) -> None:
        """重新加载配置"""
        self._load_config()


class LoggingSettings(BaseModel):
    """日志配置"""
    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file: Optional[str] = None
    max_file_size: str = "10MB"
    backup_count: int = 5


class FitSettings(BaseModel):
    """估计器配置"""
    c_tau: float = Field(default=0.1, gt=0)
    seed: int = 0


class KMediansSettings(BaseModel):
    """K-medians 配置"""
    restarts: int = Field(default=10, gt=0)
    max_outer_iters: int = Field(default=100, gt=0)
    weiszfeld_tol: float = Field(default=1e-8, gt=0)
    weiszfeld_max_iters: int = Field(default=200, gt=0)
    loss_tol: float = Field(default=1e-10, gt=0)


class SamplerSettings(BaseModel):
    """网络生成默认参数"""
    n: int = 500
    k: int = 3
    rho: float = 0.1
    profile: str = "A"
    theta: str = "nohub"
    degree: float = 40.0
    allocation: str = "deterministic"


class ExperimentSettings(BaseModel):
    """实验配置"""
    master_seed: int = 20160915
    ctau_replications: int = 50
    rho_replications: int = 200
    trend_replications: int = 50
    workers: int = 4
    show_progress: bool = True
    record_timing: bool = False


class YamlSettingsSource(PydanticBaseSettingsSource):
    """以 config.yaml 作为最低优先级的配置源"""

    def __init__(self, settings_cls: Type[BaseSettings], config_path: Optional[str] = None):
        super().__init__(settings_cls)
        self._data = ConfigManager(config_path).as_dict()

    def get_field_value(self, field: FieldInfo, field_name: str) -> Tuple[Any, str, bool]:
        return self._data.get(field_name), field_name, False

    def __call__(self) -> Dict[str, Any]:
        return {
            name: value
            for name, value in self._data.items()
            if name in self.settings_cls.model_fields and value is not None
        }


class Settings(BaseSettings):
    """主配置类"""
    logging: LoggingSettings = LoggingSettings()
    fit: FitSettings = FitSettings()
    kmedians: KMediansSettings = KMediansSettings()
    sampler: SamplerSettings = SamplerSettings()
    experiments: ExperimentSettings = ExperimentSettings()

    model_config = SettingsConfigDict(
        env_prefix="OCCAM_",
        env_nested_delimiter="__",
        env_file=".env",
        extra="ignore",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        # 优先级: 构造参数 > 环境变量 > .env > config.yaml
        return (
            init_settings,
            env_settings,
            dotenv_settings,
            YamlSettingsSource(settings_cls),
            file_secret_settings,
        )


_settings: Optional[Settings] = None


def get_settings(reload: bool = False) -> Settings:
    """获取全局配置实例

    Args:
        reload: 是否重新读取环境变量和配置文件

    Returns:
        配置实例
    """
    global _settings
    if _settings is None or reload:
        _settings = Settings()
    return _settings


def get_config(key: Optional[str] = None, default: Any = None) -> Any:
    """按点号键读取原始YAML配置的便捷函数"""
    manager = ConfigManager()
    if key is None:
        return manager
    return manager.get(key, default)
