"""
配置文件加载器
负责加载和管理采样密度、数值容差、命令行默认值与日志配置
"""
import copy
import json
from pathlib import Path
from typing import Any, Dict


class ConfigValidationError(Exception):
    """配置验证错误"""
    pass


class ConfigLoader:
    """配置文件加载器类"""

    # 默认配置
    DEFAULT_CONFIG = {
        "sampling_config": {
            "tm_sample_density": 1024,
            "hr_window_samples": 2001,
            "lemma_grid_angles": 360,
            "lemma_grid_radii": 50
        },
        "tolerance_config": {
            "denom_tol": 1e-9,
            "fit_tol": 1e-6,
            "strip_slack": 1e-12,
            "multiplicativity_tol": 1e-9
        },
        "cli_config": {
            "seed": 0,
            "parallel": 1,
            "float_digits": 17
        },
        "logging_config": {
            "level": "WARNING",
            "log_file": "",
            "max_file_size": "10MB",
            "backup_count": 5,
            "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        }
    }

    # 配置验证规则
    VALIDATION_RULES = {
        "sampling_config": {
            "tm_sample_density": int,
            "hr_window_samples": int,
            "lemma_grid_angles": int,
            "lemma_grid_radii": int
        },
        "tolerance_config": {
            "denom_tol": (float, int),
            "fit_tol": (float, int),
            "strip_slack": (float, int),
            "multiplicativity_tol": (float, int)
        },
        "cli_config": {
            "seed": int,
            "parallel": int,
            "float_digits": int
        },
        "logging_config": {
            "level": str,
            "log_file": str,
            "max_file_size": str,
            "backup_count": int,
            "format": str
        }
    }

    def __init__(self, config_file: str = "config.json", create_if_missing: bool = False):
        """
        初始化配置加载器

        Args:
            config_file: 配置文件路径
            create_if_missing: 文件不存在时是否写出默认配置
        """
        self.config_file = Path(config_file)
        self.create_if_missing = create_if_missing
        self._config = None

    def load_config(self) -> Dict[str, Any]:
        """
        加载配置文件，文件不存在时使用默认配置

        Returns:
            配置字典

        Raises:
            ConfigValidationError: 配置文件格式错误或验证失败
        """
        if not self.config_file.exists():
            self._config = copy.deepcopy(self.DEFAULT_CONFIG)
            if self.create_if_missing:
                self.save_config()
            return self._config

        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                loaded_config = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigValidationError(f"配置文件格式错误: {e}")

        if not isinstance(loaded_config, dict):
            raise ConfigValidationError("配置文件的顶层必须是对象")

        config = self._merge_with_defaults(loaded_config)
        self._validate_config(config)
        self._config = config
        return self._config

    def save_config(self) -> None:
        """
        保存配置到文件

        Raises:
            IOError: 文件写入失败
        """
        if self._config is None:
            self._config = copy.deepcopy(self.DEFAULT_CONFIG)

        try:
            self.config_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.config_file, 'w', encoding='utf-8') as f:
                json.dump(self._config, f, ensure_ascii=False, indent=4)
        except IOError as e:
            raise IOError(f"保存配置文件失败: {e}")

    def _merge_with_defaults(self, loaded_config: Dict[str, Any]) -> Dict[str, Any]:
        """
        将加载的配置与默认配置合并

        Args:
            loaded_config: 从文件加载的配置

        Returns:
            合并后的配置
        """
        merged_config = copy.deepcopy(self.DEFAULT_CONFIG)

        for section, section_config in loaded_config.items():
            if section in merged_config and isinstance(section_config, dict):
                merged_config[section].update(section_config)
            else:
                merged_config[section] = section_config

        return merged_config

    def _validate_config(self, config: Dict[str, Any]) -> None:
        """
        验证配置的有效性

        Raises:
            ConfigValidationError: 配置验证失败
        """
        for section_name, section_rules in self.VALIDATION_RULES.items():
            if section_name not in config:
                continue

            section_config = config[section_name]
            if not isinstance(section_config, dict):
                raise ConfigValidationError(f"配置节 '{section_name}' 必须是字典类型")

            for key, expected_type in section_rules.items():
                if key not in section_config:
                    continue
                value = section_config[key]
                # bool 是 int 的子类
                if isinstance(value, bool) or not isinstance(value, expected_type):
                    raise ConfigValidationError(
                        f"配置项 '{section_name}.{key}' 类型错误，期望 {expected_type}，实际 {type(value)}"
                    )

        self._validate_special_rules(config)

    def _validate_special_rules(self, config: Dict[str, Any]) -> None:
        """
        验证特殊规则

        Raises:
            ConfigValidationError: 配置验证失败
        """
        sampling = config.get("sampling_config", {})
        for key in ("tm_sample_density", "lemma_grid_angles", "lemma_grid_radii"):
            if sampling.get(key, 2) < 2:
                raise ConfigValidationError(f"{key} 必须 ≥ 2")
        if sampling.get("hr_window_samples", 3) < 3:
            raise ConfigValidationError("hr_window_samples 必须 ≥ 3")

        for key, value in config.get("tolerance_config", {}).items():
            if isinstance(value, (int, float)) and value < 0:
                raise ConfigValidationError(f"容差 {key} 不能为负数")

        cli = config.get("cli_config", {})
        if cli.get("parallel", 1) < 1:
            raise ConfigValidationError("parallel 必须 ≥ 1")
        if not (1 <= cli.get("float_digits", 17) <= 17):
            raise ConfigValidationError("float_digits 必须在 1 到 17 之间")

        if "logging_config" in config:
            valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
            level = config["logging_config"].get("level", "WARNING")
            if level not in valid_levels:
                raise ConfigValidationError(f"日志级别必须是 {valid_levels} 中的一个")

    def _section(self, name: str) -> Dict[str, Any]:
        if self._config is None:
            self.load_config()
        return self._config.get(name, {})

    def get_sampling_config(self) -> Dict[str, Any]:
        """获取采样配置"""
        return self._section("sampling_config")

    def get_tolerance_config(self) -> Dict[str, Any]:
        """获取容差配置"""
        return self._section("tolerance_config")

    def get_cli_config(self) -> Dict[str, Any]:
        """获取命令行默认值"""
        return self._section("cli_config")

    def get_logging_config(self) -> Dict[str, Any]:
        """获取日志配置"""
        return self._section("logging_config")

    def get_config_value(self, section: str, key: str, default: Any = None) -> Any:
        """
        获取指定配置值

        Args:
            section: 配置节名称
            key: 配置键名
            default: 默认值
        """
        return self._section(section).get(key, default)

    def update_config(self, updates: Dict[str, Dict[str, Any]]) -> None:
        """
        批量更新配置，验证通过后才生效

        Raises:
            ConfigValidationError: 配置验证失败
        """
        if self._config is None:
            self.load_config()

        temp_config = copy.deepcopy(self._config)
        for section, section_updates in updates.items():
            temp_config.setdefault(section, {}).update(section_updates)

        self._validate_config(temp_config)
        self._config = temp_config

    def reset_to_defaults(self) -> None:
        """重置配置为默认值"""
        self._config = copy.deepcopy(self.DEFAULT_CONFIG)
