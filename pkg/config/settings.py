"""设置管理模块"""
import os
import json
import logging

from .constants import DEFAULT_SETTINGS, SETTINGS_FILE

logger = logging.getLogger(__name__)


def load_config(path):
    """加载场景配置（扁平 JSON 对象）"""
    from torus.errors import ConfigError

    if not os.path.exists(path):
        raise ConfigError(f"配置文件不存在: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"配置文件无法解析: {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"配置文件必须是键值对象: {path}")
    return data


def save_config(data, path):
    """保存场景配置"""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False, sort_keys=True)
        f.write("\n")


def load_settings(path=SETTINGS_FILE):
    """加载运行设置"""
    if not os.path.exists(path):
        return DEFAULT_SETTINGS.copy()
    try:
        with open(path, "r", encoding="utf-8") as f:
            settings = json.load(f)
        # 确保所有设置项都存在
        for key, default_value in DEFAULT_SETTINGS.items():
            if key not in settings:
                settings[key] = default_value
        return settings
    except Exception as e:
        logger.warning(f"[设置加载失败] {e}")
        return DEFAULT_SETTINGS.copy()


def save_settings(settings, path=SETTINGS_FILE):
    """保存运行设置"""
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(settings, f, indent=2, ensure_ascii=False)
    except Exception as e:
        logger.warning(f"[设置保存失败] {e}")
