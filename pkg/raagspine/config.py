"""
Configuration loading for raagspine.

The defaults live in ``raagspine/conf/config.yaml`` and are composed with
hydra. Library functions read their engineering limits from
:func:`get_config` whenever a caller does not pass an explicit value.

Usage:
    from raagspine.config import get_config, load_config

    cfg = get_config()
    print(cfg.words.max_conjugacy_length)

    # one-off overrides, e.g. from the command line
    cfg = load_config(["search.node_budget=1000"])
"""

from pathlib import Path
from typing import List, Optional

import hydra
from hydra.errors import MissingConfigException
from loguru import logger
from omegaconf import DictConfig, OmegaConf

CONF_DIR = Path(__file__).parent / "conf"


def load_config(overrides: Optional[List[str]] = None) -> DictConfig:
    """
    Compose the raagspine configuration.

    Args:
        overrides: hydra-style ``key=value`` overrides

    Returns:
        The composed configuration

    Raises:
        hydra.errors.HydraException: an override names an unknown key or does not parse
    """
    overrides = list(overrides or [])
    try:
        with hydra.initialize(version_base=None, config_path="conf"):
            return hydra.compose(config_name="config", overrides=overrides)
    except (MissingConfigException, ValueError) as e:
        logger.warning(f"Could not compose config with hydra, reading {CONF_DIR} directly: {e}")
        cfg = OmegaConf.load(CONF_DIR / "config.yaml")
        if overrides:
            cfg = OmegaConf.merge(cfg, OmegaConf.from_dotlist(overrides))
        return cfg


_active_config: Optional[DictConfig] = None


def get_config() -> DictConfig:
    """Active configuration, composed on first use"""
    global _active_config
    if _active_config is None:
        _active_config = load_config()
    return _active_config


def set_config(cfg: Optional[DictConfig]) -> None:
    """Install ``cfg`` as the active configuration (None resets to defaults)."""
    global _active_config
    _active_config = cfg


def pick(value, key: str):
    """Return ``value`` unless it is None, else the configured ``key`` (dotted path)."""
    if value is not None:
        return value
    return OmegaConf.select(get_config(), key)
