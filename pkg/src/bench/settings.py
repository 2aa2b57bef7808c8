"""
Benchmark settings - JSON config file, GADGETDICT_* environment, CLI flags
"""

import json
import logging
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..dictionary import DictionaryConfig
from ..utils.errors import BadParameters

logger = logging.getLogger(__name__)


class MemorySettings(BaseModel):
    page_words: int = 64                  # B, words per page
    word_bits: int = 64                   # w
    page_budget: Optional[int] = None     # Max live pages, None = unbounded


class DictionarySettings(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    n_max: int = 1 << 18
    cache_words: int = 1 << 16            # M
    lam: int = Field(default=16, alias='lambda')
    t_min: Optional[int] = None           # Derived from lambda if unset
    m_keys: Optional[int] = None
    epsilon: float = 0.5
    c_cap: int = 2
    debug: bool = False


class BaselineSettings(BaseModel):
    fanout: int = 8                       # lambda_b


class WorkloadSettings(BaseModel):
    ops: int = 10_000
    mix: str = '45:10:45'                 # insert:delete:lookup percentages
    key_dist: str = 'universe2n'          # universe2n | uniform64
    seed: int = 1


class LoggingSettings(BaseModel):
    level: str = 'INFO'


class BenchSettings(BaseSettings):
    """All benchmark knobs; file values win over GADGETDICT_* variables"""
    model_config = SettingsConfigDict(env_prefix='GADGETDICT_', env_nested_delimiter='__')

    memory: MemorySettings = MemorySettings()
    dictionary: DictionarySettings = DictionarySettings()
    baseline: BaselineSettings = BaselineSettings()
    workload: WorkloadSettings = WorkloadSettings()
    logging: LoggingSettings = LoggingSettings()

    def dictionary_config(self, lam: Optional[int] = None) -> DictionaryConfig:
        """DictionaryConfig for these settings, optionally at another lambda"""
        d = self.dictionary
        return DictionaryConfig(
            n_max=d.n_max,
            page_words=self.memory.page_words,
            word_bits=self.memory.word_bits,
            cache_words=d.cache_words,
            lam=lam if lam is not None else d.lam,
            t_min=d.t_min,
            m_keys=d.m_keys,
            epsilon=d.epsilon,
            c_cap=d.c_cap,
            page_budget=self.memory.page_budget,
            seed=self.workload.seed,
            debug=d.debug,
        )


def load_settings(path: Optional[Path] = None) -> BenchSettings:
    """
    Load settings from a JSON file (if given and present) over the environment

    Raises:
        BadParameters: The file is not valid JSON
    """
    data = {}
    if path is not None:
        path = Path(path)
        if path.exists():
            try:
                with open(path) as f:
                    data = json.load(f)
            except json.JSONDecodeError as e:
                raise BadParameters(f"config {path} is not valid JSON: {e}")
            logger.debug(f"Loaded config from {path}")
        else:
            logger.warning(f"Config {path} not found, using defaults and environment")
    return BenchSettings(**data)
