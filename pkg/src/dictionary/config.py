"""
Dictionary configuration and the layout derived from it
"""

import logging
from dataclasses import dataclass
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from ..gadget import GadgetParams
from ..io_model import RecordCodec
from ..utils.bits import ceil_lg, is_power_of_two, next_power_of_two
from ..utils.errors import BadParameters
from .costs import check_lambda

logger = logging.getLogger(__name__)

KEY_BITS = 64
VALUE_BITS = 64
OP_INSERT = 0
OP_DELETE = 1


class DictionaryConfig(BaseModel):
    """Constructor parameters of a Dictionary"""
    model_config = ConfigDict(frozen=True)

    n_max: int = Field(default=1 << 20, ge=1)         # Live keys the dictionary must hold
    page_words: int = Field(default=64, ge=1)         # B
    word_bits: int = Field(default=64, ge=1)          # w
    cache_words: int = Field(default=1 << 16, ge=2)   # M
    lam: int = Field(default=16, ge=2)                # Trade-off knob lambda
    t_min: Optional[int] = None                       # Base threshold; derived from lambda if unset
    m_keys: Optional[int] = None                      # Pairs per node; M words' worth if unset
    epsilon: float = Field(default=0.5, gt=0, le=1)   # Fan-out exponent, M^epsilon children
    c_cap: int = Field(default=2, ge=1)               # Gadget capacity constant
    page_budget: Optional[int] = None                 # Max live pages (None = unbounded)
    seed: int = 1
    debug: bool = False                               # Mirror check after every node change


def derive_t_min(lam: int) -> int:
    """Largest power of two t >= 2 with t * lg t <= lambda"""
    t = 2
    while (2 * t) * (t.bit_length()) <= lam:
        t *= 2
    return t


@dataclass(frozen=True)
class DictionaryLayout:
    """Sizes and bit widths that follow from a DictionaryConfig"""
    n: int                  # n_max padded to a power of two
    lg_n: int
    b: int
    shrink_bits: int        # 2 lg n
    log_bits: int           # width of a global log index, lg(2n)
    chunk_bits: int         # routing bits consumed per tree level
    m_keys: int
    t_min: int
    gadget: GadgetParams
    k: int                  # hash independence

    @property
    def pair_widths(self):
        return (self.shrink_bits, self.log_bits)

    def can_route(self, depth: int) -> bool:
        return depth * self.chunk_bits < self.shrink_bits

    def route(self, h: int, depth: int) -> int:
        """Child index of shrunk key h at a node of the given depth"""
        start = depth * self.chunk_bits
        width = min(self.chunk_bits, self.shrink_bits - start)
        shift = self.shrink_bits - start - width
        return (h >> shift) & ((1 << width) - 1)


def derive_layout(config: DictionaryConfig) -> DictionaryLayout:
    """
    Check a config against the structure's parameter bounds and derive its layout

    Raises:
        BadParameters: A bound is violated; the message names it
    """
    b = config.page_words * config.word_bits
    if not is_power_of_two(b):
        raise BadParameters(f"b=B*w={b} is not a power of two")

    n = next_power_of_two(max(config.n_max, 2))
    lg_n = n.bit_length() - 1
    if config.page_words < lg_n:
        raise BadParameters(f"B={config.page_words} is below lg n={lg_n}")
    check_lambda(n, config.page_words, config.cache_words, config.lam)

    shrink_bits = 2 * lg_n
    log_bits = lg_n + 1
    lg_m = ceil_lg(config.cache_words)
    chunk_bits = max(1, int(config.epsilon * lg_m))

    pair_bits = shrink_bits + log_bits
    m_keys = config.m_keys or config.cache_words // -(-pair_bits // config.word_bits)
    if m_keys < 1:
        raise BadParameters(f"m_keys={m_keys} must be positive")
    if RecordCodec((shrink_bits, log_bits), b).per_page > m_keys:
        raise BadParameters(f"m_keys={m_keys} is smaller than one page of pairs")

    t_min = config.t_min or derive_t_min(config.lam)
    if t_min < 2 or not is_power_of_two(t_min):
        raise BadParameters(f"t_min={t_min} must be a power of two >= 2")
    gadget = GadgetParams.padded(-(-m_keys // b), t_min, b, backptr_bits=log_bits, c_cap=config.c_cap)

    layout = DictionaryLayout(
        n=n, lg_n=lg_n, b=b, shrink_bits=shrink_bits, log_bits=log_bits,
        chunk_bits=chunk_bits, m_keys=m_keys, t_min=t_min, gadget=gadget,
        k=max(2, 2 * lg_n),
    )
    logger.debug(f"Layout: n={n} b={b} m_keys={m_keys} t={gadget.t} t_min={t_min} "
                 f"chunk={chunk_bits} elem_bits={gadget.elem_bits}")
    return layout
