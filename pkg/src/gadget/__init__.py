"""
Gadgets - Compressed multisets of hashed keys over paged memory
"""

from .params import (
    GadgetParams, GadgetElement, GadgetLedger, LevelCounters, QueryTrace,
    pad_to_ladder, ladder,
)
from .base import BaseGadget, table_size
from .recursive import Gadget, RecursiveGadget, new_gadget
from .audit import GadgetStats, InvariantReport, gadget_stats, gadget_elements, classify_invariant

__all__ = [
    'GadgetParams', 'GadgetElement', 'GadgetLedger', 'LevelCounters', 'QueryTrace',
    'pad_to_ladder', 'ladder',
    'BaseGadget', 'table_size',
    'Gadget', 'RecursiveGadget', 'new_gadget',
    'GadgetStats', 'InvariantReport', 'gadget_stats', 'gadget_elements', 'classify_invariant',
]
