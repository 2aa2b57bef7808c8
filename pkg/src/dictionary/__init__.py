"""
Dictionary - Global log, key shrinkage and a buffer tree of gadget nodes
"""

from .costs import check_lambda, predict_costs, predict_baseline_costs
from .config import DictionaryConfig, DictionaryLayout, derive_layout, derive_t_min
from .node import DictNode, NodeEvents
from .dictionary import Dictionary, DictionaryStats, LogEntry

__all__ = [
    'check_lambda', 'predict_costs', 'predict_baseline_costs',
    'DictionaryConfig', 'DictionaryLayout', 'derive_layout', 'derive_t_min',
    'DictNode', 'NodeEvents',
    'Dictionary', 'DictionaryStats', 'LogEntry',
]
