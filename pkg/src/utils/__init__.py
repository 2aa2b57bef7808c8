"""
Utilities - Shared logging helpers and exceptions for Gadgetdict
"""

from .errors import (
    GadgetdictError,
    CapacityExhausted,
    InvalidPage,
    SizeMismatch,
    BadParameters,
    NeedsRebuild,
    DictionaryFull,
    PageFileError,
)
from .logger import setup_logger, ProgressTracker

__all__ = [
    'GadgetdictError',
    'CapacityExhausted',
    'InvalidPage',
    'SizeMismatch',
    'BadParameters',
    'NeedsRebuild',
    'DictionaryFull',
    'PageFileError',
    'setup_logger',
    'ProgressTracker',
]
