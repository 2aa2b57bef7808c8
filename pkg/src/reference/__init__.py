"""
Reference - Ground-truth oracle and the buffer-tree baseline
"""

from .oracle import OracleMap, Op, INSERT, DELETE, LOOKUP, OP_KINDS
from .buffer_tree import BaselineBufferTree, BufferNode, scramble

__all__ = [
    'OracleMap', 'Op', 'INSERT', 'DELETE', 'LOOKUP', 'OP_KINDS',
    'BaselineBufferTree', 'BufferNode', 'scramble',
]
