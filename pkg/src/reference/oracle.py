"""
Oracle Map - In-memory ground truth with overwrite semantics
"""

from typing import Dict, NamedTuple, Optional, Tuple

INSERT = 'insert'
DELETE = 'delete'
LOOKUP = 'lookup'
OP_KINDS = (INSERT, DELETE, LOOKUP)


class Op(NamedTuple):
    """One workload operation; value is ignored for deletes and lookups"""
    kind: str
    key: int
    value: int = 0


class OracleMap:
    """Plain dict of key -> (value, tombstone); the last write wins"""

    def __init__(self):
        self._entries: Dict[int, Tuple[int, bool]] = {}
        self.ops = 0

    def __len__(self) -> int:
        """Live key count"""
        return sum(1 for _, dead in self._entries.values() if not dead)

    def insert(self, key: int, value: int):
        self._entries[key] = (value, False)

    def delete(self, key: int):
        self._entries[key] = (0, True)

    def lookup(self, key: int) -> Optional[int]:
        value, dead = self._entries.get(key, (0, True))
        return None if dead else value

    def apply(self, op: Op) -> Optional[int]:
        """Apply op; returns the answer for lookups and None otherwise"""
        self.ops += 1
        if op.kind == INSERT:
            self.insert(op.key, op.value)
        elif op.kind == DELETE:
            self.delete(op.key)
        elif op.kind == LOOKUP:
            return self.lookup(op.key)
        else:
            raise ValueError(f"unknown op kind {op.kind!r}")
        return None

    def live_keys(self):
        return [k for k, (_, dead) in self._entries.items() if not dead]
