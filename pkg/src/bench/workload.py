"""
Workload generation - Deterministic insert/delete/lookup streams
"""

import random
from typing import Dict, Iterator, List, Literal, Tuple

from pydantic import BaseModel, field_validator

from ..reference import DELETE, INSERT, LOOKUP, Op
from ..utils.errors import BadParameters

KeyDist = Literal['universe2n', 'uniform64']


def parse_mix(text: str) -> Tuple[int, int, int]:
    """Parse 'I:D:L' percentages that sum to 100"""
    parts = text.split(':')
    try:
        mix = tuple(int(p) for p in parts)
    except ValueError:
        raise BadParameters(f"mix {text!r} is not I:D:L integers")
    if len(mix) != 3 or any(m < 0 for m in mix):
        raise BadParameters(f"mix {text!r} needs three non-negative parts")
    if sum(mix) != 100:
        raise BadParameters(f"mix {text!r} sums to {sum(mix)}, not 100")
    return mix


class WorkloadSpec(BaseModel):
    n_ops: int
    mix: Tuple[int, int, int] = (45, 10, 45)
    key_dist: KeyDist = 'universe2n'
    n: int = 1 << 18                      # n_max; keys come from [2n] under universe2n
    seed: int = 1

    @field_validator('mix')
    @classmethod
    def mix_sums_to_100(cls, v):
        if sum(v) != 100 or any(m < 0 for m in v):
            raise ValueError(f"mix {v} must be non-negative and sum to 100")
        return v


class _LiveSet:
    """Keys currently live, with O(1) add, remove and uniform choice"""

    def __init__(self):
        self.keys: List[int] = []
        self.slots: Dict[int, int] = {}

    def __len__(self) -> int:
        return len(self.keys)

    def __contains__(self, key: int) -> bool:
        return key in self.slots

    def add(self, key: int):
        if key not in self.slots:
            self.slots[key] = len(self.keys)
            self.keys.append(key)

    def remove(self, key: int):
        slot = self.slots.pop(key, None)
        if slot is None:
            return
        last = self.keys.pop()
        if slot < len(self.keys):
            self.keys[slot] = last
            self.slots[last] = slot

    def choice(self, rng: random.Random) -> int:
        return self.keys[rng.randrange(len(self.keys))]


def generate_workload(spec: WorkloadSpec) -> Iterator[Op]:
    """
    Yield spec.n_ops operations, identical for identical specs

    Deletes pick a live key when one exists. Lookups are positive (a live key)
    and negative (an absent key) with equal probability. Once n keys are live,
    inserts overwrite live keys so the live set never exceeds n.
    """
    rng = random.Random(spec.seed)
    live = _LiveSet()
    insert_pct, delete_pct, _ = spec.mix

    if spec.key_dist == 'universe2n':
        universe = 2 * spec.n
        draw = lambda: rng.randrange(universe)
    else:
        draw = lambda: rng.getrandbits(64)

    for _ in range(spec.n_ops):
        roll = rng.randrange(100)
        if roll < insert_pct:
            key = draw()
            if key not in live and len(live) >= spec.n:
                key = live.choice(rng)
            live.add(key)
            yield Op(INSERT, key, rng.getrandbits(64))
        elif roll < insert_pct + delete_pct:
            key = live.choice(rng) if len(live) else draw()
            live.remove(key)
            yield Op(DELETE, key)
        else:
            if len(live) and rng.random() < 0.5:
                key = live.choice(rng)
            else:
                key = draw()
                while key in live:
                    key = draw()
            yield Op(LOOKUP, key)
