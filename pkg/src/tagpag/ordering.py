"""Deterministic per-annotator task ordering and navigation.

The permutation is a seeded Fisher-Yates shuffle driven by SplitMix64, with
the seed derived from the annotator id via FNV-1a. Equal inputs give
bit-identical orders across runs and platforms, so an annotator's order
survives restarts while differing between annotators. The modulo draw has
negligible bias at corpus scale and keeps the algorithm trivially portable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Set

_MASK64 = (1 << 64) - 1

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


class OutOfRangeError(IndexError):
    """Position or task index outside [0, n)."""


def derive_seed(annotator_id: str, global_seed: int) -> int:
    """FNV-1a 64 over the annotator id's UTF-8 bytes, XOR the global seed."""
    h = FNV_OFFSET_BASIS
    for byte in annotator_id.encode("utf-8"):
        h ^= byte
        h = (h * FNV_PRIME) & _MASK64
    return h ^ (global_seed & _MASK64)


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)


def shuffle_order(n: int, seed: int) -> list[int]:
    """Fisher-Yates permutation of range(n), fully determined by the seed."""
    permutation = list(range(n))
    rng = SplitMix64(seed)
    for i in range(n - 1, 0, -1):
        j = rng.next() % (i + 1)
        permutation[i], permutation[j] = permutation[j], permutation[i]
    return permutation


@dataclass
class SessionOrder:
    """One annotator's view of the corpus: permutation[position] = task index."""

    annotator_id: str
    seed: int
    permutation: list[int]
    randomized: bool
    _inverse: dict = field(init=False, repr=False)

    def __post_init__(self):
        self._inverse = {task: pos for pos, task in enumerate(self.permutation)}

    def __len__(self) -> int:
        return len(self.permutation)


def build_order(
    annotator_id: str,
    n: int,
    global_seed: int = 0,
    randomize: bool = False,
) -> SessionOrder:
    seed = derive_seed(annotator_id, global_seed)
    permutation = shuffle_order(n, seed) if randomize else list(range(n))
    return SessionOrder(
        annotator_id=annotator_id,
        seed=seed,
        permutation=permutation,
        randomized=randomize,
    )


def position_of(order: SessionOrder, task_index: int) -> int:
    """Inverse permutation lookup: where a corpus index sits in this order."""
    try:
        return order._inverse[task_index]
    except KeyError:
        raise OutOfRangeError(f"task index {task_index} not in [0, {len(order)})") from None


def next_unannotated(
    order: SessionOrder,
    annotated: Set[int],
    from_position: int,
) -> Optional[int]:
    """Smallest position >= from_position (wrapping once) whose task is
    unannotated; None when everything is annotated."""
    n = len(order)
    if not 0 <= from_position < n:
        raise OutOfRangeError(f"position {from_position} not in [0, {n})")
    for offset in range(n):
        position = (from_position + offset) % n
        if order.permutation[position] not in annotated:
            return position
    return None


def advance(
    order: SessionOrder,
    annotated: Set[int],
    current_position: int,
    mode: str,
) -> Optional[int]:
    """Position after a commit: next unannotated in single mode, no move in
    multi mode. None when no unannotated task remains."""
    n = len(order)
    if not 0 <= current_position < n:
        raise OutOfRangeError(f"position {current_position} not in [0, {n})")
    if mode != "single":
        return current_position
    return next_unannotated(order, annotated, (current_position + 1) % n)
