"""Deterministic sampling helpers.

Implemented on top of ``Random.randrange`` only, so sequences are pinned by
this module rather than by interpreter-version heuristics inside
``random.sample`` / ``random.shuffle``.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

T = TypeVar("T")


def sample_without_replacement(rng, items: Sequence[T], k: int) -> list[T]:
    """Uniform k-subset of ``items`` in draw order (partial Fisher-Yates)."""
    if k < 0 or k > len(items):
        raise ValueError(f"cannot sample {k} from {len(items)} items")
    pool = list(items)
    out = []
    for i in range(k):
        j = rng.randrange(i, len(pool))
        pool[i], pool[j] = pool[j], pool[i]
        out.append(pool[i])
    return out


def shuffled(rng, items: Sequence[T]) -> list[T]:
    """Uniform permutation of ``items`` (Fisher-Yates)."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.randrange(i + 1)
        out[i], out[j] = out[j], out[i]
    return out
