"""Hereditarily finite sets as nested frozensets."""
from __future__ import annotations

import random
from functools import lru_cache

HF = frozenset

EMPTY: HF = frozenset()


@lru_cache(maxsize=None)
def numeral(n: int) -> HF:
    """von Neumann numeral ``{0, ..., n-1}``."""
    out = EMPTY
    for _ in range(n):
        out = out | {out}
    return out


@lru_cache(maxsize=None)
def hf_rank(x: HF) -> int:
    return 1 + max((hf_rank(y) for y in x), default=-1)


@lru_cache(maxsize=None)
def hf_key(x: HF) -> tuple:
    """Total order used for deterministic output."""
    return (hf_rank(x), len(x), tuple(sorted(hf_key(y) for y in x)))


def hf_sorted(xs):
    return sorted(xs, key=hf_key)


def hf_str(x: HF) -> str:
    return "{" + ",".join(hf_str(y) for y in hf_sorted(x)) + "}"


def parse_hf(text: str) -> HF:
    """Parse brace notation such as ``{{},{{}}}``; whitespace is ignored."""
    s = "".join(text.split())
    pos = 0

    def parse() -> HF:
        nonlocal pos
        if pos >= len(s) or s[pos] != "{":
            raise ValueError(f"expected '{{' at {pos} in {text!r}")
        pos += 1
        items = []
        if s[pos:pos + 1] == "}":
            pos += 1
            return EMPTY
        while True:
            items.append(parse())
            if s[pos:pos + 1] == ",":
                pos += 1
                continue
            if s[pos:pos + 1] == "}":
                pos += 1
                return frozenset(items)
            raise ValueError(f"expected ',' or '}}' at {pos} in {text!r}")

    out = parse()
    if pos != len(s):
        raise ValueError(f"trailing input at {pos} in {text!r}")
    return out


def sets_of_rank(r: int) -> list[HF]:
    """All HF sets of rank < r (the stage V_r), ordered by :func:`hf_key`."""
    stage = [EMPTY] if r >= 1 else []
    for _ in range(1, r):
        from itertools import combinations
        nxt = []
        for k in range(len(stage) + 1):
            nxt.extend(frozenset(c) for c in combinations(stage, k))
        stage = nxt
    return hf_sorted(stage)


def random_hf(rng: random.Random, max_rank: int, max_width: int = 3) -> HF:
    """A random HF set of rank at most ``max_rank``."""
    if max_rank <= 0:
        return EMPTY
    width = rng.randint(0, max_width)
    return frozenset(random_hf(rng, rng.randint(0, max_rank - 1), max_width) for _ in range(width))
