"""64-bit SimHash signatures and near-duplicate candidate search.

Feature hash is pinned to BLAKE2b with an 8-byte digest over the UTF-8
token bytes, so signatures are stable across processes and platforms.
Candidate pairs at Hamming distance <= t are found with the pigeonhole
band index: split the 64 bits into t+1 blocks; any pair within distance t
must agree on at least one whole block.
"""

from __future__ import annotations

import hashlib
from collections import Counter, defaultdict
from typing import Iterable, Iterator

from .model import tokenize

BITS = 64
_MASK = (1 << BITS) - 1


def feature_hash(token: str) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def simhash64(text: str) -> int:
    """SimHash over word tokens, weighted by token frequency.

    Empty or token-free text has the defined constant signature 0.
    """
    counts = Counter(tokenize(text))
    if not counts:
        return 0
    acc = [0] * BITS
    for token, weight in counts.items():
        h = feature_hash(token)
        for bit in range(BITS):
            if h & (1 << bit):
                acc[bit] += weight
            else:
                acc[bit] -= weight
    signature = 0
    for bit in range(BITS):
        if acc[bit] > 0:
            signature |= 1 << bit
    return signature


def hamming(a: int, b: int) -> int:
    return ((a ^ b) & _MASK).bit_count()


def _blocks(signature: int, n_blocks: int) -> Iterator[tuple[int, int]]:
    base, extra = divmod(BITS, n_blocks)
    offset = 0
    for i in range(n_blocks):
        width = base + (1 if i < extra else 0)
        yield i, (signature >> offset) & ((1 << width) - 1)
        offset += width


def near_duplicate_pairs(signatures: list[int], threshold: int) -> Iterator[tuple[int, int]]:
    """Yield every index pair (i < j) with Hamming distance <= threshold.

    Complete for the given threshold: banding only prunes, never misses.
    """
    if threshold < 0 or threshold > BITS:
        raise ValueError(f"threshold must be in [0, {BITS}]")
    if threshold >= BITS:
        for i in range(len(signatures)):
            for j in range(i + 1, len(signatures)):
                yield i, j
        return
    buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
    n_blocks = min(threshold + 1, BITS)
    for idx, sig in enumerate(signatures):
        for key in _blocks(sig, n_blocks):
            buckets[key].append(idx)
    seen: set[tuple[int, int]] = set()
    for members in buckets.values():
        if len(members) < 2:
            continue
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                pair = (members[a], members[b])
                if pair in seen:
                    continue
                seen.add(pair)
                if hamming(signatures[pair[0]], signatures[pair[1]]) <= threshold:
                    yield pair


def signatures_for(texts: Iterable[str]) -> list[int]:
    return [simhash64(t) for t in texts]
