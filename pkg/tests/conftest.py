"""Shared random generators for protocol and model tests.

All randomness is seeded at the call site so every test run is replayable.
"""

from __future__ import annotations

import random
from fractions import Fraction

from nonlocal_lab.model import DeterministicLhv, MixedLhv
from nonlocal_lab.protocol import Edge, Leaf, MixedProtocol, Node, ProtocolTree


def random_click_lhv(rng: random.Random, n: int, k: int, l: int = 2) -> DeterministicLhv:
    return DeterministicLhv(
        tables=tuple(tuple(rng.randrange(l) for _ in range(k)) for _ in range(n))
    )


def random_detector_lhv(rng: random.Random, n: int, k: int, l: int = 2) -> DeterministicLhv:
    entries = list(range(l)) + [None]
    return DeterministicLhv(
        tables=tuple(tuple(rng.choice(entries) for _ in range(k)) for _ in range(n))
    )


def random_partition(rng: random.Random, k: int) -> list[frozenset[int]]:
    values = list(range(k))
    rng.shuffle(values)
    nblocks = rng.randint(1, k)
    cuts = sorted(rng.sample(range(1, k), nblocks - 1))
    blocks = []
    prev = 0
    for cut in cuts + [k]:
        blocks.append(frozenset(values[prev:cut]))
        prev = cut
    return blocks


def random_tree(
    rng: random.Random, n: int, k: int, max_depth: int = 3, l: int = 2
) -> ProtocolTree:
    def build(depth: int):
        if depth >= max_depth or rng.random() < 0.3:
            return Leaf(lhv=random_click_lhv(rng, n, k, l))
        return Node(
            party=rng.randrange(n),
            edges=tuple(
                Edge(inputs=block, child=build(depth + 1))
                for block in random_partition(rng, k)
            ),
        )

    root = build(0)
    if isinstance(root, Leaf):  # keep at least one broadcast most of the time
        root = Node(
            party=rng.randrange(n),
            edges=tuple(
                Edge(inputs=block, child=build(1))
                for block in random_partition(rng, k)
            ),
        )
    return ProtocolTree(n=n, k=k, root=root)


def random_weights(rng: random.Random, count: int) -> list[Fraction]:
    raw = [rng.randint(1, 9) for _ in range(count)]
    total = sum(raw)
    return [Fraction(v, total) for v in raw]


def random_mixed_protocol(
    rng: random.Random, n: int, k: int, max_depth: int = 3, max_components: int = 3
) -> MixedProtocol:
    count = rng.randint(1, max_components)
    trees = [random_tree(rng, n, k, max_depth) for _ in range(count)]
    weights = random_weights(rng, count)
    return MixedProtocol(components=tuple(zip(trees, weights)), flavor="shared")


def random_mixed_lhv(
    rng: random.Random, n: int, k: int, max_components: int = 4, detector: bool = False
) -> MixedLhv:
    count = rng.randint(1, max_components)
    maker = random_detector_lhv if detector else random_click_lhv
    models = [maker(rng, n, k) for _ in range(count)]
    weights = random_weights(rng, count)
    return MixedLhv(components=tuple(zip(models, weights)))
