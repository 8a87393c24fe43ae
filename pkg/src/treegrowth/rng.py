"""Seeded instance generation.

SplitMix64 is used because it is tiny, fully specified and easy to port, so
instances drawn from a seed agree across implementations.  Bounded integers
use rejection sampling (no modulo bias).
"""
from __future__ import annotations

from .groups import DirectProduct, FreeGroup, FreeProduct, Group, GroupError, MarkedSubset

MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def between(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.below(hi - lo + 1)

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def shuffle(self, seq: list) -> list:
        for i in range(len(seq) - 1, 0, -1):
            j = self.below(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
        return seq


def random_word(G: Group, max_len: int, rng: SplitMix64, min_len: int = 0):
    """A normal form of length in [min_len, max_len], uniform length then uniform letters."""
    n = rng.between(min_len, max_len)
    if isinstance(G, FreeGroup):
        out = bytearray()
        for _ in range(n):
            while True:
                x = rng.below(2 * G.rank)
                if not out or out[-1] != x ^ 1:
                    break
            out.append(x)
        return bytes(out)
    if isinstance(G, FreeProduct):
        k = len(G.orders)
        out = bytearray()
        last = -1
        for _ in range(n):
            f = rng.below(k - 1) if last >= 0 else rng.below(k)
            if last >= 0 and f >= last:
                f += 1
            e = rng.between(1, G.orders[f] - 1)
            out.append(G.code(f, e))
            last = f
        return bytes(out)
    if isinstance(G, DirectProduct):
        return tuple(random_word(F, max_len, rng, min_len) for F in G.factors)
    raise GroupError(f"no random words for {G!r}")


def random_subset(G: Group, rng: SplitMix64, min_size: int, max_size: int, max_len: int,
                  allow_identity: bool = False) -> MarkedSubset:
    """A set of ``size`` distinct elements, size uniform in [min_size, max_size]."""
    size = rng.between(min_size, max_size)
    out: dict = {}
    tries = 0
    while len(out) < size:
        w = random_word(G, max_len, rng)
        tries += 1
        if tries > 1000 * size:
            raise GroupError("could not draw enough distinct elements")
        if not allow_identity and w == G.identity:
            continue
        out[w] = None
    return MarkedSubset(G, tuple(out))


def random_permutation(n: int, rng: SplitMix64) -> tuple[int, ...]:
    return tuple(rng.shuffle(list(range(n))))


def _compose(a, b):
    return tuple(a[x] for x in b)


def random_transitive_images(G: FreeGroup, d: int, rng: SplitMix64) -> dict:
    """Random permutations of d points, one per generator, acting transitively."""
    while True:
        imgs = {lab: random_permutation(d, rng) for lab in G.labels}
        seen, frontier = {0}, [0]
        while frontier:
            nxt = []
            for q in frontier:
                for p in imgs.values():
                    for r in (p[q], p.index(q)):
                        if r not in seen:
                            seen.add(r)
                            nxt.append(r)
            frontier = nxt
        if len(seen) == d:
            return imgs


def random_regular_images(G: FreeGroup, d: int, rng: SplitMix64) -> dict:
    """Images in the regular representation of a group of order d (cyclic, or
    the Klein group for d = 4 on a coin flip), onto the whole group."""
    if d == 4 and rng.below(2):
        elems = [(0, 0), (0, 1), (1, 0), (1, 1)]
        op = lambda x, y: ((x[0] + y[0]) % 2, (x[1] + y[1]) % 2)
    else:
        elems = list(range(d))
        op = lambda x, y: (x + y) % d
    index = {e: i for i, e in enumerate(elems)}
    while True:
        picks = {lab: rng.choice(elems) for lab in G.labels}
        span = {elems[0]}
        frontier = [elems[0]]
        while frontier:
            nxt = []
            for x in frontier:
                for g in picks.values():
                    y = op(x, g)
                    if y not in span:
                        span.add(y)
                        nxt.append(y)
            frontier = nxt
        if len(span) == d:
            return {lab: tuple(index[op(g, x)] for x in elems) for lab, g in picks.items()}
