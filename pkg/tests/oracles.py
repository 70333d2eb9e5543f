"""Independent reference implementations used only by the tests.

Nothing here shares code with the package's propagation engines: laws are
obtained by enumerating every on/off outcome of the swaps, ranks by plain
Gauss-Jordan elimination over Fractions, cliques by subset enumeration.
"""

from __future__ import annotations

import itertools
import random
from collections import defaultdict
from fractions import Fraction

from lazyshuffle.core import LazySwap, Network, TranspositionSeq


def brute_law(net: Network) -> dict[tuple[int, ...], Fraction]:
    """Law of ``perm`` with ``perm[x-1]`` = final label of the token starting at ``x``."""
    law: dict = defaultdict(Fraction)
    for coins in itertools.product((0, 1), repeat=len(net.swaps)):
        weight = Fraction(1)
        where = list(range(1, net.n + 1))  # where[x-1] = current label of token x
        for s, c in zip(net.swaps, coins):
            weight *= s.p if c else 1 - s.p
            if c:
                where = [s.b if v == s.a else s.a if v == s.b else v for v in where]
        if weight:
            law[tuple(where)] += weight
    return dict(law)


def marginal_from_law(law, n) -> list[list[Fraction]]:
    A = [[Fraction(0)] * n for _ in range(n)]
    for perm, pr in law.items():
        for x in range(n):
            A[x][perm[x] - 1] += pr
    return A


def pair_from_law(law, n, x, y) -> dict[tuple[int, int], Fraction]:
    D = {(i, j): Fraction(0) for i in range(1, n + 1) for j in range(1, n + 1) if i != j}
    for perm, pr in law.items():
        D[(perm[x - 1], perm[y - 1])] += pr
    return D


def inverse(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for x, img in enumerate(perm, 1):
        inv[img - 1] = x
    return tuple(inv)


def gauss_rank(rows) -> int:
    m = [list(map(Fraction, r)) for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / m[rank][c]
                m[r] = [u - f * v for u, v in zip(m[r], m[rank])]
        rank += 1
    return rank


def brute_max_transversal(A) -> Fraction:
    n = len(A)
    best = None
    for perm in itertools.permutations(range(n)):
        prod = Fraction(1)
        for x in range(n):
            prod *= A[x][perm[x]]
        if best is None or prod > best:
            best = prod
    return best


def brute_nice_clique(n: int, edges) -> int:
    outs = {u for u, _ in edges}
    ins = {v for _, v in edges}
    good = [v for v in range(1, n + 1) if v in outs and v in ins]
    for size in range(len(good), 0, -1):
        for sub in itertools.combinations(good, size):
            if all((u, v) in edges or (v, u) in edges for u, v in itertools.combinations(sub, 2)):
                return size
    return 0


def brute_reach_edges(seq: TranspositionSeq) -> set[tuple[int, int]]:
    """Pairs (i, j) such that some subsequence moves (1, 2) to (i, j)."""
    reached = set()
    for coins in itertools.product((0, 1), repeat=len(seq.pairs)):
        pos = [1, 2]
        for (a, b), c in zip(seq.pairs, coins):
            if c:
                pos = [b if v == a else a if v == b else v for v in pos]
        reached.add(tuple(pos))
    return reached


PROBS = [Fraction(0), Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4), Fraction(3, 5)]


def random_network(rng: random.Random, n: int, length: int, probs=PROBS) -> Network:
    swaps = []
    for _ in range(length):
        a, b = rng.sample(range(1, n + 1), 2)
        swaps.append(LazySwap(a, b, rng.choice(probs)))
    return Network(n, tuple(swaps))
