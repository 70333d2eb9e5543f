"""Exhaustive search for short transposition sequences that reach every ordered pair.

States are reachability digraphs stored as out-neighbourhood bitmasks, one
int per vertex (0-based, so the start edge is ``(0, 1)``). The search is a
depth-first enumeration with three reductions, all of which preserve the
verdict:

* memoisation of ``canonical state -> largest remaining depth known to fail``;
  failing with ``d`` moves left implies failing with fewer, since edge sets
  only grow;
* canonical forms taken over relabelings of ``[n] \\ {1, 2}``;
* moves that leave the state unchanged are skipped (any success through one
  is matched by a success that drops it and pads the end), and a state whose
  uncovered vertices outnumber the remaining moves is abandoned, because one
  transposition covers at most one new vertex.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .core import TranspositionSeq
from .verify import check_reachability, reach_step

log = logging.getLogger(__name__)

MAX_N = 7
MAX_LENGTH = 9

FOUND = "found"
NONE_EXISTS = "no-sequence"
INCONCLUSIVE = "inconclusive"
MINIMAL = "minimal"
COUNTEREXAMPLE = "counterexample"


def target_length(n: int) -> int:
    return -(-3 * n // 2) - 2


@dataclass
class SearchReport:
    n: int
    length: int  # length searched
    target_length: int
    verdict: str
    nodes: int = 0
    elapsed: float = 0.0
    witness: list[list[int]] | None = None
    details: dict = field(default_factory=dict)

    @property
    def succeeds(self) -> bool:
        return self.verdict == FOUND

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


class _Exhausted(Exception):
    pass


def _step(rows: tuple[int, ...], a: int, b: int) -> tuple[int, ...]:
    """Bitmask form of the reachability update for transposition ``(a, b)``."""
    ba, bb = 1 << a, 1 << b
    out = list(rows)
    out[a] |= rows[b] & ~ba
    out[b] |= rows[a] & ~bb
    for u, r in enumerate(rows):
        if r & bb and u != a:
            out[u] |= ba
        if r & ba and u != b:
            out[u] |= bb
    if rows[a] & bb or rows[b] & ba:
        out[a] |= bb
        out[b] |= ba
    return tuple(out)


class _Searcher:
    def __init__(self, n: int, max_nodes: int | None = None, prune: bool = True):
        self.n = n
        self.max_nodes = max_nodes
        self.prune = prune
        self.nodes = 0
        self.memo: dict[tuple[int, ...], int] = {}
        self.moves = list(itertools.combinations(range(n), 2))
        self.full = tuple(((1 << n) - 1) & ~(1 << u) for u in range(n))
        self._perms = self._relabel_tables()

    def _relabel_tables(self):
        n = self.n
        tables = []
        for rest in itertools.permutations(range(2, n)):
            perm = (0, 1) + rest
            table = [0] * (1 << n)
            for mask in range(1 << n):
                img = 0
                for v in range(n):
                    if mask >> v & 1:
                        img |= 1 << perm[v]
                table[mask] = img
            tables.append((perm, table))
        return tables

    def canonical(self, rows: tuple[int, ...]) -> tuple[int, ...]:
        best = None
        for perm, table in self._perms:
            img = [0] * self.n
            for u, r in enumerate(rows):
                img[perm[u]] = table[r]
            key = tuple(img)
            if best is None or key < best:
                best = key
        return best

    def uncovered(self, rows) -> int:
        covered = 0
        for u, r in enumerate(rows):
            if r:
                covered |= r | 1 << u
        return self.n - bin(covered).count("1")

    def solve(self, rows: tuple[int, ...], remaining: int) -> list[tuple[int, int]] | None:
        """A sequence of at most ``remaining`` moves completing ``rows``, or None."""
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise _Exhausted
        if rows == self.full:
            return []
        if remaining == 0:
            return None
        if self.prune and self.uncovered(rows) > remaining:
            return None
        key = self.canonical(rows)
        if self.memo.get(key, -1) >= remaining:
            return None
        for a, b in self.moves:
            nxt = _step(rows, a, b)
            if nxt == rows:
                continue
            rest = self.solve(nxt, remaining - 1)
            if rest is not None:
                return [(a, b)] + rest
        self.memo[key] = remaining
        return None


def _start(n: int) -> tuple[int, ...]:
    rows = [0] * n
    rows[0] = 1 << 1
    return tuple(rows)


def _pad(moves: list[tuple[int, int]], length: int) -> list[list[int]]:
    # successful sequences stay successful when extended
    seq = [[a + 1, b + 1] for a, b in moves]
    return seq + [[1, 2]] * (length - len(seq))


def _branch(args):
    n, rows, remaining, max_nodes, prune = args
    s = _Searcher(n, max_nodes, prune)
    try:
        return s.solve(rows, remaining), s.nodes, False
    except _Exhausted:
        return None, s.nodes, True


def exhaust_reach2(
    n: int, length: int, *, max_nodes: int | None = None, jobs: int = 1, prune: bool = True
) -> SearchReport:
    """Decide whether some sequence of ``length`` transpositions reaches every ordered pair.

    ``max_nodes`` caps the visited states (per worker when ``jobs > 1``);
    hitting it yields an ``inconclusive`` report.
    """
    if not 2 <= n <= MAX_N:
        raise ValueError(f"exhaustive search supports 2 <= n <= {MAX_N}, got {n}")
    if not 0 <= length <= MAX_LENGTH:
        raise ValueError(f"exhaustive search supports lengths 0..{MAX_LENGTH}, got {length}")
    t0 = time.perf_counter()
    report = SearchReport(n, length, target_length(n), INCONCLUSIVE)
    root = _start(n)
    if jobs <= 1 or length == 0:
        s = _Searcher(n, max_nodes, prune)
        try:
            moves = s.solve(root, length)
            report.verdict = FOUND if moves is not None else NONE_EXISTS
            if moves is not None:
                report.witness = _pad(moves, length)
        except _Exhausted:
            moves = None
        report.nodes = s.nodes
        report.details["memo_size"] = len(s.memo)
    else:
        # first moves up to symmetry, one worker task each
        s = _Searcher(n, None, prune)
        children = {}
        for a, b in s.moves:
            nxt = _step(root, a, b)
            if nxt != root:
                children.setdefault(s.canonical(nxt), ((a, b), nxt))
        tasks = [(n, rows, length - 1, max_nodes, prune) for _, rows in children.values()]
        firsts = [m for m, _ in children.values()]
        verdict = NONE_EXISTS
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for first, (moves, nodes, exhausted) in zip(firsts, pool.map(_branch, tasks)):
                report.nodes += nodes
                if moves is not None and verdict != FOUND:
                    verdict = FOUND
                    report.witness = _pad([first] + moves, length)
                elif exhausted and verdict == NONE_EXISTS:
                    verdict = INCONCLUSIVE
        report.verdict = verdict
        report.details["branches"] = len(tasks)
    if report.witness is not None:
        # independent confirmation with the set-based update rule
        assert check_reachability(TranspositionSeq(n, tuple(map(tuple, report.witness))))
    report.elapsed = time.perf_counter() - t0
    log.info("n=%d length=%d: %s after %d nodes", n, length, report.verdict, report.nodes)
    return report


def plain_enumeration(n: int, length: int) -> bool:
    """Oracle: try every sequence of ``length`` transpositions, no reductions at all."""
    moves = list(itertools.combinations(range(1, n + 1), 2))
    for seq in itertools.product(moves, repeat=length):
        edges = frozenset({(1, 2)})
        for a, b in seq:
            edges = reach_step(edges, a, b)
        if len(edges) == n * (n - 1):
            return True
    return False


def certify_minimality(n: int, *, max_nodes: int | None = None, jobs: int = 1) -> SearchReport:
    """Construction at ``ceil(3n/2) - 2`` plus exhaustion one step below it."""
    from .constructions import reach2

    L = target_length(n)
    seq = reach2(n)
    built = len(seq) == L and bool(check_reachability(seq))
    below = exhaust_reach2(n, L - 1, max_nodes=max_nodes, jobs=jobs)
    if below.verdict == FOUND:
        verdict = COUNTEREXAMPLE
    elif below.verdict == INCONCLUSIVE or not built:
        verdict = INCONCLUSIVE
    else:
        verdict = MINIMAL
    return SearchReport(
        n,
        L - 1,
        L,
        verdict,
        below.nodes,
        below.elapsed,
        below.witness,
        {"construction_length": len(seq), "construction_passes": built, "exhaustion": below.verdict},
    )
