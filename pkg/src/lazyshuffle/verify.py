"""Exact and interval-certified checkers for shuffle networks.

Rational networks, and networks whose surds all share one radicand, are
propagated exactly. Networks mixing radicands are propagated in binary64 with
a rigorous error bound and judged in interval mode: a target passes when it
lies in ``[lo - tol, hi + tol]`` and the enclosure is narrower than
``width_bound``.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import _kernel
from .core import Network, TranspositionSeq
from .numeric import Interval, rational_sqrt

DEFAULT_TOL = 1e-9
WIDTH_BOUND = 1e-12
FULL_DISTRIBUTION_MAX_N = 7

EXACT = "exact"
INTERVAL = "interval"


def _single_field(net: Network) -> bool:
    rads = list(net.radicands())
    return all(rational_sqrt(rads[0] * c) is not None for c in rads[1:])


def resolve_mode(net: Network, mode: str | None = None) -> str:
    exact_ok = _single_field(net)
    if mode is None:
        return EXACT if exact_ok else INTERVAL
    if mode == EXACT and not exact_ok:
        raise ValueError("network mixes radicands; exact propagation is unavailable")
    if mode not in (EXACT, INTERVAL):
        raise ValueError(f"unknown mode {mode!r}")
    return mode


# -- result types ---------------------------------------------------------------


@dataclass(frozen=True)
class MarginalMatrix:
    """``entries[i-1][j-1] = P(i maps to j)``; scalars or Intervals."""

    n: int
    mode: str
    entries: tuple[tuple, ...]

    def entry(self, i: int, j: int):
        return self.entries[i - 1][j - 1]

    def as_float(self) -> np.ndarray:
        return np.array([[_mid(x) for x in row] for row in self.entries])


@dataclass(frozen=True)
class PairDistribution:
    """``entries[(i, j)] = P(x lands on i and y lands on j)`` for ``i != j``."""

    n: int
    start: tuple[int, int]
    mode: str
    entries: dict

    def __getitem__(self, key):
        return self.entries[key]

    def total(self):
        return sum(self.entries.values(), Fraction(0))


@dataclass(frozen=True)
class FullDistribution:
    """Law of the network's permutation; keys are tuples ``(sigma(1), ..., sigma(n))``."""

    n: int
    probs: dict

    def __getitem__(self, perm):
        return self.probs.get(tuple(perm), Fraction(0))

    def support(self) -> int:
        return len(self.probs)


@dataclass
class Verdict:
    check: str
    passed: bool
    mode: str
    tolerance: float | None = None
    max_interval_width: float | None = None
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, default=str)


def _mid(x) -> float:
    return x.mid if isinstance(x, Interval) else float(x)


def _show(x) -> str:
    if isinstance(x, Interval):
        return f"[{x.lo!r}, {x.hi!r}]"
    return str(x)


# -- exact propagation ------------------------------------------------------------


def _exact_positions(net: Network) -> list[list]:
    n = net.n
    zero, one = Fraction(0), Fraction(1)
    pos = [[one if x == j else zero for x in range(n)] for j in range(n)]
    for s in net.swaps:
        a, b, p = s.a - 1, s.b - 1, s.p
        o = 1 - p
        ra, rb = pos[a], pos[b]
        pos[a] = [o * u + p * v if u or v else zero for u, v in zip(ra, rb)]
        pos[b] = [o * v + p * u if u or v else zero for u, v in zip(ra, rb)]
    return pos


def _exact_pair(net: Network, x: int, y: int) -> dict:
    # keys are 1-based (i, j); only non-zero states are stored
    dist = {(x, y): Fraction(1)}
    for s in net.swaps:
        a, b, p = s.a, s.b, s.p
        o = 1 - p
        tau = {a: b, b: a}
        touched = [k for k in dist if k[0] in tau or k[1] in tau]
        if not touched:
            continue
        old = {k: dist.pop(k) for k in touched}
        for (i, j), m in old.items():
            img = (tau.get(i, i), tau.get(j, j))
            dist[(i, j)] = dist.get((i, j), 0) + o * m
            dist[img] = dist.get(img, 0) + p * m
    return {k: v for k, v in dist.items() if v != 0}


# -- interval propagation -----------------------------------------------------------


def _interval_positions(net: Network):
    fs = _kernel.float_swaps(net)
    val = _kernel.marginal(fs, net.n)
    delta, zeta = _kernel.error_bound(len(fs), fs.eps)
    lo, hi = _kernel.enclose(val, delta, zeta)
    return lo, hi


def _pair_intervals(net: Network, starts: list[tuple[int, int]], fs=None):
    """Enclosures ``lo, hi`` of shape (n, n, len(starts)); starts are 1-based."""
    if fs is None:
        fs = _kernel.float_swaps(net)
    K = _kernel.pair_batch(fs, net.n, [(x - 1, y - 1) for x, y in starts])
    delta, zeta = _kernel.error_bound(len(fs), fs.eps)
    return K, delta, zeta


# -- public propagation API -----------------------------------------------------------


def single_marginal(net: Network, mode: str | None = None) -> MarginalMatrix:
    mode = resolve_mode(net, mode)
    n = net.n
    if mode == EXACT:
        pos = _exact_positions(net)
        rows = tuple(tuple(pos[j][i] for j in range(n)) for i in range(n))
    else:
        lo, hi = _interval_positions(net)
        rows = tuple(tuple(Interval(lo[j, i], hi[j, i]) for j in range(n)) for i in range(n))
    return MarginalMatrix(n, mode, rows)


def pair_marginal(net: Network, x: int, y: int, mode: str | None = None) -> PairDistribution:
    if x == y:
        raise ValueError("start pair must be two distinct labels")
    mode = resolve_mode(net, mode)
    n = net.n
    if mode == EXACT:
        dist = _exact_pair(net, x, y)
        entries = {(i, j): dist.get((i, j), Fraction(0)) for i in range(1, n + 1) for j in range(1, n + 1) if i != j}
    else:
        K, delta, zeta = _pair_intervals(net, [(x, y)])
        lo, hi = _kernel.enclose(K[:, :, 0], delta, zeta)
        entries = {
            (i + 1, j + 1): Interval(lo[i, j], hi[i, j]) for i in range(n) for j in range(n) if i != j
        }
    return PairDistribution(n, (x, y), mode, entries)


def full_distribution(net: Network) -> FullDistribution:
    """Exact law over all ``n!`` permutations (mixed radicands demote to Intervals)."""
    n = net.n
    if n > FULL_DISTRIBUTION_MAX_N:
        raise ValueError(f"full distribution limited to n <= {FULL_DISTRIBUTION_MAX_N}")
    probs = {tuple(range(1, n + 1)): Fraction(1)}
    for s in net.swaps:
        a, b, p = s.a, s.b, s.p
        o = 1 - p
        nxt: dict = defaultdict(lambda: Fraction(0))
        for perm, pr in probs.items():
            if o != 0:
                nxt[perm] = nxt[perm] + o * pr
            if p != 0:
                img = tuple(b if v == a else a if v == b else v for v in perm)
                nxt[img] = nxt[img] + p * pr
        probs = dict(nxt)
    return FullDistribution(n, probs)


# -- checks -------------------------------------------------------------------------


def _witness(entry, expected, got, pair=None) -> dict:
    return {"pair": list(pair) if pair else None, "entry": list(entry), "expected": str(expected), "got": _show(got)}


def _worst(offenders: list, target):
    """The offending ``(i, j, value)`` farthest from the target, or None."""
    return max(offenders, key=lambda o: abs(o[2] - target), default=None)


def check_strong1(net: Network, tol: float = DEFAULT_TOL, mode: str | None = None) -> Verdict:
    """Every single-element marginal equals ``1/n``."""
    mode = resolve_mode(net, mode)
    n = net.n
    target = Fraction(1, n)
    if mode == EXACT:
        pos = _exact_positions(net)
        bad = [(i + 1, j + 1, pos[j][i]) for i in range(n) for j in range(n) if pos[j][i] != target]
        worst = _worst(bad, target)
        if worst:
            i, j, got = worst
            return Verdict("strong1", False, mode, witness=_witness((i, j), target, got))
        return Verdict("strong1", True, mode)
    lo, hi = _interval_positions(net)
    return _interval_verdict("strong1", lo.T, hi.T, float(target), tol, entry_offset=1)


def _interval_verdict(check, lo, hi, target, tol, *, mask=None, entry_offset=1, pair=None) -> Verdict:
    width = hi - lo
    if mask is not None:
        width = np.where(mask, width, 0.0)
    max_width = float(width.max()) if width.size else 0.0
    bad = (lo - tol > target) | (hi + tol < target) | (width >= WIDTH_BOUND)
    if mask is not None:
        bad &= mask
    verdict = Verdict(check, True, INTERVAL, tolerance=tol, max_interval_width=max_width)
    if bad.any():
        # report the enclosure farthest from the target
        gap = np.where(bad, np.maximum(lo - target, target - hi) + (width >= WIDTH_BOUND), -np.inf)
        idx = tuple(int(v) for v in np.unravel_index(np.argmax(gap), gap.shape))
        got = Interval(lo[idx], hi[idx])
        verdict.passed = False
        verdict.witness = _witness(tuple(v + entry_offset for v in idx), target, got, pair)
    return verdict


def check_pair_uniform(net: Network, x: int, y: int, tol: float = DEFAULT_TOL, mode: str | None = None) -> Verdict:
    """The image of ``(x, y)`` is uniform over ordered pairs."""
    mode = resolve_mode(net, mode)
    n = net.n
    if n < 2:
        raise ValueError("pair uniformity needs n >= 2")
    target = Fraction(1, n * (n - 1))
    if mode == EXACT:
        dist = _exact_pair(net, x, y)
        bad = [(i, j, dist.get((i, j), 0)) for i, j in ordered_pairs(n) if dist.get((i, j), 0) != target]
        worst = _worst(bad, target)
        if worst:
            i, j, got = worst
            return Verdict("pair_uniform", False, mode, witness=_witness((i, j), target, got, (x, y)))
        return Verdict("pair_uniform", True, mode, details={"pair": [x, y]})
    K, delta, zeta = _pair_intervals(net, [(x, y)])
    lo, hi = _kernel.enclose(K[:, :, 0], delta, zeta)
    mask = ~np.eye(n, dtype=bool)
    v = _interval_verdict("pair_uniform", lo, hi, float(target), tol, mask=mask, pair=(x, y))
    v.details["pair"] = [x, y]
    return v


def ordered_pairs(n: int) -> list[tuple[int, int]]:
    return [(x, y) for x in range(1, n + 1) for y in range(1, n + 1) if x != y]


def _batches(items: list, size: int) -> list[list]:
    return [items[i : i + size] for i in range(0, len(items), size)]


def _default_batch(n: int) -> int:
    # keep each (n, n, batch) block near 16 MB
    return max(1, (1 << 21) // (n * n))


def check_strong2(
    net: Network, tol: float = DEFAULT_TOL, mode: str | None = None, jobs: int = 1, batch_size: int | None = None
) -> Verdict:
    """Every ordered start pair maps uniformly onto ordered pairs."""
    mode = resolve_mode(net, mode)
    n = net.n
    starts = ordered_pairs(n)
    if not starts:
        return Verdict("strong2", True, mode, details={"start_pairs": 0})
    if mode == EXACT:
        target = Fraction(1, n * (n - 1))
        for x, y in starts:
            dist = _exact_pair(net, x, y)
            for i, j in starts:
                got = dist.get((i, j), 0)
                if got != target:
                    return Verdict("strong2", False, mode, witness=_witness((i, j), target, got, (x, y)))
        return Verdict("strong2", True, mode, details={"start_pairs": len(starts)})

    fs = _kernel.float_swaps(net)
    target = 1.0 / (n * (n - 1))
    mask = ~np.eye(n, dtype=bool)[:, :, None]

    def run(batch):
        K, delta, zeta = _pair_intervals(net, batch, fs)
        lo, hi = _kernel.enclose(K, delta, zeta)
        width = np.where(mask, hi - lo, 0.0)
        bad = ((lo - tol > target) | (hi + tol < target) | (width >= WIDTH_BOUND)) & mask
        witness = None
        if bad.any():
            i, j, s = (int(v) for v in np.argwhere(bad)[0])
            witness = _witness((i + 1, j + 1), Fraction(1, n * (n - 1)), Interval(lo[i, j, s], hi[i, j, s]), batch[s])
        return float(width.max()), witness

    batches = _batches(starts, batch_size or _default_batch(n))
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(run, batches))
    else:
        results = [run(b) for b in batches]
    max_width = max(w for w, _ in results)
    witness = next((w for _, w in results if w is not None), None)
    return Verdict(
        "strong2",
        witness is None,
        INTERVAL,
        tolerance=tol,
        max_interval_width=max_width,
        witness=witness,
        details={"start_pairs": len(starts), "note": "mixed radicands certified up to tolerance"},
    )


def division_targets(n: int) -> tuple[Fraction, Fraction]:
    """(same-side, cross) probability for one orientation: 1/4 -+ 1/(4(n-1))."""
    eps = Fraction(1, 4 * (n - 1))
    return Fraction(1, 4) - eps, Fraction(1, 4) + eps


def check_division(net: Network, tol: float = DEFAULT_TOL, mode: str | None = None) -> Verdict:
    """Every ordered pair splits across ``[n/2]`` and its complement like a random pair.

    The verdict covers the three quantities in-in, out-in and out-out. The
    remaining orientation in-out is reported in ``details`` only.
    """
    n = net.n
    if n % 2:
        raise ValueError("division check requires even n")
    mode = resolve_mode(net, mode)
    h = n // 2
    same, cross = division_targets(n)
    names = ("in_in", "out_in", "out_out", "in_out")
    targets = (same, cross, same, cross)
    starts = ordered_pairs(n)
    orientation_ok = True

    if mode == EXACT:
        for x, y in starts:
            dist = _exact_pair(net, x, y)
            agg = [Fraction(0)] * 4
            for (i, j), m in dist.items():
                key = (i > h, j > h)
                agg[{(False, False): 0, (True, False): 1, (True, True): 2, (False, True): 3}[key]] += m
            for k in range(3):
                if agg[k] != targets[k]:
                    return Verdict(
                        "division", False, mode, witness=_witness((names[k],), targets[k], agg[k], (x, y))
                    )
            orientation_ok &= agg[3] == targets[3]
        return Verdict("division", True, mode, details={"in_out_orientation": orientation_ok})

    fs = _kernel.float_swaps(net)
    max_width = 0.0
    for batch in _batches(starts, _default_batch(n)):
        K, delta, zeta = _pair_intervals(net, batch, fs)
        d_sum, z_sum = _kernel.sum_error(h * h, delta, zeta)
        quads = (K[:h, :h], K[h:, :h], K[h:, h:], K[:h, h:])
        for k, block in enumerate(quads):
            s = block.sum(axis=(0, 1))
            lo, hi = _kernel.enclose(s, d_sum, z_sum)
            width = hi - lo
            t = float(targets[k])
            bad = (lo - tol > t) | (hi + tol < t) | (width >= WIDTH_BOUND)
            if k == 3:
                orientation_ok &= not bad.any()
                continue
            max_width = max(max_width, float(width.max()))
            if bad.any():
                si = int(np.argmax(bad))
                return Verdict(
                    "division",
                    False,
                    INTERVAL,
                    tolerance=tol,
                    max_interval_width=max_width,
                    witness=_witness((names[k],), targets[k], Interval(lo[si], hi[si]), batch[si]),
                )
    return Verdict(
        "division",
        True,
        INTERVAL,
        tolerance=tol,
        max_interval_width=max_width,
        details={"in_out_orientation": orientation_ok, "note": "mixed radicands certified up to tolerance"},
    )


def check_full_uniform(net: Network, tol: float = DEFAULT_TOL) -> Verdict:
    """The permutation is uniform on all ``n!`` elements."""
    dist = full_distribution(net)
    n = net.n
    target = Fraction(1, math.factorial(n))
    mode = EXACT
    max_width = None
    for perm in itertools.permutations(range(1, n + 1)):
        got = dist[perm]
        if isinstance(got, Interval):
            mode = INTERVAL
            max_width = max(max_width or 0.0, got.width)
            ok = got.lo - tol <= float(target) <= got.hi + tol and got.width < WIDTH_BOUND
        else:
            ok = got == target
        if not ok:
            return Verdict("full", False, mode, witness=_witness(perm, target, got))
    return Verdict("full", True, mode, tolerance=tol if mode == INTERVAL else None, max_interval_width=max_width)


# -- reachability ----------------------------------------------------------------------


@dataclass(frozen=True)
class ReachDigraph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if any(i == j for i, j in self.edges):
            raise ValueError("reachability digraph must be loopless")

    def is_complete(self) -> bool:
        return len(self.edges) == self.n * (self.n - 1)


def reach_step(edges: frozenset, a: int, b: int) -> frozenset:
    """Edge set after one more transposition ``(a, b)``."""
    new = set(edges)
    for u, v in edges:
        if u == b and v != a:
            new.add((a, v))
        if v == b and u != a:
            new.add((u, a))
        if u == a and v != b:
            new.add((b, v))
        if v == a and u != b:
            new.add((u, b))
    if (a, b) in edges or (b, a) in edges:
        new.add((a, b))
        new.add((b, a))
    return frozenset(new)


def reach_prefixes(seq: TranspositionSeq) -> Iterator[ReachDigraph]:
    """Yield ``G_0, G_1, ..., G_l``."""
    if seq.n < 2:
        raise ValueError("reachability needs n >= 2")
    edges = frozenset({(1, 2)})
    yield ReachDigraph(seq.n, edges)
    for a, b in seq.pairs:
        edges = reach_step(edges, a, b)
        yield ReachDigraph(seq.n, edges)


def reach_digraph(seq: TranspositionSeq) -> ReachDigraph:
    g = None
    for g in reach_prefixes(seq):
        pass
    return g


def check_reachability(seq: TranspositionSeq) -> Verdict:
    g = reach_digraph(seq)
    if g.is_complete():
        return Verdict("reach", True, EXACT, details={"edges": len(g.edges)})
    missing = next((i, j) for i in range(1, g.n + 1) for j in range(1, g.n + 1) if i != j and (i, j) not in g.edges)
    return Verdict(
        "reach",
        False,
        EXACT,
        witness={"pair": [1, 2], "entry": list(missing), "expected": "reachable", "got": "unreachable"},
        details={"edges": len(g.edges)},
    )
