"""Builders for every network family.

All networks are returned in execution order (first-acting swap first). Each
builder checks its output length against :mod:`lazyshuffle.bounds` and raises
``AssertionError`` if a construction ever overshoots.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from . import bounds
from .core import LazySwap, Network, TranspositionSeq, concat, embed, relabel, reverse, shift
from .numeric import solve_division_q

HALF = Fraction(1, 2)


def _checked(family: str, n: int, net, k: int = 0):
    entry = bounds.ledger(family, n, len(net), k)
    if not entry.ok:
        raise AssertionError(f"{family}({n}) has length {len(net)}, bound {entry.formula} = {entry.bound}")
    return net


def placement_chain(n: int, x: int) -> Network:
    """Length ``n-1`` chain after which the token starting at ``x`` is uniform on ``[n]``.

    The token walks ``x -> x-1 -> ... -> 1 -> n -> ... -> x+1``; at the i-th
    step it stays put with probability ``1/(n-i+1)``, one over the number of
    labels it can still reach.
    """
    if n < 1 or not 1 <= x <= n:
        raise ValueError(f"need 1 <= x <= n, got n={n}, x={x}")
    order = [x] + [v for v in range(x - 1, 0, -1)] + [v for v in range(n, x, -1)]
    swaps = tuple(
        LazySwap(order[i - 1], order[i], Fraction(n - i, n - i + 1)) for i in range(1, n)
    )
    return _checked("placement", n, Network(n, swaps))


@lru_cache(maxsize=None)
def _ktuple(n: int, k: int) -> Network:
    if k == 1:
        return placement_chain(n, n)
    head = embed(_ktuple(n - 1, k - 1), n)
    return concat(head, placement_chain(n, n))


def k_tuple_shuffle(n: int, k: int) -> Network:
    """(k, n)-shuffle for the tuple of top labels ``(n-k+1, ..., n)``.

    A (k-1)-shuffle of ``[n-1]`` runs first, then ``placement_chain(n, n)``
    spreads whatever sits at ``n``. Length ``kn - k(k+1)/2``; ``k = n`` gives a
    full transposition shuffle of length ``C(n, 2)``.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return _checked("ktuple", n, _ktuple(n, k), k)


@lru_cache(maxsize=None)
def u2_shuffle(n: int) -> Network:
    """Length ``2n-3`` network mapping the pair ``(1, 2)`` uniformly."""
    if n < 2:
        raise ValueError("u2_shuffle needs n >= 2")
    net = relabel(_ktuple(n, 2), lambda i: n + 1 - i)
    return _checked("u2", n, net)


def pair_placement(n: int, a: int, b: int) -> Network:
    """``u2_shuffle(n)`` relabeled so the uniformly placed pair is ``(a, b)``."""
    if a == b or not (1 <= a <= n and 1 <= b <= n):
        raise ValueError(f"need distinct labels in [1, {n}], got ({a}, {b})")
    rest_src = [v for v in range(1, n + 1) if v not in (1, 2)]
    rest_dst = [v for v in range(1, n + 1) if v not in (a, b)]
    mapping = {1: a, 2: b, **dict(zip(rest_src, rest_dst))}
    return relabel(u2_shuffle(n), mapping)


@lru_cache(maxsize=None)
def hypercube_strong1(t: int) -> Network:
    """Strong (1, 2^t)-shuffle of length ``t * 2^(t-1)``, all probabilities 1/2.

    Label ``1 + sum(v_i * 2^(t-i))`` sits on vertex ``v``, so lexicographic
    order of vertices is label order. Phase ``i`` flips coordinate ``i``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    n = 1 << t
    swaps = []
    for i in range(1, t + 1):
        bit = 1 << (t - i)
        for v in range(n):
            if not v & bit:
                swaps.append(LazySwap(v + 1, (v | bit) + 1, HALF))
    return _checked("hypercube", n, Network(n, tuple(swaps)))


def balancing_swaps(n: int, r: int) -> list[LazySwap]:
    """Swaps after which every label holds a token from the first block w.p. ``n/(n+r)``.

    ``weight[i]`` tracks P(the token at ``i`` started in ``[n]``). Pointer ``j``
    scans the first block, ``j2`` the second; each swap fixes the weight at
    one (or both) pointer positions to the target and advances it.
    """
    target = Fraction(n, n + r)
    weight = [None] + [Fraction(1)] * n + [Fraction(0)] * r
    j, j2 = 1, n + 1
    swaps = []
    while not (j == n + 1 and j2 == n + r + 1):
        if j > n or j2 > n + r:
            raise AssertionError("balancing pointers ran off one block early")
        q, q2 = weight[j], weight[j2]
        assert q > target > q2
        if q + q2 > 2 * target:
            p = (target - q2) / (q - q2)
            advance = (0, 1)
        elif q + q2 < 2 * target:
            p = (q - target) / (q - q2)
            advance = (1, 0)
        else:
            p = HALF
            advance = (1, 1)
        weight[j], weight[j2] = (1 - p) * q + p * q2, (1 - p) * q2 + p * q
        swaps.append(LazySwap(j, j2, p))
        j += advance[0]
        j2 += advance[1]
    assert all(w == target for w in weight[1:])
    assert len(swaps) <= n + r - 1
    return swaps


def merge_strong1(net_a: Network, net_b: Network, *, validate: bool = True) -> Network:
    """Strong (1, n+r)-shuffle from strong shuffles of ``[n]`` and ``[r]``.

    ``net_a`` runs on ``[n]``, ``net_b`` on ``[n+1, n+r]``, then at most
    ``n+r-1`` balancing swaps. With ``validate`` the inputs are checked exactly
    when they are rational.
    """
    n, r = net_a.n, net_b.n
    if validate:
        from .verify import check_strong1

        for name, net in (("first", net_a), ("second", net_b)):
            if net.is_rational and not check_strong1(net):
                raise ValueError(f"{name} input is not a strong (1, {net.n})-shuffle")
    m = n + r
    blocks = concat(embed(net_a, m), shift(net_b, n, m))
    return Network(m, blocks.swaps + tuple(balancing_swaps(n, r)))


@lru_cache(maxsize=None)
def strong1(n: int) -> Network:
    """Strong (1, n)-shuffle from hypercube blocks, one per set bit of ``n``.

    Blocks are merged in increasing bit order.
    """
    if n < 1:
        raise ValueError("n must be positive")
    acc = None
    for i in range(n.bit_length()):
        if n >> i & 1:
            block = hypercube_strong1(i)
            acc = block if acc is None else merge_strong1(acc, block, validate=False)
    return _checked("strong1", n, acc)


@lru_cache(maxsize=None)
def reach2(n: int) -> TranspositionSeq:
    """``ceil(3n/2) - 2`` transpositions reaching every ordered pair from ``(1, 2)``.

    Even ``n``: ``(1,2)``, then ``(1, x_k) ... (1, x_1)``, ``(2, y_k) ... (2, y_1)``
    and ``(x_k, y_k) ... (x_1, y_1)`` with ``x_i = 2+i``, ``y_i = n/2+1+i``.
    Odd ``n``: the even sequence on ``[n-1]`` followed by ``(1, n)`` and ``(2, n)``.
    """
    if n < 2:
        raise ValueError("reach2 needs n >= 2")
    if n % 2:
        pairs = reach2(n - 1).pairs + ((1, n), (2, n))
    else:
        k = n // 2 - 1
        xs = [2 + i for i in range(1, k + 1)]
        ys = [n // 2 + 1 + i for i in range(1, k + 1)]
        pairs = [(1, 2)]
        pairs += [(1, x) for x in reversed(xs)]
        pairs += [(2, y) for y in reversed(ys)]
        pairs += [(x, y) for x, y in zip(reversed(xs), reversed(ys))]
        pairs = tuple(pairs)
    seq = TranspositionSeq(n, pairs)
    from .verify import check_reachability

    if not check_reachability(seq):
        raise AssertionError(f"reach2({n}) failed its reachability check")
    return _checked("reach2", n, seq)


@lru_cache(maxsize=None)
def nice_division(n: int) -> Network:
    """Nice division (2, n)-shuffle for even ``n``; the division target is ``[n/2]``.

    ``n = 2``: one fair swap. ``n = 2m`` with ``m`` even: nice division
    shuffles on ``[m]`` and ``[m+1, 2m]``, then ``(i, m+i)`` with probability
    ``q`` on the left quarter and ``1-q`` on the right, then fair swaps
    ``(i, m/2+i)`` inside each half. ``n = m+2``: the inverse of a pair
    placement for ``(m+1, m+2)``, then the shuffle for ``m``, relabeled so the
    target ``[m/2] + {m+1}`` becomes ``[n/2]``.
    """
    if n < 2 or n % 2:
        raise ValueError(f"nice_division requires even n >= 2, got {n}")
    if n == 2:
        return Network(2, (LazySwap(1, 2, HALF),))
    if n % 4 == 0:
        m = n // 2
        inner = nice_division(m)
        q = solve_division_q(m)
        mixing = [LazySwap(i, m + i, q if i <= m // 2 else 1 - q) for i in range(1, m + 1)]
        fair = [LazySwap(i, m // 2 + i, HALF) for i in list(range(1, m // 2 + 1)) + list(range(m + 1, m + m // 2 + 1))]
        swaps = embed(inner, n).swaps + shift(inner, m, n).swaps + tuple(mixing) + tuple(fair)
        net = Network(n, swaps)
    else:
        m = n - 2
        head = reverse(pair_placement(n, m + 1, m + 2))
        net = concat(head, embed(nice_division(m), n))
        net = relabel(net, {m // 2 + 1: m + 1, m + 1: m // 2 + 1})
    return _checked("division", n, net)


@lru_cache(maxsize=None)
def strong2(n: int) -> Network:
    """Strong (2, n)-shuffle.

    Even ``n``: a nice division shuffle, then independent strong (2, n/2)
    shuffles on each half. Odd ``n``: ``strong2(n-1)`` then
    ``placement_chain(n, n)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        net = Network(1)
    elif n % 2:
        net = concat(embed(strong2(n - 1), n), placement_chain(n, n))
    else:
        h = n // 2
        half = strong2(h)
        net = Network(n, nice_division(n).swaps + embed(half, n).swaps + shift(half, h, n).swaps)
    return _checked("strong2", n, net)


BUILDERS = {
    "placement": lambda n, k=None: placement_chain(n, n),
    "ktuple": lambda n, k=None: k_tuple_shuffle(n, k if k is not None else n),
    "u2": lambda n, k=None: u2_shuffle(n),
    "strong1": lambda n, k=None: strong1(n),
    "reach2": lambda n, k=None: reach2(n),
    "division": lambda n, k=None: nice_division(n),
    "strong2": lambda n, k=None: strong2(n),
}


def build(family: str, n: int, k: int | None = None):
    """Dispatch by family name; ``hypercube`` takes ``n`` as a power of two."""
    if family == "hypercube":
        if n < 1 or n & (n - 1):
            raise ValueError(f"hypercube requires n to be a power of two, got {n}")
        return hypercube_strong1(n.bit_length() - 1)
    try:
        builder = BUILDERS[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}") from None
    return builder(n, k)
