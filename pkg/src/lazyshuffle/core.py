"""Networks of lazy transpositions.

Swaps are stored in execution order: ``swaps[0]`` acts first. A network
``[S_1, ..., S_l]`` therefore realises the random permutation
``S_l o ... o S_1``, which is the product ``T_1 T_2 ... T_l`` of the usual
right-to-left notation with ``T_i = S_{l+1-i}``. A token that starts at label
``x`` ends at label ``sigma(x)``; swap ``(a, b, p)`` exchanges whatever
currently sits at ``a`` and ``b`` with probability ``p``.
"""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .numeric import ProbScalar, Surd, is_probability, scalar_from_json, scalar_to_json

CONVENTION = "execution-order"


class NetworkFormatError(ValueError):
    """A serialized network or sequence violates the file schema."""


@dataclass(frozen=True)
class LazySwap:
    """Swap labels ``a`` and ``b`` with probability ``p``."""

    a: int
    b: int
    p: ProbScalar

    def __post_init__(self):
        if not (isinstance(self.a, int) and isinstance(self.b, int)):
            raise TypeError("labels must be integers")
        if self.a == self.b:
            raise ValueError(f"degenerate swap ({self.a}, {self.b})")
        if self.a < 1 or self.b < 1:
            raise ValueError("labels are 1-based")
        p = self.p
        if isinstance(p, int):
            p = Fraction(p)
            object.__setattr__(self, "p", p)
        if not isinstance(p, (Fraction, Surd)):
            raise TypeError(f"probability must be a Fraction or Surd, got {type(p).__name__}")
        if not is_probability(p):
            raise ValueError(f"probability {p} outside [0, 1]")

    @property
    def pair(self) -> frozenset[int]:
        return frozenset((self.a, self.b))


@dataclass(frozen=True)
class Network:
    n: int
    swaps: tuple[LazySwap, ...] = ()

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"ground set size must be a positive integer, got {self.n!r}")
        swaps = tuple(self.swaps)
        object.__setattr__(self, "swaps", swaps)
        for s in swaps:
            if not isinstance(s, LazySwap):
                raise TypeError(f"expected LazySwap, got {type(s).__name__}")
            if s.a > self.n or s.b > self.n:
                raise ValueError(f"swap ({s.a}, {s.b}) exceeds ground set [{self.n}]")

    def __len__(self):
        return len(self.swaps)

    def __iter__(self):
        return iter(self.swaps)

    @property
    def is_rational(self) -> bool:
        return all(isinstance(s.p, Fraction) for s in self.swaps)

    def radicands(self) -> set[Fraction]:
        return {s.p.c for s in self.swaps if isinstance(s.p, Surd)}


@dataclass(frozen=True)
class TranspositionSeq:
    """Probability-free swap sequence, in execution order."""

    n: int
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"ground set size must be a positive integer, got {self.n!r}")
        pairs = []
        for a, b in self.pairs:
            if a == b:
                raise ValueError(f"degenerate transposition ({a}, {b})")
            if not (1 <= a <= self.n and 1 <= b <= self.n):
                raise ValueError(f"transposition ({a}, {b}) exceeds ground set [{self.n}]")
            pairs.append((min(a, b), max(a, b)))
        object.__setattr__(self, "pairs", tuple(pairs))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


# -- transforms ---------------------------------------------------------------


def reverse(net: Network) -> Network:
    """Reverse the execution order; the result has the law of the inverse permutation."""
    return Network(net.n, net.swaps[::-1])


def _as_map(perm, n: int) -> dict[int, int]:
    if isinstance(perm, Mapping):
        mapping = {i: perm.get(i, i) for i in range(1, n + 1)}
    elif isinstance(perm, Sequence):
        if len(perm) != n:
            raise ValueError(f"permutation has length {len(perm)}, expected {n}")
        mapping = {i: perm[i - 1] for i in range(1, n + 1)}
    elif callable(perm):
        mapping = {i: perm(i) for i in range(1, n + 1)}
    else:
        raise TypeError("perm must be a mapping, sequence or callable")
    if sorted(mapping.values()) != list(range(1, n + 1)):
        raise ValueError("relabeling is not a bijection on the ground set")
    return mapping


def relabel(net: Network, perm) -> Network:
    """Replace every label ``a`` by ``perm(a)``.

    ``perm`` is a mapping (missing labels are fixed), a sequence with
    ``perm[i-1]`` the image of ``i``, or a callable.
    """
    m = _as_map(perm, net.n)
    return Network(net.n, tuple(LazySwap(m[s.a], m[s.b], s.p) for s in net.swaps))


def relabel_seq(seq: TranspositionSeq, perm) -> TranspositionSeq:
    m = _as_map(perm, seq.n)
    return TranspositionSeq(seq.n, tuple((m[a], m[b]) for a, b in seq.pairs))


def concat(first: Network, then: Network) -> Network:
    """``first`` acts, then ``then`` acts on its output."""
    if first.n != then.n:
        raise ValueError(f"ground sets differ: {first.n} vs {then.n}")
    return Network(first.n, first.swaps + then.swaps)


def embed(net: Network, m: int) -> Network:
    """Same swaps on the larger ground set ``[m]``; new labels stay fixed."""
    if m < net.n:
        raise ValueError(f"cannot embed a network on [{net.n}] into [{m}]")
    return Network(m, net.swaps)


def shift(net: Network, offset: int, m: int) -> Network:
    """Move ``net`` onto labels ``offset+1 .. offset+net.n`` inside ``[m]``."""
    if offset < 0 or offset + net.n > m:
        raise ValueError("shifted network does not fit")
    return Network(m, tuple(LazySwap(s.a + offset, s.b + offset, s.p) for s in net.swaps))


def to_transpositions(net: Network) -> TranspositionSeq:
    """Forget the probabilities."""
    return TranspositionSeq(net.n, tuple((s.a, s.b) for s in net.swaps))


# -- serialization ------------------------------------------------------------


def network_to_json(net: Network) -> dict:
    return {
        "convention": CONVENTION,
        "n": net.n,
        "swaps": [{"a": s.a, "b": s.b, "p": scalar_to_json(s.p)} for s in net.swaps],
    }


def encode(net: Network) -> bytes:
    return json.dumps(network_to_json(net), indent=1).encode()


def _require_int(obj, key):
    v = obj.get(key) if isinstance(obj, dict) else None
    if not isinstance(v, int) or isinstance(v, bool):
        raise NetworkFormatError(f"field {key!r} must be an integer")
    return v


def network_from_json(doc) -> Network:
    if not isinstance(doc, dict):
        raise NetworkFormatError("document must be a JSON object")
    if doc.get("convention") != CONVENTION:
        raise NetworkFormatError(f"missing or wrong convention field (need {CONVENTION!r})")
    n = _require_int(doc, "n")
    raw = doc.get("swaps")
    if not isinstance(raw, list):
        raise NetworkFormatError("field 'swaps' must be a list")
    try:
        swaps = tuple(
            LazySwap(_require_int(s, "a"), _require_int(s, "b"), scalar_from_json(s.get("p")))
            for s in raw
        )
        return Network(n, swaps)
    except NetworkFormatError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise NetworkFormatError(str(exc)) from exc


def decode(data: bytes | str) -> Network:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"invalid JSON: {exc}") from exc
    return network_from_json(doc)


def encode_seq(seq: TranspositionSeq) -> bytes:
    return json.dumps({"n": seq.n, "swaps": [list(p) for p in seq.pairs]}).encode()


def decode_seq(data: bytes | str) -> TranspositionSeq:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise NetworkFormatError("document must be a JSON object")
    n = _require_int(doc, "n")
    raw = doc.get("swaps")
    if not isinstance(raw, list) or not all(
        isinstance(p, list) and len(p) == 2 and all(isinstance(v, int) for v in p) for p in raw
    ):
        raise NetworkFormatError("field 'swaps' must be a list of [a, b] integer pairs")
    try:
        return TranspositionSeq(n, tuple(tuple(p) for p in raw))
    except ValueError as exc:
        raise NetworkFormatError(str(exc)) from exc
