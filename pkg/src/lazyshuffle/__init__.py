"""Lazy-transposition shuffle networks: constructions, verifiers and certificates."""

from .numeric import Interval, Surd, eval_interval, rat, solve_division_q, surd
from .core import LazySwap, Network, TranspositionSeq, concat, embed, relabel, reverse
from .constructions import build, hypercube_strong1, k_tuple_shuffle, nice_division, reach2, strong1, strong2, u2_shuffle
from .verify import check_division, check_pair_uniform, check_reachability, check_strong1, check_strong2
from .certificates import clique_certificate, rank_certificate, transversal_certificate
from .search import certify_minimality, exhaust_reach2

__all__ = [
    "build",
    "certify_minimality",
    "check_division",
    "check_pair_uniform",
    "check_reachability",
    "check_strong1",
    "check_strong2",
    "clique_certificate",
    "concat",
    "embed",
    "eval_interval",
    "exhaust_reach2",
    "hypercube_strong1",
    "Interval",
    "k_tuple_shuffle",
    "LazySwap",
    "Network",
    "nice_division",
    "rank_certificate",
    "rat",
    "reach2",
    "relabel",
    "reverse",
    "solve_division_q",
    "strong1",
    "strong2",
    "surd",
    "Surd",
    "TranspositionSeq",
    "transversal_certificate",
    "u2_shuffle",
]

__version__ = "0.1.0"
