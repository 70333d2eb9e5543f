"""Vectorised binary64 propagation with a rigorous forward error bound.

Every update is ``v' = fl(fl(omp*v) + fl(p*w))`` with non-negative operands,
where ``omp`` and ``p`` are binary64 stand-ins for ``1-p`` and ``p`` carrying a
relative error of at most ``eps``. If every stored value satisfies
``|v - v*| <= delta*v* + zeta`` then after the update

    delta' = (1 + delta)(1 + eps)(1 + u)^2 - 1
    zeta'  = zeta*(1 + eps)(1 + u)^2 + 2*eta

with ``u = 2**-53`` and ``eta = 2**-1075`` (underflow in a product). Untouched
entries keep their old, smaller bound, so one global pair ``(delta, zeta)``
covers the whole array. :func:`enclose` turns it into outward-rounded bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Network
from .numeric import eval_interval

UNIT_ROUNDOFF = 2.0**-53
_ETA = 2.0**-1075 if 2.0**-1075 > 0 else 5e-324


def _float_with_error(x) -> tuple[float, Fraction]:
    iv = eval_interval(x)
    if iv.lo == iv.hi:
        return iv.lo, Fraction(0)
    f = iv.mid
    if f <= 0:
        # only possible for an enclosure touching zero; use the upper end
        f = iv.hi
    err = max(Fraction(iv.hi) - Fraction(f), Fraction(f) - Fraction(iv.lo))
    return f, err / Fraction(f)


@dataclass(frozen=True)
class FloatSwaps:
    a: tuple[int, ...]  # 0-based
    b: tuple[int, ...]
    p: tuple[float, ...]
    omp: tuple[float, ...]
    eps: float  # max relative error of any p / 1-p stand-in

    def __len__(self):
        return len(self.a)


def float_swaps(net: Network) -> FloatSwaps:
    a, b, p, omp = [], [], [], []
    eps = Fraction(0)
    for s in net.swaps:
        pf, pe = _float_with_error(s.p)
        of, oe = _float_with_error(1 - s.p)
        a.append(s.a - 1)
        b.append(s.b - 1)
        p.append(pf)
        omp.append(of)
        eps = max(eps, pe, oe)
    eps_f = float(eps)
    if Fraction(eps_f) < eps:
        eps_f = math.nextafter(eps_f, math.inf)
    return FloatSwaps(tuple(a), tuple(b), tuple(p), tuple(omp), eps_f)


def error_bound(steps: int, eps: float) -> tuple[float, float]:
    """(delta, zeta) after ``steps`` updates, rounded up generously."""
    growth = (1 + eps) * (1 + UNIT_ROUNDOFF) ** 2
    x = steps * math.log1p(growth - 1 + 4 * UNIT_ROUNDOFF)
    delta = math.expm1(x) * (1 + 1e-6) if steps else 0.0
    zeta = (2 * steps + 1) * _ETA * (1 + delta) * 2 if steps else 0.0
    return delta, zeta


def enclose(val: np.ndarray, delta: float, zeta: float) -> tuple[np.ndarray, np.ndarray]:
    """Outward bounds on the exact values behind ``val``; exact where delta is 0."""
    if delta == 0 and zeta == 0:
        return val.copy(), val.copy()
    down, up = -np.inf, np.inf
    lo = np.nextafter(np.nextafter(val - zeta, down) * (1 - delta), down)
    lo = np.nextafter(lo, down)
    hi = np.nextafter(np.nextafter(val + zeta, up) * (1 + 2 * delta), up)
    hi = np.nextafter(hi, up)
    np.maximum(lo, 0.0, out=lo)
    np.minimum(hi, 1.0, out=hi)
    return lo, hi


def sum_error(count: int, delta: float, zeta: float) -> tuple[float, float]:
    """Error bound for a numpy sum of ``count`` non-negative entries."""
    gamma = count * UNIT_ROUNDOFF / (1 - count * UNIT_ROUNDOFF)
    return (1 + delta) * (1 + gamma) - 1 + 4 * UNIT_ROUNDOFF, zeta * count * (1 + gamma)


def marginal(fs: FloatSwaps, n: int) -> np.ndarray:
    """Return ``pos`` with ``pos[j, x] ~ P(token x ends at label j)``."""
    pos = np.eye(n)
    for a, b, p, o in zip(fs.a, fs.b, fs.p, fs.omp):
        ra, rb = pos[a].copy(), pos[b]
        pos[a] = o * ra + p * rb
        pos[b] = o * rb + p * ra
    return pos


def pair_batch(fs: FloatSwaps, n: int, starts: list[tuple[int, int]]) -> np.ndarray:
    """Return ``K`` with ``K[i, j, s] ~ P(start pair s lands on (i, j))``, 0-based."""
    batch = len(starts)
    K = np.zeros((n, n, batch))
    cols = np.arange(batch)
    xs = np.fromiter((x for x, _ in starts), dtype=np.intp, count=batch)
    ys = np.fromiter((y for _, y in starts), dtype=np.intp, count=batch)
    K[xs, ys, cols] = 1.0
    for a, b, p, o in zip(fs.a, fs.b, fs.p, fs.omp):
        ra = K[a].copy()
        rb = K[b].copy()
        ca = K[:, a].copy()
        cb = K[:, b]
        K[:, a] = o * ca + p * cb
        K[:, b] = o * cb + p * ca
        # rows a, b: D'(a, j) = (1-p) D(a, j) + p D(b, tau j)
        rb_t = rb.copy()
        rb_t[[a, b]] = rb[[b, a]]
        ra_t = ra.copy()
        ra_t[[a, b]] = ra[[b, a]]
        K[a] = o * ra + p * rb_t
        K[b] = o * rb + p * ra_t
    return K
