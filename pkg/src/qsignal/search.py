"""Grid search with golden-section refinement for smooth periodic objectives."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``.

    The endpoints are compared against the interior optimum so a maximum
    sitting on the boundary of the bracket is not lost.
    """
    lo, hi = min(a, b), max(a, b)
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = f(d)
    best = max(((c, fc), (d, fd), (a, f(a)), (b, f(b))), key=lambda t: t[1])
    return best


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def __str__(self):
        if self.is_point:
            return "{" + fmt_angle(self.lo) + "}"
        return f"[{fmt_angle(self.lo)}, {fmt_angle(self.hi)}]"


def fmt_angle(x: float, digits: int = 6) -> str:
    """Render multiples of pi/12 symbolically, anything else in decimal."""
    k = x / (math.pi / 12.0)
    if abs(k - round(k)) < 1e-9:
        num, den = _reduce(int(round(k)), 12)
        if num == 0:
            return "0"
        head = "pi" if num == 1 else ("-pi" if num == -1 else f"{num}pi")
        return head if den == 1 else f"{head}/{den}"
    return f"{x:.{digits}g}"


def _reduce(num: int, den: int) -> tuple[int, int]:
    g = math.gcd(num, den) or 1
    return num // g, den // g


def runs_to_intervals(grid: np.ndarray, mask: np.ndarray) -> list[Interval]:
    """Merge consecutive ``True`` grid points into closed intervals."""
    out = []
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return out
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate(([idx[0]], idx[breaks + 1]))
    ends = np.concatenate((idx[breaks], [idx[-1]]))
    for s, e in zip(starts, ends):
        out.append(Interval(float(grid[s]), float(grid[e])))
    return out


def snap_points(intervals: Sequence[Interval], refined: float, step: float) -> list[Interval]:
    """Place the refined optimum into the interval list.

    A one-point run within a grid step of ``refined`` is replaced by it; if
    no run covers ``refined`` it is added as its own point.
    """
    out = []
    placed = False
    for iv in intervals:
        if iv.is_point and abs(iv.lo - refined) <= step:
            out.append(Interval(refined, refined))
            placed = True
        else:
            out.append(iv)
            placed = placed or (iv.lo - step <= refined <= iv.hi + step)
    if not placed:
        out.append(Interval(refined, refined))
    return sorted(out, key=lambda iv: iv.lo)
