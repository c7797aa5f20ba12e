"""Closed-form generalized degrees of freedom (GDoF) of the symmetric channel.

``d`` is the per-user GDoF, ``R / log2(1 + snr)``.  The outer-bound lines
are stated for ``2d`` (the total symmetric GDoF); per-user lines are doubled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .bounds import BoundId
from .model import (
    CooperationMode,
    ModeTag,
    SymmetricParams,
    apply_mode,
    cooperation_mode,
)

__all__ = [
    "ExponentParams",
    "GdofPoint",
    "GdofCurve",
    "gdof_bounds",
    "gdof_min",
    "w_curve",
    "v_curve",
    "mode_curve",
    "sweep",
    "figure_grid",
    "FIGURE_BETA",
    "FIGURE_MODES",
    "CSV_COLUMNS",
    "curve_rows",
    "format_csv",
]


@dataclass(frozen=True)
class ExponentParams:
    alpha: float
    alpha_tilde: float = 0.0
    beta_s: float = 0.0
    beta_d: float = 0.0
    gamma: float = 0.0
    delta1: float = 0.0
    delta2: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "alpha_tilde", "beta_s", "beta_d", "gamma", "delta1", "delta2"):
            v = getattr(self, name)
            if not v >= 0:
                raise ValueError(f"{name} must be nonnegative, got {v}")
        if self.delta2 > self.delta1:
            raise ValueError("delta2 must not exceed delta1")

    @classmethod
    def from_mode(cls, mode: CooperationMode, alpha: float,
                  alpha_tilde: float = 0.0) -> "ExponentParams":
        # A switched-off link carries no power; at the GDoF scale that is
        # the same as exponent 0.
        sym, (d1, d2) = apply_mode(mode, SymmetricParams(1.0, alpha=alpha,
                                                         alpha_tilde=alpha_tilde))
        link = {n: (0.0 if n in sym.off else getattr(sym, n))
                for n in ("beta_s", "beta_d", "gamma")}
        return cls(alpha, alpha_tilde, delta1=d1, delta2=d2, **link)


@dataclass(frozen=True)
class GdofPoint:
    alpha: float
    d: float
    provenance: str
    tight: bool = True

    @property
    def two_d(self) -> float:
        return 2.0 * self.d


@dataclass(frozen=True)
class GdofCurve:
    mode: CooperationMode
    beta: float
    points: tuple = field(default_factory=tuple)

    def __post_init__(self):
        a = [p.alpha for p in self.points]
        if any(x >= y for x, y in zip(a, a[1:])):
            raise ValueError("alphas must be strictly increasing")


def _pos(x: float) -> float:
    return x if x > 0 else 0.0


def gdof_bounds(e: ExponentParams):
    """Every outer-bound line in ``2d`` units and the binding minimum.

    Returns ``(lines, (bound, value))`` where ``lines`` is a list of
    ``(BoundId, value)``.  None of the lines depends on ``alpha_tilde``.
    """
    a, bs, bd, g = e.alpha, e.beta_s, e.beta_d, e.gamma
    mimo = 1.0 if a == 1 else 2.0 * max(1.0, a)
    lines = [
        (BoundId.CUT_R1A, 2.0 * max(1.0, a, bd)),
        (BoundId.CUT_R1B, 2.0 * (max(bs + bd, 1.0 + g) + e.delta1)),
        (BoundId.CUT_R1C, 2.0 * (max(bs, 1.0, a) + e.delta2)),
        (BoundId.MIMO_ULTIMATE, mimo),
        (BoundId.THM2A, max(1.0, a, bd) + _pos(max(bs, 1.0) - a) + e.delta2),
    ]
    best = min(lines, key=lambda kv: kv[1])
    return lines, best


def gdof_min(e: ExponentParams) -> float:
    """Minimum of the lines, as ``2d``."""
    return gdof_bounds(e)[1][1]


def w_curve(alpha: float, printed: bool = False) -> float:
    """W-curve.  ``printed=True`` uses an inner ``min{1-a, a}`` in the first
    slot instead of ``max``; that variant gives 0 at ``alpha = 0``."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    first = min(1.0 - alpha, alpha) if printed else max(1.0 - alpha, alpha)
    return min(first, max(1.0 - alpha / 2.0, alpha / 2.0), 1.0)


def v_curve(alpha: float) -> float:
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return max(1.0 - alpha / 2.0, alpha / 2.0)


def _untight(tag: ModeTag, alpha: float, beta: float) -> bool:
    if tag is ModeTag.TWO_WAY_LIKE:
        return True
    if tag is ModeTag.IN_BAND_SOURCE:
        return alpha < 2.0 / 3.0 and beta < alpha / 2.0
    if tag is ModeTag.OUT_OF_BAND_SOURCE:
        return alpha < 2.0 / 3.0 and beta < min(alpha, 2.0 - 3.0 * alpha)
    return False


def mode_curve(mode, alpha: float, beta: float | None = None) -> GdofPoint:
    """Symmetric GDoF of one cooperation mode at ``alpha``.

    ``mode`` is a :class:`CooperationMode` or a mode name (then ``beta`` is
    required).  ``tight`` says whether ``d`` is known to be the exact GDoF.
    """
    if not isinstance(mode, CooperationMode):
        mode = cooperation_mode(mode, 0.0 if beta is None else beta)
    elif beta is not None and beta != mode.beta:
        mode = cooperation_mode(mode.tag, beta)
    beta = mode.beta
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    tag = mode.tag
    if tag is ModeTag.NO_COOP:
        d, prov = w_curve(alpha), "w_curve"
    elif tag is ModeTag.OUTPUT_FEEDBACK:
        d, prov = v_curve(alpha), "v_curve"
    elif tag is ModeTag.RATE_LIMITED_FEEDBACK:
        w, v = w_curve(alpha), v_curve(alpha)
        d, prov = (v, "v_curve") if w + beta >= v else (w + beta, "w_curve+beta")
    elif tag is ModeTag.ULTIMATE:
        d, prov = (0.5 if alpha == 1 else float(max(1.0, alpha))), BoundId.MIMO_ULTIMATE.value
    else:
        bound, two_d = gdof_bounds(ExponentParams.from_mode(mode, alpha))[1]
        d, prov = two_d / 2.0, bound.value
    return GdofPoint(alpha, d, prov, not _untight(tag, alpha, beta))


def sweep(mode, beta: float, alpha_grid) -> GdofCurve:
    if not isinstance(mode, CooperationMode):
        mode = cooperation_mode(mode, beta)
    grid = [float(a) for a in alpha_grid]
    if any(x >= y for x, y in zip(grid, grid[1:])):
        raise ValueError("grid not increasing")
    return GdofCurve(mode, beta, tuple(mode_curve(mode, a) for a in grid))


# ---------------------------------------------------------------- figures

FIGURE_BETA = {2: 0.125, 3: 2.5}
FIGURE_MODES = (
    ModeTag.NO_COOP,
    ModeTag.IN_BAND_SOURCE,
    ModeTag.OUT_OF_BAND_SOURCE,
    ModeTag.OUTPUT_FEEDBACK,
    ModeTag.RATE_LIMITED_FEEDBACK,
    ModeTag.ULTIMATE,
)
CSV_COLUMNS = ("alpha", "mode", "beta", "d", "two_d", "tight")


def figure_grid(start: float = 0.0, stop: float = 3.0, step: float = 0.005) -> list:
    """Inclusive grid ``start, start+step, ..., stop`` with values rounded
    to 12 decimals so grid points such as 1.0 are exact."""
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + i * step, 12) for i in range(n + 1)]


def curve_rows(curve: GdofCurve) -> list:
    return [
        {"alpha": p.alpha, "mode": curve.mode.tag.value, "beta": curve.beta,
         "d": p.d, "two_d": p.two_d, "tight": p.tight}
        for p in curve.points
    ]


def format_csv(rows) -> str:
    out = [",".join(CSV_COLUMNS)]
    for r in rows:
        out.append(
            f"{r['alpha']:.6f},{r['mode']},{r['beta']:.6f},"
            f"{r['d']:.6f},{r['two_d']:.6f},{int(bool(r['tight']))}"
        )
    return "\n".join(out) + "\n"
