"""Maximization of the outer bounds over Gaussian input covariances.

The input covariance is parameterized as ``Q = D R R^H D`` with
``D = diag(sqrt(P))`` and ``R`` lower triangular with unit-norm rows, so
every candidate meets the per-node power constraint with equality.  The
entries of ``R`` (real diagonal, complex off-diagonal) are searched by
coordinate moves with a shrinking step, from several starts.

When the noise covariance has entries the capacity region does not depend
on, each such entry is swept over a grid and the smallest maximized value
is kept: every choice yields a valid outer bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bounds import (
    CUTSET_BOUNDS,
    R1_BOUNDS,
    R2_BOUNDS,
    THM2_BOUNDS,
    BoundId,
    Budgets,
    InputCovariance,
    bound_program,
    default_budgets,
    symmetric_budgets,
)
from .gaussinfo import DegenerateDistributionError, eval_program, joint_factor, psd_factor
from .model import (
    ChannelParams,
    CooperationMode,
    SymmetricParams,
    apply_mode,
    build_symmetric,
)

__all__ = [
    "OptimizerConfig",
    "BoundReport",
    "SumRateResult",
    "maximize",
    "mimo_ultimate",
    "mimo_value",
    "sum_rate_upper",
    "mode_problem",
    "noise_candidates",
]

NOISE_GRID_LIMIT = 0.99


@dataclass(frozen=True)
class OptimizerConfig:
    """Search settings.

    ``input_groups`` partitions the nodes (0-based) into groups whose
    inputs may be correlated; inputs in different groups are independent.
    ``None`` allows full correlation.  ``free_noise`` lists 0-based noise
    covariance entries swept over ``noise_grid`` points in [-0.99, 0.99].
    """

    restarts: int = 32
    max_iters: int = 2000
    tol: float = 1e-6
    seed: int = 0
    input_groups: tuple | None = None
    free_noise: tuple = ()
    noise_grid: int = 11
    initial_step: float = 0.5

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.input_groups is not None:
            object.__setattr__(
                self, "input_groups", tuple(tuple(int(i) for i in g) for g in self.input_groups)
            )
        object.__setattr__(
            self, "free_noise", tuple((int(a), int(b)) for a, b in self.free_noise)
        )

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizerConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown optimizer config keys: {sorted(unknown)}")
        return cls(**d)

    def as_dict(self) -> dict:
        return {
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "tol": self.tol,
            "seed": self.seed,
            "input_groups": None if self.input_groups is None else [list(g) for g in self.input_groups],
            "free_noise": [list(p) for p in self.free_noise],
            "noise_grid": self.noise_grid,
        }


@dataclass
class BoundReport:
    id: str
    inband_bits: float
    oob_budget_bits: float
    Q_star: InputCovariance
    SigmaZ_star: np.ndarray
    optimizer_trace: dict = field(default_factory=dict)

    @property
    def total_bits(self) -> float:
        return self.inband_bits + self.oob_budget_bits

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "inband_bits": self.inband_bits,
            "oob_budget_bits": self.oob_budget_bits,
            "total_bits": self.total_bits,
            "Q_star": _complex_to_json(self.Q_star.Q),
            "SigmaZ_star": _complex_to_json(self.SigmaZ_star),
            "optimizer_trace": self.optimizer_trace,
        }


def _complex_to_json(A):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(A)]


# ---------------------------------------------------------------- parameterization

class _Factor:
    """Map between a real parameter vector and a unit-row factor ``R``."""

    def __init__(self, n, groups):
        if groups is None:
            groups = [tuple(range(n))]
        group_of = {}
        for gi, grp in enumerate(groups):
            for i in grp:
                if i in group_of:
                    raise ValueError(f"node {i} appears in two input groups")
                group_of[i] = gi
        for i in range(n):
            group_of.setdefault(i, ("solo", i))
        self.n = n
        self.off = [(i, j) for i in range(n) for j in range(i) if group_of[i] == group_of[j]]
        self.size = n + 2 * len(self.off)
        self._diag = np.arange(n)
        if self.off:
            self._rows, self._cols = (np.array(v) for v in zip(*self.off))

    def start(self, rng=None) -> np.ndarray:
        theta = np.zeros(self.size)
        theta[: self.n] = 1.0
        if rng is not None:
            theta[: self.n] = rng.uniform(0.2, 1.5, self.n)
            theta[self.n:] = rng.normal(scale=0.8, size=self.size - self.n)
        return theta

    def factor(self, theta) -> np.ndarray:
        n = self.n
        R = np.zeros((n, n), dtype=complex)
        R[self._diag, self._diag] = theta[:n]
        if self.off:
            R[self._rows, self._cols] = theta[n::2] + 1j * theta[n + 1::2]
        norms = np.sqrt((R.real ** 2 + R.imag ** 2).sum(axis=1))
        if not norms.all():
            zero = norms == 0
            R[zero, np.flatnonzero(zero)] = 1.0
            norms[zero] = 1.0
        return R / norms[:, None]

    def input_factor(self, theta, sqrtP) -> np.ndarray:
        return self.factor(theta) * sqrtP[:, None]

    def covariance(self, theta, sqrtP) -> np.ndarray:
        F = self.input_factor(theta, sqrtP)
        return F @ F.conj().T


MAX_STEP = 1e4


def _coordinate_search(objective, par: _Factor, theta0, cfg: OptimizerConfig):
    """Coordinate ascent with per-coordinate steps: a successful move
    doubles that coordinate's step, a failed pair of moves halves it.
    Stops when every step is below ``cfg.tol`` or after ``cfg.max_iters``
    sweeps."""
    theta = theta0.copy()
    f = objective(theta)
    steps = np.full(par.size, cfg.initial_step)
    iters = 0
    evals = 1
    converged = par.size == 0
    while not converged and iters < cfg.max_iters:
        iters += 1
        for k in range(par.size):
            for sign in (1.0, -1.0):
                cand = theta.copy()
                cand[k] += sign * steps[k]
                fc = objective(cand)
                evals += 1
                if fc > f + 1e-15 * max(1.0, abs(f)):
                    theta, f = cand, fc
                    steps[k] = min(2.0 * steps[k], MAX_STEP)
                    break
            else:
                steps[k] *= 0.5
        converged = bool(steps.max() < cfg.tol)
    return theta, f, iters, evals, converged


def _multistart(objective_F, n, P, cfg: OptimizerConfig):
    """Maximize ``objective_F(F)`` over full-power input factors ``F``
    (``Q = F F^H``).

    Returns (best value, best Q, trace dict).  Restart 0 starts from
    independent inputs; the others from seeded random factors.
    """
    par = _Factor(n, cfg.input_groups)
    sqrtP = np.sqrt(np.asarray(P, dtype=float))

    def objective(theta):
        v = objective_F(par.input_factor(theta, sqrtP))
        return -math.inf if v != v else v

    if len(par.off) == 0:
        Q = np.diag(np.asarray(P, dtype=float)).astype(complex)
        v = objective(par.start())
        trace = {"restarts": 1, "iterations": 0, "evaluations": 1,
                 "best_per_restart": [v], "converged": True}
        return v, Q, trace

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best = (-math.inf, par.start())
    per_restart, total_iters, total_evals, all_conv = [], 0, 0, True
    for r, ss in enumerate(seeds):
        theta0 = par.start(None if r == 0 else np.random.default_rng(ss))
        theta, f, iters, evals, conv = _coordinate_search(objective, par, theta0, cfg)
        per_restart.append(f)
        total_iters += iters
        total_evals += evals
        all_conv &= conv
        if f > best[0]:
            best = (f, theta)
    Q = par.covariance(best[1], sqrtP)
    trace = {"restarts": cfg.restarts, "iterations": total_iters,
             "evaluations": total_evals, "best_per_restart": per_restart,
             "converged": all_conv}
    return best[0], Q, trace


def noise_candidates(SigmaZ, free_noise, grid: int = 11):
    """Yield noise covariances with the free entries set on a grid.

    Candidates that are not positive definite are skipped.  With no free
    entries the input matrix is the only candidate.
    """
    base = np.array(SigmaZ, dtype=complex)
    if not free_noise:
        yield base
        return
    values = np.linspace(-NOISE_GRID_LIMIT, NOISE_GRID_LIMIT, grid)
    for combo in itertools.product(values, repeat=len(free_noise)):
        Sz = base.copy()
        for (a, b), v in zip(free_noise, combo):
            Sz[a, b] = v
            Sz[b, a] = v
        if np.linalg.eigvalsh(Sz).min() > 0:
            yield Sz


def _min_over_noise(ch, cfg, run):
    """``min over noise candidates of run(channel)``; ``run`` returns
    (value, Q, trace)."""
    best = None
    for Sz in noise_candidates(ch.SigmaZ, cfg.free_noise, cfg.noise_grid):
        chz = ch.with_noise(Sz) if cfg.free_noise else ch
        value, Q, trace = run(chz)
        if best is None or value < best[0]:
            best = (value, Q, trace, Sz)
    return best


def maximize(ch: ChannelParams, bound, cfg: OptimizerConfig | None = None,
             budgets: Budgets | None = None) -> BoundReport:
    """Approximate maximum of a bound over Gaussian inputs."""
    cfg = cfg or OptimizerConfig()
    bound = BoundId.parse(bound)
    budgets = default_budgets(ch) if budgets is None else budgets
    if bound is BoundId.MIMO_ULTIMATE:
        return mimo_ultimate(ch, cfg, budgets)
    program = bound_program(bound, ch.n_nodes)

    def run(chz):
        H, LZ = chz.H, psd_factor(chz.SigmaZ)
        return _multistart(
            lambda FX: eval_program(joint_factor(H, FX, LZ), program),
            ch.n_nodes, ch.P, cfg,
        )

    value, Q, trace, Sz = _min_over_noise(ch, cfg, run)
    if value == -math.inf:
        raise DegenerateDistributionError(
            f"{bound.value}: every evaluated input gave a degenerate distribution")
    return BoundReport(bound.value, max(value, 0.0), budgets[bound],
                       InputCovariance(Q), Sz, trace)


def mimo_value(Hd, Q, Sd=None) -> float:
    """``log2 det(Sd + Hd Q Hd^H) - log2 det(Sd)`` in bits."""
    Hd = np.asarray(Hd, dtype=complex)
    Sd = np.eye(Hd.shape[0]) if Sd is None else np.asarray(Sd, dtype=complex)
    _, a = np.linalg.slogdet(Sd + Hd @ Q @ Hd.conj().T)
    _, b = np.linalg.slogdet(Sd)
    return float((a - b) / math.log(2))


def mimo_ultimate(ch: ChannelParams, cfg: OptimizerConfig | None = None,
                  budgets: Budgets | None = None) -> BoundReport:
    """Capacity of the MIMO channel from all sources to all destinations
    with per-antenna power constraints, plus the destinations' out-of-band
    capacities."""
    cfg = cfg or OptimizerConfig()
    K = ch.K
    src, dst = slice(0, K), slice(K, 2 * K)
    Hd = ch.H[dst, src]
    # the source block is always jointly optimized
    src_cfg = replace(cfg, input_groups=None)

    def run(chz):
        Sd = chz.SigmaZ[dst, dst]
        return _multistart(lambda FX: mimo_value(Hd, FX @ FX.conj().T, Sd),
                           K, ch.P[src], src_cfg)

    value, Q2, trace, Sz = _min_over_noise(ch, cfg, run)
    Q = np.zeros((2 * K, 2 * K), dtype=complex)
    Q[src, src] = Q2
    if budgets is not None and K == 2:
        budget = budgets[BoundId.MIMO_ULTIMATE]
    else:
        budget = float(np.sum(ch.C[dst]))
    return BoundReport(BoundId.MIMO_ULTIMATE.value, max(value, 0.0), budget,
                       InputCovariance(Q), Sz, trace)


@dataclass
class SumRateResult:
    headline_bits: float
    binding: str
    candidates: dict
    reports: dict

    def as_dict(self) -> dict:
        return {
            "headline_bits": self.headline_bits,
            "binding": self.binding,
            "candidates": self.candidates,
            "reports": {k: r.as_dict() for k, r in self.reports.items()},
        }


def sum_rate_upper(ch: ChannelParams, cfg: OptimizerConfig | None = None,
                   budgets: Budgets | None = None, bounds=None) -> SumRateResult:
    """Smallest sum-rate upper bound over all separately maximized bounds.

    Candidates are ``cut_sum``, ``thm2a``, ``thm2b``, ``mimo_ultimate`` and
    every pairing of an R1 cut with an R2 cut.  ``bounds`` restricts the
    set of constituents that are evaluated.
    """
    cfg = cfg or OptimizerConfig()
    budgets = default_budgets(ch) if budgets is None else budgets
    wanted = list(CUTSET_BOUNDS + THM2_BOUNDS + (BoundId.MIMO_ULTIMATE,))
    if bounds is not None:
        allowed = {BoundId.parse(b) for b in bounds}
        wanted = [b for b in wanted if b in allowed]
    reports = {b.value: maximize(ch, b, cfg, budgets) for b in wanted}
    total = {k: r.total_bits for k, r in reports.items()}
    candidates = {}
    for b in (BoundId.CUT_SUM, *THM2_BOUNDS, BoundId.MIMO_ULTIMATE):
        if b.value in total:
            candidates[b.value] = total[b.value]
    for b1, b2 in itertools.product(R1_BOUNDS, R2_BOUNDS):
        if b1.value in total and b2.value in total:
            candidates[f"{b1.value}+{b2.value}"] = total[b1.value] + total[b2.value]
    if not candidates:
        raise ValueError("no sum-rate candidate among the selected bounds")
    binding = min(candidates, key=lambda k: (candidates[k], k))
    return SumRateResult(candidates[binding], binding, candidates, reports)


def mode_problem(base: SymmetricParams, mode: CooperationMode,
                 cfg: OptimizerConfig | None = None):
    """Channel, budgets and search settings for a symmetric preset.

    Returns
    -------
    (ChannelParams, Budgets, OptimizerConfig)
    """
    cfg = cfg or OptimizerConfig()
    sym, (d1, d2) = apply_mode(mode, base)
    ch = build_symmetric(sym)
    budgets = symmetric_budgets(sym, d1, d2)
    if mode.independent_inputs and cfg.input_groups is None:
        cfg = replace(cfg, input_groups=tuple((i,) for i in range(ch.n_nodes)))
    if mode.free_noise and not cfg.free_noise:
        cfg = replace(cfg, free_noise=tuple(mode.free_noise))
    return ch, budgets, cfg
