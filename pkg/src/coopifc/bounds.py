"""Cut-set and sum-rate outer bounds evaluated at a Gaussian input.

Every bound value is an in-band mutual information (computed exactly by
:mod:`coopifc.gaussinfo`) plus an out-of-band budget in bits.  The
out-of-band signals ``f_l`` are never simulated: each takes at most
``2**C_l`` values, so its entropy contribution is capped by a budget.

Bound identities for the 2-pair channel (nodes 1,2 sources, 3,4
destinations)::

    cut_r1a   R1    <= I(X1,X2,X4; Y3 | X3)            cut {1,2,4} | {3}
    cut_r1b   R1    <= I(X1,X4; Y2,Y3 | X2,X3)         cut {1,4}   | {2,3}
    cut_r1c   R1    <= I(X1; Y2,Y3,Y4 | X2,X3,X4)      cut {1}     | {2,3,4}
    cut_r2a   R2    <= I(X1,X2,X3; Y4 | X4)            cut {1,2,3} | {4}
    cut_r2b   R2    <= I(X2,X3; Y1,Y4 | X1,X4)         cut {2,3}   | {1,4}
    cut_r2c   R2    <= I(X2; Y1,Y3,Y4 | X1,X3,X4)      cut {2}     | {1,3,4}
    cut_sum   R1+R2 <= I(X1,X2; Y3,Y4 | X3,X4)         cut {1,2}   | {3,4}
    thm2a     R1+R2 <= I(X1; Y3,Y2 | Y4,X2,X3,X4) + I(X1,X2,X3; Y4 | X4)
    thm2b     R1+R2 <= I(X2; Y4,Y1 | Y3,X1,X3,X4) + I(X1,X2,X4; Y3 | X3)

``thm2a`` is ``thm2b`` with the pairs swapped (1<->2, 3<->4).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .gaussinfo import (
    MITerm,
    compile_terms,
    eval_program,
    joint_covariance,
    mutual_info,
    node_labels,
)
from .model import SWAP_PERMUTATION, ChannelParams, SymmetricParams

__all__ = [
    "BoundId",
    "CutSpec",
    "InputCovariance",
    "BoundValue",
    "Budgets",
    "CUT_SETS",
    "R1_BOUNDS",
    "R2_BOUNDS",
    "bound_terms",
    "cut_terms",
    "default_budgets",
    "symmetric_budgets",
    "eval_bound",
    "eval_cutset",
    "eval_thm2",
    "eval_generic_cut",
]


class BoundId(enum.Enum):
    CUT_R1A = "cut_r1a"
    CUT_R1B = "cut_r1b"
    CUT_R1C = "cut_r1c"
    CUT_R2A = "cut_r2a"
    CUT_R2B = "cut_r2b"
    CUT_R2C = "cut_r2c"
    CUT_SUM = "cut_sum"
    THM2A = "thm2a"
    THM2B = "thm2b"
    MIMO_ULTIMATE = "mimo_ultimate"

    @classmethod
    def parse(cls, name) -> "BoundId":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        for b in cls:
            if key in (b.value, b.name.lower()):
                return b
        raise ValueError(f"unknown bound {name!r}")


# 1-based transmitting side S of each cut for K=2
CUT_SETS = {
    BoundId.CUT_R1A: (1, 2, 4),
    BoundId.CUT_R1B: (1, 4),
    BoundId.CUT_R1C: (1,),
    BoundId.CUT_R2A: (1, 2, 3),
    BoundId.CUT_R2B: (2, 3),
    BoundId.CUT_R2C: (2,),
    BoundId.CUT_SUM: (1, 2),
}
R1_BOUNDS = (BoundId.CUT_R1A, BoundId.CUT_R1B, BoundId.CUT_R1C)
R2_BOUNDS = (BoundId.CUT_R2A, BoundId.CUT_R2B, BoundId.CUT_R2C)
CUTSET_BOUNDS = R1_BOUNDS + R2_BOUNDS + (BoundId.CUT_SUM,)
THM2_BOUNDS = (BoundId.THM2A, BoundId.THM2B)


@dataclass(frozen=True)
class CutSpec:
    """Transmitting side ``S`` (1-based node indices) of a network cut."""

    S: frozenset
    n_nodes: int = 4

    def __post_init__(self):
        S = frozenset(int(i) for i in self.S)
        object.__setattr__(self, "S", S)
        if not S or len(S) >= self.n_nodes:
            raise ValueError("cut must be a nonempty proper subset of the nodes")
        if min(S) < 1 or max(S) > self.n_nodes:
            raise ValueError(f"cut nodes must lie in 1..{self.n_nodes}")

    @property
    def complement(self) -> tuple:
        return tuple(i for i in range(1, self.n_nodes + 1) if i not in self.S)

    @property
    def name(self) -> str:
        return "cut{" + ",".join(map(str, sorted(self.S))) + "}"


def cut_terms(cut: CutSpec) -> list[MITerm]:
    """``I(X(S); Y(S^c) | X(S^c))``."""
    S = sorted(cut.S)
    Sc = cut.complement
    return [MITerm(
        A=[f"X{i}" for i in S],
        B=[f"Y{i}" for i in Sc],
        C=[f"X{i}" for i in Sc],
    )]


def bound_terms(bound: BoundId) -> list[MITerm]:
    """Mutual-information terms making up the in-band part of ``bound``."""
    bound = BoundId.parse(bound)
    if bound in CUT_SETS:
        return cut_terms(CutSpec(frozenset(CUT_SETS[bound])))
    if bound is BoundId.THM2A:
        return [
            MITerm("X1", "Y3,Y2", "Y4,X2,X3,X4"),
            MITerm("X1,X2,X3", "Y4", "X4"),
        ]
    if bound is BoundId.THM2B:
        return [
            MITerm("X2", "Y4,Y1", "Y3,X1,X3,X4"),
            MITerm("X1,X2,X4", "Y3", "X3"),
        ]
    raise ValueError(f"{bound.value} has no mutual-information form; use mimo_ultimate")


@dataclass(frozen=True, eq=False)
class InputCovariance:
    """Joint covariance of the Gaussian channel inputs."""

    Q: np.ndarray

    def __post_init__(self):
        Q = np.array(self.Q, dtype=complex)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError("Q must be square")
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)

    def validate(self, ch: ChannelParams, tol: float = 1e-9) -> list[str]:
        issues = []
        Q = self.Q
        if Q.shape != (ch.n_nodes, ch.n_nodes):
            return [f"Q must be {ch.n_nodes}x{ch.n_nodes}"]
        if not np.allclose(Q, Q.conj().T, atol=tol * max(1.0, np.abs(Q).max())):
            issues.append("Q not Hermitian")
        eig = np.linalg.eigvalsh((Q + Q.conj().T) / 2)
        if eig.min() < -tol * max(1.0, eig.max()):
            issues.append("Q not PSD")
        for i, (q, p) in enumerate(zip(np.real(np.diag(Q)), ch.P)):
            if q > p * (1 + tol) + tol:
                issues.append(f"power constraint violated at node {i + 1}")
        return issues

    @classmethod
    def full_power_diagonal(cls, ch: ChannelParams) -> "InputCovariance":
        return cls(np.diag(ch.P).astype(complex))

    def swapped(self) -> "InputCovariance":
        perm = SWAP_PERMUTATION
        return InputCovariance(self.Q[np.ix_(perm, perm)])


@dataclass(frozen=True)
class Budgets:
    """Out-of-band budget in bits for each bound identity."""

    bits: dict = field(default_factory=dict)

    def __getitem__(self, bound) -> float:
        return float(self.bits.get(BoundId.parse(bound), 0.0))

    def as_dict(self) -> dict:
        return {b.value: float(v) for b, v in self.bits.items()}


def _receive_capacity(ch: ChannelParams, nodes) -> float:
    return float(sum(ch.C[i - 1] for i in nodes))


def default_budgets(ch: ChannelParams) -> Budgets:
    """Conservative budgets derived from the link capacities alone.

    A cut gets the capacities of all out-of-band links into its receiving
    side.  ``thm2b`` gets ``C1+C3+C4`` (the out-of-band parts of Y1, Y3,
    Y4 all enter its positive entropy terms); ``thm2a`` its mirror image.
    """
    if ch.K != 2:
        raise ValueError("the named bounds are defined for K=2")
    bits = {b: _receive_capacity(ch, CutSpec(frozenset(S)).complement)
            for b, S in CUT_SETS.items()}
    bits[BoundId.THM2B] = _receive_capacity(ch, (1, 3, 4))
    bits[BoundId.THM2A] = _receive_capacity(ch, (2, 3, 4))
    bits[BoundId.MIMO_ULTIMATE] = _receive_capacity(ch, (3, 4))
    return Budgets(bits)


def symmetric_budgets(sym: SymmetricParams, delta1: float, delta2: float) -> Budgets:
    """Budgets for the symmetric channel under a cooperation preset.

    ``delta1``/``delta2`` are in SNR-exponent units.  Destination links
    carry no out-of-band capacity in the symmetric model.
    """
    unit = math.log2(1.0 + sym.snr)
    d1 = math.inf if math.isinf(delta1) else delta1 * unit
    d2 = math.inf if math.isinf(delta2) else delta2 * unit
    bits = {
        BoundId.CUT_R1A: 0.0,
        BoundId.CUT_R2A: 0.0,
        BoundId.CUT_R1B: d1,
        BoundId.CUT_R2B: d1,
        BoundId.CUT_R1C: d2,
        BoundId.CUT_R2C: d2,
        BoundId.CUT_SUM: 0.0,
        BoundId.THM2A: d2,
        BoundId.THM2B: d2,
        BoundId.MIMO_ULTIMATE: 0.0,
    }
    return Budgets(bits)


@dataclass(frozen=True)
class BoundValue:
    id: str
    inband_bits: float
    oob_budget_bits: float

    @property
    def total_bits(self) -> float:
        return self.inband_bits + self.oob_budget_bits

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "inband_bits": self.inband_bits,
            "oob_budget_bits": self.oob_budget_bits,
            "total_bits": self.total_bits,
        }


def _inband(ch, Q, terms) -> float:
    jc = joint_covariance(ch, Q)
    return sum(mutual_info(jc, t.A, t.B, t.C) for t in terms)


def eval_bound(ch: ChannelParams, Q, bound, budgets: Budgets | None = None) -> BoundValue:
    bound = BoundId.parse(bound)
    budgets = default_budgets(ch) if budgets is None else budgets
    return BoundValue(bound.value, _inband(ch, Q, bound_terms(bound)), budgets[bound])


def eval_cutset(ch: ChannelParams, Q, budgets: Budgets | None = None) -> list[BoundValue]:
    """The seven cut-set bounds of the 2-pair channel at input ``Q``."""
    budgets = default_budgets(ch) if budgets is None else budgets
    return [eval_bound(ch, Q, b, budgets) for b in CUTSET_BOUNDS]


def eval_thm2(ch: ChannelParams, Q, budgets: Budgets | None = None) -> list[BoundValue]:
    """The two sum-rate bounds ``thm2a`` and ``thm2b`` at input ``Q``."""
    budgets = default_budgets(ch) if budgets is None else budgets
    return [eval_bound(ch, Q, b, budgets) for b in THM2_BOUNDS]


def eval_generic_cut(ch: ChannelParams, Q, cut) -> BoundValue:
    """Cut-set bound for an arbitrary cut of a ``2K``-node network.

    The budget is the total out-of-band capacity into the receiving side.
    """
    if not isinstance(cut, CutSpec):
        cut = CutSpec(frozenset(cut), ch.n_nodes)
    if cut.n_nodes != ch.n_nodes:
        raise ValueError("cut does not match the channel size")
    inband = _inband(ch, Q, cut_terms(cut))
    return BoundValue(cut.name, inband, _receive_capacity(ch, cut.complement))


def bound_program(bound, n_nodes: int = 4):
    """Compiled kernel program for the in-band part of ``bound``."""
    return compile_terms(node_labels(n_nodes), bound_terms(bound))


def eval_compiled(ch: ChannelParams, Q: np.ndarray, program) -> float:
    return eval_program(joint_covariance(ch, Q).F, program)
