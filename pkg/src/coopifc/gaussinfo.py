"""Entropies and mutual informations of jointly Gaussian vectors.

All variables are proper (circularly symmetric) complex Gaussian, so a
``d``-dimensional vector with covariance ``S`` has differential entropy
``log2 det(pi e S)`` bits.

Variables are addressed by labels ``X1..Xn`` (node inputs) and ``Y1..Yn``
(node outputs).  A *VarSet* is any iterable of such labels, or a
comma-separated string like ``"X1,X2"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .model import ChannelParams

__all__ = [
    "DegenerateDistributionError",
    "JointCov",
    "joint_covariance",
    "node_labels",
    "parse_varset",
    "cond_entropy",
    "mutual_info",
    "MITerm",
    "compile_terms",
    "eval_program",
    "joint_factor",
    "psd_factor",
]

LOG2_PI_E = math.log2(math.pi * math.e)
CLAMP_TOL = 1e-9
PSD_TOL = 1e-9


class DegenerateDistributionError(ArithmeticError):
    """A conditional covariance is singular (deterministic target)."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


def node_labels(n_nodes: int) -> list[str]:
    return [f"X{i}" for i in range(1, n_nodes + 1)] + [
        f"Y{i}" for i in range(1, n_nodes + 1)
    ]


def parse_varset(vs) -> tuple[str, ...]:
    if vs is None:
        return ()
    if isinstance(vs, str):
        items = [s.strip() for s in vs.replace(";", ",").split(",")]
        return tuple(s.upper() for s in items if s)
    return tuple(str(s).strip().upper() for s in vs)


def psd_factor(A) -> np.ndarray:
    """A matrix ``F`` with ``F F^H = A`` for Hermitian PSD ``A``."""
    A = np.asarray(A, dtype=complex)
    A = (A + A.conj().T) / 2
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        w, V = np.linalg.eigh(A)
        return V * np.sqrt(np.clip(w, 0.0, None))


@dataclass(frozen=True, eq=False)
class JointCov:
    """Covariance matrix over labeled coordinates.

    ``F`` is a square-root factor (``M = F F^H``) whose rows are the
    variables; entropies are computed from ``F`` so that wide dynamic
    ranges survive.  When only ``M`` is given the factor is derived from it.
    """

    M: np.ndarray
    labels: tuple
    F: np.ndarray | None = None

    def __post_init__(self):
        M = np.ascontiguousarray(np.asarray(self.M, dtype=complex))
        labels = tuple(self.labels)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] != len(labels):
            raise ValueError("covariance shape does not match labels")
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be unique")
        F = psd_factor(M) if self.F is None else self.F
        F = np.ascontiguousarray(np.asarray(F, dtype=complex))
        if F.shape[0] != M.shape[0]:
            raise ValueError("factor rows do not match the covariance")
        M.setflags(write=False)
        F.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @property
    def dim(self) -> int:
        return len(self.labels)

    def indices(self, vs) -> np.ndarray:
        names = parse_varset(vs)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variables in {names}")
        try:
            return np.array([self._index[n] for n in names], dtype=np.intp)
        except KeyError as exc:
            raise KeyError(f"unknown variable {exc.args[0]!r}") from None

    def check_psd(self, tol: float = PSD_TOL) -> None:
        M = self.M
        if not np.allclose(M, M.conj().T, atol=tol * max(1.0, np.abs(M).max())):
            raise ValueError("covariance is not Hermitian")
        eig = np.linalg.eigvalsh(M)
        if eig.size and eig.min() < -tol * max(abs(eig.max()), 1e-300):
            raise ValueError(f"covariance is not PSD (eigenvalue {eig.min():.3g})")


def joint_covariance(ch: ChannelParams, Q) -> JointCov:
    """Covariance of ``(X_1..X_n, Y_1..Y_n)`` for ``Y = H X + Z``.

    Block form ``[[Q, Q H^H], [H Q, H Q H^H + SigmaZ]]``.
    """
    Q = np.asarray(getattr(Q, "Q", Q), dtype=complex)
    n = ch.n_nodes
    if Q.shape != (n, n):
        raise ValueError(f"input covariance must be {n}x{n}, got {Q.shape}")
    herm = (Q + Q.conj().T) / 2
    if not np.allclose(Q, herm, atol=PSD_TOL * max(1.0, np.abs(Q).max())):
        raise ValueError("input covariance is not Hermitian")
    eig = np.linalg.eigvalsh(herm)
    if eig.min() < -PSD_TOL * max(1.0, eig.max()):
        raise ValueError(f"input covariance is not PSD (eigenvalue {eig.min():.3g})")
    F = joint_factor(ch.H, psd_factor(herm), psd_factor(ch.SigmaZ))
    return JointCov(_joint_matrix(ch.H, herm, ch.SigmaZ), tuple(node_labels(n)), F)


def joint_factor(H, FX, FZ) -> np.ndarray:
    """Factor of the joint covariance from input and noise factors:
    rows ``X = FX w1`` and ``Y = H FX w1 + FZ w2`` for white ``w1, w2``."""
    n = len(FX)
    F = np.zeros((2 * n, 2 * n), dtype=complex)
    F[:n, :n] = FX
    F[n:, :n] = H @ FX
    F[n:, n:] = FZ
    return F


def _joint_matrix(H, Q, Sz):
    HQ = H @ Q
    M = np.empty((2 * len(Q), 2 * len(Q)), dtype=complex)
    n = len(Q)
    M[:n, :n] = Q
    M[n:, :n] = HQ
    M[:n, n:] = HQ.conj().T
    M[n:, n:] = HQ @ H.conj().T + Sz
    return M


def _raise_degenerate(jc: JointCov, t, g):
    M = jc.M
    S = M[np.ix_(t, t)]
    if len(g):
        S = S - M[np.ix_(t, g)] @ np.linalg.pinv(M[np.ix_(g, g)], hermitian=True) @ M[np.ix_(g, t)]
    eig = np.linalg.eigvalsh((S + S.conj().T) / 2)
    names = [jc.labels[i] for i in t]
    raise DegenerateDistributionError(
        f"degenerate conditional distribution of {','.join(names)}: "
        f"smallest eigenvalue {eig.min():.3g}",
        eigenvalue=float(eig.min()),
    )


def cond_entropy(jc: JointCov, target, given=()) -> float:
    """Differential entropy ``h(target | given)`` in bits."""
    t = jc.indices(target)
    g = jc.indices(given)
    if t.size == 0:
        raise ValueError("target set must be nonempty")
    if set(t.tolist()) & set(g.tolist()):
        raise ValueError("target and conditioning sets overlap")
    v = kernels.cond_logdet(jc.F, t, g)
    if v != v:
        _raise_degenerate(jc, t, g)
    return v + t.size * LOG2_PI_E


def mutual_info(jc: JointCov, A, B, C=(), clamp: bool = True) -> float:
    """``I(A; B | C)`` in bits, computed as ``h(B|C) - h(B|A,C)``.

    Values in ``[-1e-9, 0)`` are numerical noise and clamped to zero.
    """
    a, b, c = parse_varset(A), parse_varset(B), parse_varset(C)
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise ValueError("A, B and C must be pairwise disjoint")
    if not a or not b:
        return 0.0
    value = cond_entropy(jc, b, c) - cond_entropy(jc, b, a + c)
    if clamp and -CLAMP_TOL <= value < 0.0:
        return 0.0
    return value


@dataclass(frozen=True)
class MITerm:
    """Symbolic ``I(A; B | C)``."""

    A: tuple
    B: tuple
    C: tuple = ()

    def __post_init__(self):
        for name in ("A", "B", "C"):
            object.__setattr__(self, name, parse_varset(getattr(self, name)))

    def render(self) -> str:
        s = f"I({','.join(self.A)} ; {','.join(self.B)}"
        if self.C:
            s += f" | {','.join(self.C)}"
        return s + ")"


def compile_terms(labels: Sequence[str], terms: Iterable[MITerm]) -> list:
    """Lower MI terms to a kernel program of ``(coef, target, given)``.

    The two ``pi e`` constants of each term cancel, so the program sums raw
    log-determinants.
    """
    index = {lab: i for i, lab in enumerate(labels)}

    def idx(names):
        return np.array([index[n] for n in names], dtype=np.intp)

    program = []
    for term in terms:
        if not term.A or not term.B:
            continue
        program.append((1.0, idx(term.B), idx(term.C)))
        program.append((-1.0, idx(term.B), idx(term.A + term.C)))
    return program


def eval_program(F: np.ndarray, program: list) -> float:
    """Evaluate a compiled program on a joint-covariance factor.

    Returns NaN on a degenerate conditional distribution.
    """
    return kernels.combo(F, program)
