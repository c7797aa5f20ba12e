"""Channel data model, symmetric SNR-exponent parameterization and
cooperation-mode presets for the cooperative Gaussian interference channel.

Node indices are 1-based in user-facing text and 0-based in arrays.  For
``K`` pairs, nodes ``1..K`` are sources and ``K+1..2K`` are destinations.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

__all__ = [
    "ChannelParams",
    "SymmetricParams",
    "ModeTag",
    "CooperationMode",
    "cooperation_mode",
    "build_symmetric",
    "apply_mode",
    "validate_channel",
    "EXPONENT_NAMES",
]

EXPONENT_NAMES = ("alpha", "alpha_tilde", "beta_s", "beta_d", "gamma", "kappa")

# Links that can be switched off entirely (gain exactly zero) rather than
# being set to snr**0 = 1.
LINK_NAMES = ("beta_s", "beta_d", "gamma")


@dataclass(frozen=True, eq=False)
class ChannelParams:
    """Full description of a Gaussian K-pair cooperative channel.

    Parameters
    ----------
    K : int
        Number of source-destination pairs.
    H : ndarray, complex, shape (2K, 2K)
        ``H[l, i]`` is the amplitude gain from transmitter ``i`` to
        receiver ``l``.
    P : ndarray, shape (2K,)
        Average power per node (linear).
    SigmaZ : ndarray, shape (2K, 2K)
        Hermitian noise covariance with unit diagonal.
    C : ndarray, shape (2K,)
        Out-of-band link capacities in bits per channel use.
    """

    K: int
    H: np.ndarray
    P: np.ndarray
    SigmaZ: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        n = 2 * int(self.K)
        H = np.array(self.H, dtype=complex)
        P = np.array(self.P, dtype=float).reshape(-1)
        Sz = np.array(self.SigmaZ, dtype=complex)
        C = np.array(self.C, dtype=float).reshape(-1)
        if self.K < 1:
            raise ValueError("K must be a positive integer")
        if H.shape != (n, n):
            raise ValueError(f"H must be {n}x{n}, got {H.shape}")
        if Sz.shape != (n, n):
            raise ValueError(f"SigmaZ must be {n}x{n}, got {Sz.shape}")
        if P.shape != (n,) or C.shape != (n,):
            raise ValueError(f"P and C must have length {n}")
        for arr in (H, P, Sz, C):
            arr.setflags(write=False)
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "SigmaZ", Sz)
        object.__setattr__(self, "C", C)

    @property
    def n_nodes(self) -> int:
        return 2 * self.K

    def with_noise(self, SigmaZ) -> "ChannelParams":
        return replace(self, SigmaZ=SigmaZ)

    def swapped(self) -> "ChannelParams":
        """Relabel the pairs for K=2 (1<->2, 3<->4)."""
        if self.K != 2:
            raise ValueError("pair swap is defined for K=2 only")
        perm = SWAP_PERMUTATION
        return ChannelParams(
            K=2,
            H=self.H[np.ix_(perm, perm)],
            P=self.P[perm],
            SigmaZ=self.SigmaZ[np.ix_(perm, perm)],
            C=self.C[perm],
        )


SWAP_PERMUTATION = np.array([1, 0, 3, 2])


@dataclass(frozen=True)
class SymmetricParams:
    """SNR-exponent description of the symmetric 2-pair channel.

    ``off`` lists link exponents (``beta_s``, ``beta_d``, ``gamma``) whose
    links are absent altogether.  An absent link has gain 0, whereas an
    exponent of 0 still means a unit-gain link.
    """

    snr: float
    alpha: float = 0.0
    alpha_tilde: float = 0.0
    beta_s: float = 0.0
    beta_d: float = 0.0
    gamma: float = 0.0
    kappa: float = 0.0
    off: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "off", frozenset(self.off))
        if not self.snr > 0:
            raise ValueError(f"snr must be positive, got {self.snr}")
        for name in EXPONENT_NAMES:
            v = getattr(self, name)
            if math.isnan(v) or v < 0:
                raise ValueError(f"exponent {name} must be nonnegative, got {v}")
        unknown = self.off - set(LINK_NAMES)
        if unknown:
            raise ValueError(f"unknown link names in off: {sorted(unknown)}")

    def as_dict(self) -> dict:
        d = {"snr": self.snr}
        d.update({name: getattr(self, name) for name in EXPONENT_NAMES})
        if self.off:
            d["off"] = sorted(self.off)
        return d


class ModeTag(enum.Enum):
    NO_COOP = "no-coop"
    IN_BAND_SOURCE = "in-band-source"
    OUT_OF_BAND_SOURCE = "out-of-band-source"
    OUTPUT_FEEDBACK = "output-feedback"
    RATE_LIMITED_FEEDBACK = "rate-limited-feedback"
    TWO_WAY_LIKE = "two-way-like"
    ULTIMATE = "ultimate"

    @classmethod
    def parse(cls, name: "str | ModeTag") -> "ModeTag":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        for tag in cls:
            if key in (tag.value, tag.name.lower().replace("_", "-")):
                return tag
        raise ValueError(f"unknown cooperation mode {name!r}")


@dataclass(frozen=True)
class CooperationMode:
    """A cooperation preset.

    ``delta1`` and ``delta2`` are the out-of-band entropy budgets in
    SNR-exponent units.  ``independent_inputs`` restricts the input
    covariance to be diagonal (no cooperation means no common randomness
    between transmitters).  ``free_noise`` lists 0-based noise-covariance
    entries the capacity region does not depend on.
    """

    tag: ModeTag
    beta: float = 0.0
    delta1: float = 0.0
    delta2: float = 0.0
    overrides: Mapping[str, float] = field(default_factory=dict)
    off: frozenset = field(default_factory=frozenset)
    independent_inputs: bool = False
    free_noise: tuple = ()

    def __post_init__(self):
        if self.delta2 > self.delta1:
            raise ValueError("delta2 must not exceed delta1")
        if self.delta2 < 0 or self.beta < 0:
            raise ValueError("beta and deltas must be nonnegative")


def cooperation_mode(tag, beta: float = 0.0) -> CooperationMode:
    """Build the preset for ``tag`` with cooperation strength ``beta``."""
    tag = ModeTag.parse(tag)
    beta = float(beta)
    if beta < 0 or math.isnan(beta):
        raise ValueError(f"beta must be nonnegative, got {beta}")
    zero = dict(beta_s=0.0, beta_d=0.0, gamma=0.0, alpha_tilde=0.0, kappa=0.0)
    all_links = frozenset(LINK_NAMES)
    if tag is ModeTag.NO_COOP:
        return CooperationMode(
            tag, beta, 0.0, 0.0, zero, all_links,
            independent_inputs=True, free_noise=((2, 3),),
        )
    if tag is ModeTag.IN_BAND_SOURCE:
        return CooperationMode(
            tag, beta, 0.0, 0.0, {**zero, "beta_s": beta},
            frozenset({"beta_d", "gamma"}),
        )
    if tag is ModeTag.OUT_OF_BAND_SOURCE:
        return CooperationMode(tag, beta, beta, beta, {**zero, "kappa": beta}, all_links)
    if tag is ModeTag.OUTPUT_FEEDBACK:
        # Unlimited feedback; f2 is a function of Y4 so Delta2 vanishes.
        return CooperationMode(
            tag, beta, math.inf, 0.0, {**zero, "kappa": math.inf}, all_links,
        )
    if tag in (ModeTag.RATE_LIMITED_FEEDBACK, ModeTag.TWO_WAY_LIKE):
        return CooperationMode(tag, beta, beta, 0.0, {**zero, "kappa": beta}, all_links)
    if tag is ModeTag.ULTIMATE:
        return CooperationMode(
            tag, beta, 0.0, 0.0,
            {**zero, "beta_s": math.inf, "beta_d": math.inf},
            frozenset({"gamma"}),
        )
    raise ValueError(f"unhandled mode {tag}")  # pragma: no cover


def apply_mode(mode: CooperationMode, base: SymmetricParams):
    """Apply a preset to ``base``.

    Returns
    -------
    (SymmetricParams, (delta1, delta2))
    """
    sym = replace(base, off=frozenset(mode.off), **dict(mode.overrides))
    return sym, (mode.delta1, mode.delta2)


def build_symmetric(sym: SymmetricParams) -> ChannelParams:
    """Gaussian K=2 channel realizing the exponent matrix of ``sym``.

    Powers are normalized to one, so ``|H[l, i]|**2`` carries the received
    SNR ``snr**exponent``.  Self-links are zero.
    """
    s = float(sym.snr)
    for name in EXPONENT_NAMES:
        v = getattr(sym, name)
        # infinite kappa is an unlimited out-of-band link, which stays expressible
        exempt = name == "kappa" or name in sym.off or (
            name == "alpha_tilde" and "gamma" in sym.off)
        if not math.isfinite(v) and not exempt:
            raise ValueError(
                f"exponent {name} is infinite; use the MIMO limit instead of a finite channel"
            )

    def g(expo, link=None):
        if link is not None and link in sym.off:
            return 0.0
        return s ** expo

    bs = g(sym.beta_s, "beta_s")
    bd = g(sym.beta_d, "beta_d")
    gm = g(sym.gamma, "gamma")
    ga = 0.0 if "gamma" in sym.off else s ** (sym.gamma * sym.alpha_tilde)
    direct = s
    cross = s ** sym.alpha
    snr_mat = np.array([
        [0.0, bs, gm, ga],
        [bs, 0.0, ga, gm],
        [direct, cross, 0.0, bd],
        [cross, direct, bd, 0.0],
    ])
    c_src = sym.kappa * math.log2(1.0 + s)
    return ChannelParams(
        K=2,
        H=np.sqrt(snr_mat).astype(complex),
        P=np.ones(4),
        SigmaZ=np.eye(4),
        C=np.array([c_src, c_src, 0.0, 0.0]),
    )


def validate_channel(ch: ChannelParams, tol: float = 1e-9) -> list[str]:
    """Return one diagnostic string per violated channel invariant."""
    issues = []
    Sz = ch.SigmaZ
    if not np.allclose(Sz, Sz.conj().T, atol=tol):
        issues.append("noise covariance not Hermitian")
    diag = np.real(np.diag(Sz))
    for i, d in enumerate(diag):
        if abs(d - 1.0) > tol:
            issues.append(f"noise variance at node {i + 1} is {d:g}, expected 1")
    eig = np.linalg.eigvalsh((Sz + Sz.conj().T) / 2)
    if eig.min() < -tol * max(1.0, abs(eig).max()):
        issues.append("noise covariance not PSD")
    for i in range(ch.n_nodes):
        if ch.H[i, i] != 0:
            issues.append(f"self-gain nonzero at node {i + 1}")
    for i, p in enumerate(ch.P):
        if not p >= 0:
            issues.append(f"negative power at node {i + 1}")
    for i, c in enumerate(ch.C):
        if not c >= 0:
            issues.append(f"negative out-of-band capacity at node {i + 1}")
    if not np.all(np.isfinite(ch.H)):
        issues.append("non-finite channel gain")
    return issues
