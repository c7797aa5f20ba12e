"""Partial-sum-rate bound chains for ``K`` two-way pairs.

Users are ``1..K``; user ``u`` sends from node ``u`` to node ``u + K``.
For an ordered subset ``S = (u1..um)`` with complement ``T`` term ``j`` is
``I(A_j ; B_j | C_j)`` with

* ``B_1 = {Y_{u1+K}} + {Y_v : v in T}``, ``B_j = {Y_{uj+K}, Y_{u(j-1)}}``
* ``A_j = {X_uj, ..., X_um}``
* ``C_j`` = the X of earlier users and of ``T`` (plus destination X when
  enabled), then ``B_{j-1}, ..., B_1``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .gaussinfo import MITerm, cond_entropy, joint_covariance, mutual_info

__all__ = [
    "SumBoundSpec",
    "generate_terms",
    "terms_for_channel",
    "has_active_destinations",
    "eval_terms",
    "consistency_check",
    "min_over_orders",
    "oob_budget",
]


@dataclass(frozen=True)
class SumBoundSpec:
    K: int
    S: tuple
    terms: tuple
    destination_inputs: bool = False

    def render(self) -> str:
        return "\n".join(t.render() for t in self.terms)

    def as_dict(self) -> dict:
        return {
            "K": self.K,
            "S": list(self.S),
            "destination_inputs": self.destination_inputs,
            "terms": [{"A": list(t.A), "B": list(t.B), "C": list(t.C)} for t in self.terms],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def _check_subset(K, S):
    if int(K) != K or K < 2:
        raise ValueError("K must be an integer >= 2")
    S = tuple(int(u) for u in S)
    if not S:
        raise ValueError("subset must be nonempty")
    for u in S:
        if not 1 <= u <= K:
            raise ValueError(f"user index out of range: {u}")
    if len(set(S)) != len(S):
        raise ValueError("duplicate user in subset")
    return int(K), S


def generate_terms(K: int, S, destination_inputs: bool = False) -> SumBoundSpec:
    K, S = _check_subset(K, S)
    T = [v for v in range(1, K + 1) if v not in S]
    dest = list(range(K + 1, 2 * K + 1)) if destination_inputs else []
    blocks, terms = [], []
    for j, u in enumerate(S):
        if j == 0:
            B = [f"Y{u + K}"] + [f"Y{v}" for v in T]
        else:
            B = [f"Y{u + K}", f"Y{S[j - 1]}"]
        A = [f"X{w}" for w in S[j:]]
        xs = sorted(set(S[:j]) | set(T) | set(dest))
        C = [f"X{w}" for w in xs] + [y for blk in reversed(blocks) for y in blk]
        terms.append(MITerm(tuple(A), tuple(B), tuple(C)))
        blocks.append(B)
    return SumBoundSpec(K, S, tuple(terms), bool(destination_inputs))


def has_active_destinations(ch, tol: float = 0.0) -> bool:
    """True when some destination node transmits with positive power."""
    return bool(np.any(np.asarray(ch.P)[ch.n_nodes // 2:] > tol))


def terms_for_channel(ch, S, destination_inputs=None) -> SumBoundSpec:
    """``generate_terms`` with the destination switch auto-detected from ``ch``
    unless given."""
    if destination_inputs is None:
        destination_inputs = has_active_destinations(ch)
    return generate_terms(ch.n_nodes // 2, S, destination_inputs)


def _check_channel(ch, spec):
    if ch.n_nodes != 2 * spec.K:
        raise ValueError(f"channel has {ch.n_nodes} nodes, spec needs {2 * spec.K}")


def eval_terms(ch, Q, spec: SumBoundSpec) -> float:
    _check_channel(ch, spec)
    jc = joint_covariance(ch, Q)
    return float(sum(mutual_info(jc, t.A, t.B, t.C) for t in spec.terms))


def consistency_check(ch, Q, spec: SumBoundSpec) -> float:
    """|eval_terms - grouped entropy form|.

    The grouped form is ``sum_j h(B_j | C_j) - h(B_1..B_m | X)`` where ``X``
    is every input appearing in the chain.
    """
    _check_channel(ch, spec)
    jc = joint_covariance(ch, Q)
    chained = sum(mutual_info(jc, t.A, t.B, t.C, clamp=False) for t in spec.terms)
    first = spec.terms[0]
    xs = first.A + tuple(c for c in first.C if c.startswith("X"))
    ys = tuple(y for t in spec.terms for y in t.B)
    grouped = sum(cond_entropy(jc, t.B, t.C) for t in spec.terms) - cond_entropy(jc, ys, xs)
    return abs(chained - grouped)


def min_over_orders(ch, Q, users, destination_inputs=None):
    """Smallest chain value over all orderings of ``users``.

    Returns ``(value, spec)``.
    """
    best = None
    for order in itertools.permutations(users):
        spec = terms_for_channel(ch, order, destination_inputs)
        v = eval_terms(ch, Q, spec)
        if best is None or v < best[0]:
            best = (v, spec)
    return best


def oob_budget(ch, spec: SumBoundSpec) -> float:
    """Out-of-band allowance: total capacity of the users in the sum."""
    return float(sum(ch.C[u - 1] for u in spec.S))
