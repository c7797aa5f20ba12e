"""Pure-numpy reference for the conditional log-determinant kernel.

Variables are rows of a factor ``F`` with joint covariance ``M = F F^H``.
``cond_logdet(F, target, given)`` returns ``log2 det`` of the conditional
covariance of the target rows given the conditioning rows.

The columns ``F[given + target].conj().T`` are triangularized by Householder
reflections in order.  For a target column the norm of its residual is the
diagonal entry of the triangular factor, and the squared diagonal entries
multiply to the conditional determinant.  Working on amplitudes instead of
variances keeps the result accurate over twice the dynamic range of a
Schur complement of ``M``.

* A conditioning column whose residual is at most ``drop_tol`` times its
  own norm lies in the span of the earlier ones and is skipped.
* A target column whose residual is at most ``deg_tol`` times its own
  norm is deterministic given the rest; NaN is returned.
"""

import math

import numpy as np


def _reflect(x):
    """Householder vector ``v`` and ``beta`` with ``(I - beta v v^H) x = a e1``."""
    alpha = np.linalg.norm(x)
    x0 = x[0]
    phase = x0 / abs(x0) if x0 != 0 else 1.0
    v = x.copy()
    v[0] += phase * alpha
    vv = np.vdot(v, v).real
    return v, (2.0 / vv if vv > 0 else 0.0)


def cond_logdet(F, target, given, drop_tol, deg_tol):
    idx = list(given) + list(target)
    ng = len(given)
    A = np.array(F[idx, :].conj().T)  # columns are variables
    norms = np.sqrt((A.real ** 2 + A.imag ** 2).sum(axis=0))
    r = 0
    total = 0.0
    rows = A.shape[0]
    for j in range(len(idx)):
        x = A[r:, j]
        res = float(np.linalg.norm(x)) if r < rows else 0.0
        if j < ng:
            if res <= drop_tol * norms[j] or res == 0.0:
                continue
        else:
            if res <= deg_tol * norms[j] or res == 0.0:
                return float("nan")
            total += 2.0 * math.log2(res)
        if j + 1 < len(idx) and r + 1 <= rows:
            v, beta = _reflect(x)
            Y = A[r:, j + 1:]
            Y -= beta * np.outer(v, v.conj() @ Y)
        r += 1
    return total


def combo(F, program, drop_tol, deg_tol):
    total = 0.0
    for coef, t, g in program:
        v = cond_logdet(F, t, g, drop_tol, deg_tol)
        if v != v:
            return float("nan")
        total += coef * v
    return total
