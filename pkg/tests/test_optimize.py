import math

import numpy as np
import pytest

from coopifc.bounds import default_budgets
from coopifc.gaussinfo import DegenerateDistributionError
from coopifc.model import ChannelParams, SymmetricParams, build_symmetric, cooperation_mode
from coopifc.optimize import (
    BoundReport,
    OptimizerConfig,
    _Factor,
    maximize,
    mimo_ultimate,
    mimo_value,
    mode_problem,
    noise_candidates,
    sum_rate_upper,
)

FAST = OptimizerConfig(restarts=4)


def decoupled(s=20.0):
    H = np.zeros((4, 4))
    H[2, 0] = H[3, 1] = math.sqrt(s)
    return ChannelParams(2, H, [1, 1, 0, 0], np.eye(4), np.zeros(4))


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        OptimizerConfig.from_dict({"restart": 3})
    cfg = OptimizerConfig.from_dict({"restarts": 3, "seed": 9})
    assert cfg.as_dict()["restarts"] == 3 and cfg.seed == 9


def test_factor_full_power():
    par = _Factor(4, None)
    rng = np.random.default_rng(0)
    P = np.array([1.0, 2.0, 0.5, 3.0])
    Q = par.covariance(par.start(rng), np.sqrt(P))
    assert np.allclose(np.real(np.diag(Q)), P)
    assert np.linalg.eigvalsh(Q).min() > -1e-12


def test_factor_groups():
    par = _Factor(4, [(0, 1), (2,), (3,)])
    assert par.off == [(1, 0)]
    with pytest.raises(ValueError):
        _Factor(3, [(0, 1), (1, 2)])


def test_maximize_decoupled_thm2b():
    s = 20.0
    r = maximize(decoupled(s), "thm2b", FAST)
    assert r.inband_bits == pytest.approx(2 * math.log2(1 + s), abs=1e-9)


def test_maximize_single_link_restart_independent():
    H = np.zeros((4, 4))
    H[2, 0] = 3.0
    ch = ChannelParams(2, H, [2, 1, 1, 1], np.eye(4), np.zeros(4))
    vals = [maximize(ch, "cut_r1c", OptimizerConfig(restarts=r, seed=r)).inband_bits
            for r in (1, 3, 6)]
    assert max(vals) - min(vals) < 1e-6
    assert vals[0] == pytest.approx(math.log2(1 + 9 * 2), abs=1e-6)


@pytest.mark.slow
def test_multistart_self_consistency():
    ch = build_symmetric(SymmetricParams(100, alpha=1.0))
    r = maximize(ch, "cut_sum", OptimizerConfig(restarts=32))
    best = r.optimizer_trace["best_per_restart"]
    assert max(best) - sorted(best)[len(best) // 2] < 1e-3


def test_deterministic():
    ch = build_symmetric(SymmetricParams(100, alpha=0.7, beta_s=0.2))
    a = maximize(ch, "thm2a", OptimizerConfig(restarts=3, seed=5))
    b = maximize(ch, "thm2a", OptimizerConfig(restarts=3, seed=5))
    assert a.inband_bits == b.inband_bits
    assert np.array_equal(a.Q_star.Q, b.Q_star.Q)


def test_report_fields():
    r = maximize(decoupled(), "cut_sum", FAST, default_budgets(decoupled()))
    assert isinstance(r, BoundReport)
    d = r.as_dict()
    assert d["total_bits"] == d["inband_bits"] + d["oob_budget_bits"]
    assert set(d["optimizer_trace"]) >= {"restarts", "iterations", "best_per_restart"}


def test_mimo_value_identity():
    assert mimo_value(np.eye(2), np.eye(2)) == pytest.approx(2.0)


def test_mimo_ultimate_identity():
    H = np.zeros((4, 4))
    H[2, 0] = H[3, 1] = 1
    ch = ChannelParams(2, H, [1, 1, 0, 0], np.eye(4), [0, 0, 0.5, 0.25])
    r = mimo_ultimate(ch, FAST)
    assert r.inband_bits == pytest.approx(2.0, abs=1e-6)
    assert r.oob_budget_bits == pytest.approx(0.75)


def test_mimo_single_user():
    s = 1e4
    H = np.zeros((4, 4))
    H[2, 0] = math.sqrt(s)
    ch = ChannelParams(2, H, [1, 1, 0, 0], np.eye(4), np.zeros(4))
    assert mimo_ultimate(ch, FAST).inband_bits == pytest.approx(math.log2(1 + s), abs=1e-6)


def test_mimo_rank_one_oracle():
    # coherent beamforming: log2(1 + s * (sqrt(P1) + sqrt(P2))**2 * 2)
    s = 100.0
    H = np.zeros((4, 4))
    H[2:, :2] = math.sqrt(s)
    ch = ChannelParams(2, H, [1, 1, 0, 0], np.eye(4), np.zeros(4))
    assert mimo_ultimate(ch, FAST).inband_bits == pytest.approx(math.log2(1 + 8 * s), abs=1e-6)


def test_noise_candidates():
    c = list(noise_candidates(np.eye(4), ((2, 3),), 11))
    assert len(c) == 11
    assert all(np.allclose(S, S.conj().T) for S in c)
    assert list(noise_candidates(np.eye(2), ()))[0].shape == (2, 2)


def test_sum_rate_decoupled():
    s = 30.0
    r = sum_rate_upper(decoupled(s), FAST)
    assert r.headline_bits == pytest.approx(2 * math.log2(1 + s), abs=1e-6)
    assert len(r.candidates) == 13


def test_sum_rate_subset():
    r = sum_rate_upper(decoupled(), FAST, bounds=["cut_sum"])
    assert list(r.candidates) == ["cut_sum"]
    with pytest.raises(ValueError):
        sum_rate_upper(decoupled(), FAST, bounds=["cut_r1a"])


def test_mode_problem_nocoop():
    ch, budgets, cfg = mode_problem(SymmetricParams(100, alpha=0.5), cooperation_mode("no-coop"))
    assert cfg.input_groups == ((0,), (1,), (2,), (3,))
    assert cfg.free_noise == ((2, 3),)
    assert budgets["thm2a"] == 0


def test_nocoop_alpha_half_high_snr():
    snr = 1e8
    ch, b, cfg = mode_problem(SymmetricParams(snr, alpha=0.5), cooperation_mode("no-coop"),
                              OptimizerConfig(restarts=4))
    r = sum_rate_upper(ch, cfg, b)
    assert r.headline_bits / math.log2(1 + snr) == pytest.approx(1.5, abs=0.05)


def test_monotone_in_power():
    rng = np.random.default_rng(2)
    H = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    np.fill_diagonal(H, 0)
    cfg = OptimizerConfig(restarts=1, input_groups=((0,), (1,), (2,), (3,)))
    prev = None
    for p in (0.5, 1.0, 2.0):
        ch = ChannelParams(2, H, [p, 1, 1, 1], np.eye(4), np.zeros(4))
        v = maximize(ch, "thm2b", cfg).total_bits
        assert prev is None or v >= prev - 1e-12
        prev = v


def test_all_degenerate_raises():
    # Y3 is an exact copy of X1 with no noise: every Q makes thm2b degenerate
    H = np.zeros((4, 4))
    H[2, 0] = 1
    Sz = np.eye(4)
    ch = ChannelParams(2, H, [1, 1, 1, 1], Sz, np.zeros(4))
    ch = ch.with_noise(np.diag([1.0, 1.0, 0.0, 1.0]))
    with pytest.raises(DegenerateDistributionError):
        maximize(ch, "cut_r1a", OptimizerConfig(restarts=1, input_groups=((0,), (1,), (2,), (3,))))
