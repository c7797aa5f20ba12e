import numpy as np
import pytest
from hypothesis import settings

from coopifc.model import ChannelParams

settings.register_profile("repo", deadline=None, max_examples=60)
settings.load_profile("repo")


def random_psd(rng, n, rank=None, scale=1.0):
    r = n if rank is None else rank
    G = rng.normal(size=(n, 2 * r)) + 1j * rng.normal(size=(n, 2 * r))
    return scale * (G @ G.conj().T) / (2 * r)


def random_noise(rng, n, mix=0.5):
    """Random correlation matrix (unit diagonal)."""
    S = mix * random_psd(rng, n) + np.eye(n)
    d = np.sqrt(np.real(np.diag(S)))
    return S / np.outer(d, d)


def random_channel(rng, K=2, scale=3.0, noise_mix=0.5):
    n = 2 * K
    H = scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    np.fill_diagonal(H, 0)
    P = rng.uniform(0.2, 2.0, n)
    return ChannelParams(K, H, P, random_noise(rng, n, noise_mix), rng.uniform(0, 2, n))


def random_input(rng, ch):
    """Random PSD Q with diag(Q) = P."""
    Q = random_psd(rng, ch.n_nodes)
    d = np.sqrt(np.real(np.diag(Q)) / ch.P)
    return Q / np.outer(d, d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
