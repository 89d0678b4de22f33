import numpy as np
import pytest
from scipy.special import ndtr

from screenmin.distributions.alternative_law import AlternativeLaw
from screenmin.distributions.screening import PairMixture


def _simulate_screenmin(counts, snr, c, alpha, replications, seed, chunk_size=20_000):
    """
    Vectorised Monte Carlo of ScreenMin at a fixed threshold for independent pairs laid out as
    n0 (0,0) rows, n1 rows with only H_i2 false and n2 (1,1) rows, drawn chunk_size replications at a time.
    Returns per replication: familywise error events, share of rejected (1,1) rows and |S|.
    """
    rng = np.random.default_rng(seed)
    n0, n1, n2 = counts
    m = n0 + n1 + n2
    shift1 = np.concatenate([np.zeros(n0 + n1), np.full(n2, snr)])
    shift2 = np.concatenate([np.zeros(n0), np.full(n1 + n2, snr)])
    true_union = np.arange(m) < n0 + n1
    fwer_events, power, n_selected = [], [], []
    for start in range(0, replications, chunk_size):
        size = min(chunk_size, replications - start)
        p1 = ndtr(-(rng.standard_normal((size, m)) + shift1))
        p2 = ndtr(-(rng.standard_normal((size, m)) + shift2))
        pmin, pmax = np.minimum(p1, p2), np.maximum(p1, p2)
        selected = pmin <= c
        chunk_selected = selected.sum(axis=1)
        rejected = selected & (pmax * chunk_selected[:, None] <= alpha)
        fwer_events.append(rejected[:, true_union].any(axis=1))
        power.append(rejected[:, ~true_union].mean(axis=1) if n2 > 0 else np.full(size, np.nan))
        n_selected.append(chunk_selected)
    return np.concatenate(fwer_events), np.concatenate(power), np.concatenate(n_selected)


@pytest.fixture
def simulate_screenmin():
    return _simulate_screenmin


@pytest.fixture
def sparse_signal_mixture():
    return PairMixture(m=100, pi0=0.7, pi1=0.25, pi2=0.05, law=AlternativeLaw(snr=2.0))


@pytest.fixture
def one_false_mixture():
    return PairMixture(m=10, pi0=0.0, pi1=1.0, pi2=0.0, law=AlternativeLaw(snr=2.0))


@pytest.fixture
def navy_csv_path():
    return "data/navy_colorectal_adenoma.csv"
