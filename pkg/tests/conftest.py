import numpy as np
import pytest

from bellguess import Behavior, Scenario, canonical_chsh, find_pr_box, idx


@pytest.fixture(scope='session')
def s22():
    return Scenario(m=2, k=2)


@pytest.fixture(scope='session')
def s32():
    return Scenario(m=3, k=2)


@pytest.fixture(scope='session')
def ch(s22):
    return canonical_chsh(s22)


@pytest.fixture(scope='session')
def pr_box(s22):
    """P(ab|xy) = 1/2 if a = b for (x, y) != (2, 2) and a != b for (2, 2)."""
    p = np.zeros(s22.dim)
    for x in (1, 2):
        for y in (1, 2):
            for a in (1, 2):
                for b in (1, 2):
                    if (a == b) != (x == y == 2):
                        p[idx(a, b, x, y, s22)] = 0.5
    return Behavior(scenario=s22, p=p)


@pytest.fixture(scope='session')
def ch_pr_box(ch):
    return find_pr_box(ch)


@pytest.fixture(scope='session')
def generated_22(s22):
    """100 labeled [2,2] records from master seed 0; only built by the slow tests that request it."""
    from bellguess import SamplerConfig, generate_dataset
    with pytest.warns(UserWarning, match='Q2 filter accepted'):
        records, _ = generate_dataset(SamplerConfig(scenario=s22, n_samples=100, master_seed=0), n_workers=1,
                                      progress=False)
    return records
