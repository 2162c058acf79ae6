from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from autensemble.bp import Priors
from autensemble.gf2 import BinaryMatrix
from autensemble.osd import OsdConfig, SyndromeNotInColumnSpace, osd_decode, prior_metric, reliability_order, sweep_patterns

from conftest import gf2_rank_oracle


@st.composite
def osd_instances(draw, m=6, n=12):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    H = rng.integers(0, 2, (m, n), dtype=np.uint8)
    e = (rng.random(n) < 0.3).astype(np.uint8)
    llr = rng.normal(0, 3, n)
    p = rng.uniform(0.01, 0.3, n)
    return H, (H @ e) % 2, llr, Priors(p)


def greedy_information_set(H: np.ndarray, order: np.ndarray) -> list[int]:
    chosen: list[int] = []
    for j in order:
        if gf2_rank_oracle(H[:, chosen + [int(j)]]) > len(chosen):
            chosen.append(int(j))
    return chosen


@given(osd_instances(), st.integers(0, 6))
def test_output_satisfies_syndrome(inst, lam):
    H, s, llr, pri = inst
    c = osd_decode(BinaryMatrix.from_array(H), llr, pri, s, OsdConfig(lam))
    assert np.array_equal((H @ c) % 2, s)


@given(osd_instances(), st.integers(1, 8))
def test_metric_monotone_in_order(inst, lam):
    H, s, llr, pri = inst
    Hb = BinaryMatrix.from_array(H)
    c0 = osd_decode(Hb, llr, pri, s, OsdConfig(0))
    cl = osd_decode(Hb, llr, pri, s, OsdConfig(lam))
    assert prior_metric(cl, pri) <= prior_metric(c0, pri) + 1e-12


@pytest.mark.parametrize("seed", range(25))
def test_osd0_matches_brute_force_oracle(seed):
    rng = np.random.default_rng(seed)
    while True:
        H = rng.integers(0, 2, (10, 20), dtype=np.uint8)
        if gf2_rank_oracle(H) == 10:
            break
    e = (rng.random(20) < 0.2).astype(np.uint8)
    s = (H @ e) % 2
    llr = rng.normal(0, 2, 20)
    info = greedy_information_set(H, np.lexsort((np.arange(20), llr)))
    expect = None
    for bits in product((0, 1), repeat=10):
        c = np.zeros(20, dtype=np.uint8)
        c[info] = bits
        if np.array_equal((H @ c) % 2, s):
            expect = c
            break
    got = osd_decode(BinaryMatrix.from_array(H), llr, Priors.uniform(20, 0.1), s)
    assert np.array_equal(got, expect)


def test_zero_syndrome_gives_zero():
    H = BinaryMatrix.from_array([[1, 1, 0], [0, 1, 1]])
    for llr in ([1.0, 2.0, 3.0], [-1.0, 0.5, -4.0]):
        c = osd_decode(H, llr, Priors.uniform(3, 0.1), np.zeros(2, dtype=np.uint8))
        assert not c.any()


def test_small_example():
    H = BinaryMatrix.from_array([[1, 1, 0], [0, 1, 1]])
    c = osd_decode(H, [-3.0, 2.0, 2.0], Priors.uniform(3, 0.1), np.array([1, 0], dtype=np.uint8))
    assert c.tolist() == [1, 0, 0]


def test_order_zero_is_lambda_zero():
    rng = np.random.default_rng(1)
    for _ in range(20):
        H = rng.integers(0, 2, (5, 10), dtype=np.uint8)
        s = (H @ rng.integers(0, 2, 10)) % 2
        llr = rng.normal(size=10)
        a = osd_decode(BinaryMatrix.from_array(H), llr, Priors.uniform(10, 0.1), s)
        b = osd_decode(BinaryMatrix.from_array(H), llr, Priors.uniform(10, 0.1), s, OsdConfig(order=0))
        assert np.array_equal(a, b)


def test_outside_column_space():
    H = BinaryMatrix.from_array([[1, 1], [1, 1]])
    with pytest.raises(SyndromeNotInColumnSpace):
        osd_decode(H, [1.0, 1.0], Priors.uniform(2, 0.1), np.array([1, 0], dtype=np.uint8))


def test_reliability_ties_by_index():
    assert reliability_order([0.5, -1.0, 0.5, -1.0]).tolist() == [1, 3, 0, 2]


def test_sweep_patterns():
    pats = sweep_patterns(np.array([7, 3, 5, 9]), 4)
    assert pats[:4] == [(7,), (3,), (5,), (9,)]
    assert pats[4:] == [(7, 3)]
    assert sweep_patterns(np.array([1, 2]), 0) == []
    assert len(sweep_patterns(np.arange(10), 6)) == 6 + 3


def test_config_validation():
    with pytest.raises(ValueError):
        OsdConfig(-1)
    with pytest.raises(ValueError):
        OsdConfig(0, "exhaustive")
