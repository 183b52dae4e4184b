import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtc.channel import (
    EA_HASHING_PMAX,
    DepolarizingChannel,
    binary_entropy,
    bsc_capacity,
    classical_rate,
    db_gap,
    fourary_classical_capacity,
    hashing_bound,
    hashing_limit,
    sample_error,
    sample_symbols,
    symbol_priors,
)


def test_symbol_probs():
    ch = DepolarizingChannel(0.3)
    assert np.allclose(ch.symbol_probs, [0.7, 0.1, 0.1, 0.1])
    assert np.allclose(symbol_priors(ch), ch.symbol_probs)


@pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
def test_invalid_p(p):
    with pytest.raises(ValueError):
        DepolarizingChannel(p)


def test_sampling_frequencies():
    ch = DepolarizingChannel(0.2)
    sym = sample_symbols(ch, 200_000, np.random.default_rng(1))
    freq = np.bincount(sym, minlength=4) / sym.size
    assert np.allclose(freq, ch.symbol_probs, atol=0.005)
    assert sample_error(ch, 7, np.random.default_rng(1)).shape == (14,)


def test_sampling_p0_is_identity():
    assert not sample_symbols(DepolarizingChannel(0.0), 1000, np.random.default_rng(0)).any()


def test_capacity_endpoints():
    assert hashing_bound(0) == 1
    assert bsc_capacity(0.75) == pytest.approx(0.0, abs=1e-15)
    assert fourary_classical_capacity(0) == 1
    assert binary_entropy(0.5) == 1


@given(st.floats(0.0, 1.0))
def test_hashing_is_affine_in_fourary(p):
    assert hashing_bound(p) == pytest.approx(2 * fourary_classical_capacity(p) - 1, abs=1e-12)


def test_hashing_limit_inverts():
    p = hashing_limit(1 / 9)
    assert hashing_bound(p) == pytest.approx(1 / 9, abs=1e-9)
    with pytest.raises(ValueError):
        hashing_limit(2.0)


def test_db_gap():
    assert db_gap(0.35, EA_HASHING_PMAX) == pytest.approx(10 * math.log10(0.35 / 0.3779))
    assert round(abs(db_gap(0.2925, 0.3275)), 1) == 0.5
    with pytest.raises(ValueError):
        db_gap(0, 0.1)


def test_classical_rate():
    assert classical_rate(1 / 9) == pytest.approx(5 / 9)
