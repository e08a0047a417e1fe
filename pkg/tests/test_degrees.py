import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from bwfpp.degrees import (DegreeSequence, Explicit, IIDFromPMF, Regular, build_degree_sequence,
                           degree_stats, load_degrees, parse_degree_spec, pmf_stats, spec_stats,
                           validate_regularity)

degree_lists = st.lists(st.integers(0, 12), min_size=1, max_size=40).filter(lambda d: sum(d) > 0)


def test_regular_sequence(rng):
    ds = build_degree_sequence(Regular(3), 4, rng)
    assert ds.degrees.tolist() == [3, 3, 3, 3]
    assert ds.parity_adjusted is None


def test_regular_odd_total_rejected(rng):
    with pytest.raises(ValueError, match="odd"):
        build_degree_sequence(Regular(3), 5, rng)


def test_iid_pmf_concentration():
    # P(Bin(1000, 1/2) / 1000 outside [0.44, 0.56]) is about 1.6e-4
    tail = 2 * stats.binom.cdf(439, 1000, 0.5)
    assert tail < 2e-4
    for seed in range(5):
        ds = build_degree_sequence(IIDFromPMF({3: 0.5, 4: 0.5}), 1000, np.random.default_rng(seed))
        assert ds.total % 2 == 0
        assert 0.44 <= np.mean(ds.degrees == 3) <= 0.56


def test_pmf_must_sum_to_one(rng):
    with pytest.raises(ValueError, match="sums"):
        build_degree_sequence(IIDFromPMF({3: 0.5, 4: 0.4}), 10, rng)
    with pytest.raises(ValueError):
        build_degree_sequence(IIDFromPMF({}), 10, rng)
    with pytest.raises(ValueError):
        build_degree_sequence(None, 10, rng)


def test_odd_explicit_sum_bumps_a_maximal_node(rng):
    ds = build_degree_sequence(Explicit((3, 5, 3, 4)), 4, rng)
    assert ds.degrees.tolist() == [3, 6, 3, 4]
    assert ds.parity_adjusted == 1


def test_stats_regular():
    s = degree_stats(DegreeSequence.of([3, 3, 3, 3]))
    assert (s.mu, s.nu, s.min_degree) == (3.0, 2.0, 3)


def test_stats_hand_computed():
    # sum k(k-1) = 6+6+6+20 = 38, sum k = 14
    s = degree_stats(DegreeSequence.of([3, 3, 3, 5]))
    assert s.mu == 3.5
    assert s.nu == pytest.approx(38 / 14, abs=1e-15)
    assert s.nu == pytest.approx(2.714286, abs=1e-6)


def test_stats_all_zero():
    with pytest.raises(ValueError):
        degree_stats(DegreeSequence.of([0, 0]))


def test_validation_reports():
    assert validate_regularity(DegreeSequence.of([3, 3, 3, 3]), 3, 1.0, 100).ok
    r = validate_regularity(DegreeSequence.of([2, 3, 3, 4]), 3, 1.0, 100)
    assert not r.min_degree_ok and r.moment_ok
    r = validate_regularity(DegreeSequence.of([3, 3, 3, 3]), 3, 1.0, 10)
    assert r.moment == 27.0 and not r.moment_ok and r.min_degree_ok


@given(st.integers(0, 30), st.integers(1, 50))
def test_regular_stats_property(delta, half):
    n = 2 * half
    ds = build_degree_sequence(Regular(delta), n, np.random.default_rng(0))
    if delta == 0:
        return
    s = degree_stats(ds)
    assert s.mu == delta and s.nu == delta - 1


@given(degree_lists, st.randoms(use_true_random=False))
def test_nu_permutation_invariant_and_bounded(degrees, r):
    shuffled = list(degrees)
    r.shuffle(shuffled)
    a = degree_stats(DegreeSequence.of(degrees))
    b = degree_stats(DegreeSequence.of(shuffled))
    assert a.nu == b.nu
    assert a.nu <= max(degrees) - 1


@given(st.lists(st.integers(0, 9), min_size=1, max_size=30), st.integers(0, 2**32 - 1))
def test_build_always_even(degrees, seed):
    rng = np.random.default_rng(seed)
    ds = build_degree_sequence(Explicit(tuple(degrees)), len(degrees), rng)
    assert ds.total % 2 == 0
    pmf = {k: 1 / len(set(degrees)) for k in set(degrees)}
    if abs(sum(pmf.values()) - 1) <= 1e-9:
        assert build_degree_sequence(IIDFromPMF(pmf), 25, rng).total % 2 == 0


def test_spec_parsing_and_files(tmp_path):
    f = tmp_path / "deg.txt"
    f.write_text("3\n3\n# comment\n4\n\n4\n")
    assert load_degrees(f) == (3, 3, 4, 4)
    assert parse_degree_spec({"file": str(f)}) == Explicit((3, 3, 4, 4))
    assert parse_degree_spec({"regular": 3}) == Regular(3)
    assert parse_degree_spec({"pmf": {"3": 0.5, "4": 0.5}}) == IIDFromPMF({3: 0.5, 4: 0.5})
    with pytest.raises(ValueError):
        parse_degree_spec({"regular": 3, "pmf": {}})


def test_spec_stats_uses_limit_law():
    s = spec_stats(IIDFromPMF({3: 0.5, 4: 0.5}))
    assert s.nu == pytest.approx((0.5 * 6 + 0.5 * 12) / 3.5)
    assert s.min_degree == 3
    assert pmf_stats({3: 1.0}, eps=1.0).moment_2_plus_eps == 27.0
    assert math.isclose(spec_stats(Regular(4)).nu, 3.0)
