import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from roughdens.drivers import (GAUSSIAN_LANE, STABLE_LANE, SeedSpec, StableDriverSpec, _to_unit,
                               _uniform_pairs, _uniform_pairs_reference, gaussian_increments,
                               make_stream, normal_block, philox4x32, stable_block,
                               stable_increments, symmetric_stable_cms)
from roughdens.errors import ParameterError

U64 = st.integers(0, 2**64 - 1)


# published Philox4x32-10 known-answer vectors
@pytest.mark.parametrize("ctr,key,expected", [
    ((0, 0, 0, 0), (0, 0), (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    ((0xFFFFFFFF,) * 4, (0xFFFFFFFF,) * 2, (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD)),
    ((0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344), (0xA4093822, 0x299F31D0),
     (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1)),
])
def test_philox_known_answers(ctr, key, expected):
    out = philox4x32(*ctr, *key)
    assert tuple(int(w) for w in out) == expected


@given(seed=U64, sid=U64, lane=st.sampled_from([GAUSSIAN_LANE, STABLE_LANE]),
       first=st.integers(0, 2**40), n=st.integers(1, 9))
def test_jitted_kernel_matches_reference(seed, sid, lane, first, n):
    a = _uniform_pairs(seed, [sid], lane, first, n)
    b = _uniform_pairs_reference(seed, [sid], lane, first, n)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_uniforms_lie_in_open_interval():
    assert _to_unit(np.array([0], dtype=np.uint64))[0] > 0
    assert _to_unit(np.array([2**64 - 1], dtype=np.uint64))[0] < 1


def test_normal_block_is_box_muller_of_reference_words():
    u1, u2 = _uniform_pairs_reference(0, [0], GAUSSIAN_LANE, 0, 2)
    r = np.sqrt(-2 * np.log(u1[0]))
    expect = [r[0] * math.cos(2 * math.pi * u2[0, 0]), r[0] * math.sin(2 * math.pi * u2[0, 0]),
              r[1] * math.cos(2 * math.pi * u2[0, 1]), r[1] * math.sin(2 * math.pi * u2[0, 1])]
    np.testing.assert_allclose(normal_block(0, [0], 0, 4)[0], expect, rtol=1e-15)


def test_golden_variates():
    # frozen so that any change of the generator is caught
    np.testing.assert_allclose(normal_block(0, [0], 0, 4)[0],
                               [-0.12151798, -1.35003266, -0.08187421, -0.22270906], atol=1e-8)
    np.testing.assert_allclose(stable_block(7, [3], 0, 3, 1.5)[0],
                               [-0.2724736, 0.21799835, -0.58534895], atol=1e-8)


@given(seed=U64, start=st.integers(0, 50), count=st.integers(0, 30))
def test_normal_block_windows_are_consistent(seed, start, count):
    full = normal_block(seed, [5], 0, start + count)
    np.testing.assert_array_equal(normal_block(seed, [5], start, count), full[:, start:])


def test_same_seed_same_variates_and_seed_sensitivity():
    a = gaussian_increments(make_stream(SeedSpec(11, 2)), 1000, 1, 1.0)
    b = gaussian_increments(make_stream(SeedSpec(11, 2)), 1000, 1, 1.0)
    c = gaussian_increments(make_stream(SeedSpec(12, 2)), 1000, 1, 1.0)
    assert np.array_equal(a, b)
    assert a[0, 0] != c[0, 0]


def test_stream_independence():
    n = 10**5
    a = gaussian_increments(make_stream(SeedSpec(3, 0)), n, 1, 1.0)[:, 0]
    b = gaussian_increments(make_stream(SeedSpec(3, 1)), n, 1, 1.0)[:, 0]
    assert abs(np.corrcoef(a, b)[0, 1]) < 4 / math.sqrt(n)


def test_gaussian_moments():
    z = gaussian_increments(make_stream(SeedSpec(1)), 10**6, 1, 1.0)
    assert abs(z.mean()) < 4e-3
    assert abs(z.var() - 1) < 1e-2


def test_gaussian_dt_scaling_and_empty():
    s = make_stream(SeedSpec(2))
    z1 = gaussian_increments(s, 10**5, 1, 1.0)
    z4 = gaussian_increments(s, 10**5, 1, 0.25)
    np.testing.assert_allclose(z4, 0.5 * z1, rtol=1e-15)
    assert gaussian_increments(s, 0, 3, 1.0).shape == (0, 3)
    with pytest.raises(ParameterError):
        gaussian_increments(s, 1, 1, 0.0)


def test_stream_offset_advances():
    s = make_stream(SeedSpec(4))
    z = gaussian_increments(s, 6, 1, 1.0)[:, 0]
    tail = gaussian_increments(s.advanced(2), 4, 1, 1.0)[:, 0]
    np.testing.assert_array_equal(tail, z[2:])


@pytest.mark.parametrize("seed", range(10))
def test_stable_laws_ks_panel(seed):
    n = 10**5
    s = make_stream(SeedSpec(100 + seed))
    cauchy = stable_increments(s, n, StableDriverSpec(1.0), 1.0)
    gauss = stable_increments(s, n, StableDriverSpec(2.0), 1.0)
    assert stats.kstest(cauchy, stats.cauchy.cdf).statistic < 0.01
    assert stats.kstest(gauss, stats.norm(scale=math.sqrt(2)).cdf).statistic < 0.01


def test_stable_self_similarity():
    n = 10**5
    spec = StableDriverSpec(1.5)
    a = stable_increments(make_stream(SeedSpec(8, 0)), n, spec, 0.3)
    b = 0.3 ** (1 / 1.5) * stable_increments(make_stream(SeedSpec(8, 10**6)), n, spec, 1.0)
    assert stats.ks_2samp(a, b).statistic < 0.02


def test_stable_scale_parameter():
    s = make_stream(SeedSpec(9))
    a = stable_increments(s, 1000, StableDriverSpec(1.5, 2.0), 1.0)
    b = stable_increments(s, 1000, StableDriverSpec(1.5, 1.0), 1.0)
    np.testing.assert_allclose(a, 2 * b, rtol=1e-14)


@given(alpha=st.floats(0.2, 2.0), u1=st.floats(1e-9, 1 - 1e-9), u2=st.floats(1e-9, 1 - 1e-9))
def test_cms_is_odd_and_finite(alpha, u1, u2):
    x = symmetric_stable_cms(alpha, np.array([u1]), np.array([u2]))
    y = symmetric_stable_cms(alpha, np.array([1 - u1]), np.array([u2]))
    assert np.isfinite(x).all()
    np.testing.assert_allclose(x, -y, rtol=1e-5, atol=1e-12)


def test_invalid_specs():
    with pytest.raises(ParameterError):
        StableDriverSpec(0.0)
    with pytest.raises(ParameterError):
        StableDriverSpec(2.5)
    with pytest.raises(ParameterError):
        StableDriverSpec(1.5, -1.0)
    with pytest.raises(ParameterError):
        SeedSpec(-1)
    with pytest.raises(ParameterError):
        SeedSpec(2**64)
    with pytest.raises(ParameterError):
        StableDriverSpec(0.9).require_levy_regime()
    with pytest.raises(ParameterError):
        stable_increments(make_stream(SeedSpec(1)), 3, "cauchy", 1.0)
