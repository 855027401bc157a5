import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from reflectsim import (
    DensityGrid,
    ParameterError,
    kde_gaussian,
    ks_critical_value,
    ks_two_sample,
    mc_summary,
    substream,
)


def test_ks_identical_samples():
    assert ks_two_sample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0


def test_ks_disjoint_supports():
    assert ks_two_sample([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]) == 1.0


def test_ks_hand_example():
    assert ks_two_sample([1.0, 2.0], [1.5]) == pytest.approx(0.5)


def test_ks_empty_error():
    with pytest.raises(ParameterError):
        ks_two_sample([], [1.0])


@given(
    a=st.lists(st.floats(-50, 50), min_size=1, max_size=60),
    b=st.lists(st.floats(-50, 50), min_size=1, max_size=60),
)
@settings(max_examples=150, deadline=None)
def test_ks_symmetry_and_scipy_oracle(a, b):
    ours = ks_two_sample(a, b)
    assert ours == ks_two_sample(b, a)
    want = scipy.stats.ks_2samp(a, b, method="asymp").statistic
    assert ours == pytest.approx(want, abs=1e-12)


# Values are quantized to a 1e-3 grid so the strictly increasing transform
# cannot collapse distinct inputs to one float (which would create ties).
_grid_floats = st.floats(-5, 5).map(lambda v: round(v, 3))


@given(
    a=st.lists(_grid_floats, min_size=2, max_size=40),
    b=st.lists(_grid_floats, min_size=2, max_size=40),
)
@settings(max_examples=100, deadline=None)
def test_ks_monotone_transform_invariance(a, b):
    transform = lambda x: np.exp(np.asarray(x) / 3.0) + np.asarray(x)
    assert ks_two_sample(a, b) == pytest.approx(
        ks_two_sample(transform(a), transform(b)), abs=1e-12
    )


def test_ks_critical_value_one_percent():
    got = ks_critical_value(50000, 50000, 0.01)
    assert got == pytest.approx(1.628 * math.sqrt(2.0 / 50000), abs=1e-4)
    assert got == pytest.approx(0.0103, abs=1e-4)


def test_kde_single_point_is_kernel_bump():
    h = 0.25
    x0 = 1.5
    grid = np.linspace(0.0, 3.0, 101)
    density = kde_gaussian([x0], bandwidth=h, grid=grid)
    want = np.exp(-0.5 * ((grid - x0) / h) ** 2) / (h * math.sqrt(2 * math.pi))
    assert np.allclose(density.values, want, rtol=1e-12)


def test_kde_symmetric_samples_symmetric_density():
    grid = np.linspace(-3.0, 3.0, 257)
    density = kde_gaussian([-1.0, 1.0], bandwidth=0.5, grid=grid)
    assert np.all(np.abs(density.values - density.values[::-1]) <= 1e-12)


def test_kde_integral_near_one():
    g = substream(31, 0)
    density = kde_gaussian(g.standard_normal(10000))
    assert density.trapezoid_mass() == pytest.approx(1.0, abs=0.01)


def test_kde_default_grid_spans_four_bandwidths():
    g = substream(32, 0)
    x = g.standard_normal(500)
    density = kde_gaussian(x)
    from reflectsim.stats import silverman_bandwidth

    h = silverman_bandwidth(x)
    assert density.points[0] == pytest.approx(x.min() - 4 * h)
    assert density.points[-1] == pytest.approx(x.max() + 4 * h)
    assert density.points.size == 512
    assert np.all(density.values >= 0.0)


def test_kde_degenerate_sample_error():
    with pytest.raises(ParameterError):
        kde_gaussian([2.0, 2.0, 2.0])
    with pytest.raises(ParameterError):
        kde_gaussian([1.0, 2.0], bandwidth=0.0)
    with pytest.raises(ParameterError):
        kde_gaussian([])


def test_density_grid_validation():
    with pytest.raises(ParameterError):
        DensityGrid(np.array([0.0, 0.0, 1.0]), np.array([1.0, 1.0, 1.0]))
    with pytest.raises(ParameterError):
        DensityGrid(np.array([0.0, 1.0]), np.array([1.0]))


def test_density_grid_mass_invariant_various_shapes():
    g = substream(33, 0)
    for sample in (g.standard_normal(5000), g.standard_exponential(5000)):
        mass = kde_gaussian(sample).trapezoid_mass()
        assert 0.99 <= mass <= 1.01


def test_mc_summary_constant():
    s = mc_summary([1.0, 1.0, 1.0, 1.0])
    assert (s.mean, s.sd, s.standard_error) == (1.0, 0.0, 0.0)
    assert s.count == 4


def test_mc_summary_two_points():
    s = mc_summary([0.0, 2.0])
    assert s.mean == 1.0
    assert s.sd == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert s.standard_error == pytest.approx(1.0, rel=1e-15)


def test_mc_summary_nearest_rank_median():
    assert mc_summary([3.0, 1.0, 2.0]).median == 2.0
    s = mc_summary([5.0, 1.0, 4.0, 2.0, 3.0])
    assert s.q01 == 1.0
    assert s.q99 == 5.0


def test_mc_summary_empty():
    with pytest.raises(ParameterError):
        mc_summary([])
