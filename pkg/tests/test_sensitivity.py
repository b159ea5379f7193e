import numpy as np
import pytest

from carbonlab.sensitivity import (
    ParameterSpace,
    SpaceRow,
    default_parameter_space,
    lhs_sample,
    prcc,
    rank_transform,
    run_gsa,
)

X0 = np.array([130.0, 0.121, 1003.0, 80.0])


def _stratum_counts(column, lower, upper, n):
    idx = np.floor((column - lower) / (upper - lower) * n).astype(int)
    idx = np.clip(idx, 0, n - 1)
    return np.bincount(idx, minlength=n)


@pytest.mark.parametrize("n", [4, 100, 500])
def test_lhs_one_point_per_stratum(n):
    space = default_parameter_space()
    matrix = lhs_sample(space, n, seed=3)
    for j, row in enumerate(space.rows):
        counts = _stratum_counts(matrix.values[:, j], row.lower, row.upper, n)
        assert np.all(counts == 1)


def test_lhs_deterministic():
    space = default_parameter_space()
    a = lhs_sample(space, 64, seed=11)
    b = lhs_sample(space, 64, seed=11)
    assert np.array_equal(a.values, b.values)
    c = lhs_sample(space, 64, seed=12)
    assert not np.array_equal(a.values, c.values)


def test_lhs_column_means_near_midpoints():
    space = default_parameter_space()
    matrix = lhs_sample(space, 1000, seed=5)
    for j, row in enumerate(space.rows):
        mid = 0.5 * (row.lower + row.upper)
        assert abs(matrix.values[:, j].mean() - mid) < 0.02 * mid


def test_lhs_rejects_tiny_sample():
    with pytest.raises(ValueError, match="at least 2"):
        lhs_sample(default_parameter_space(), 1, seed=0)


def test_space_validation():
    rows = list(default_parameter_space().rows)
    rows[0] = SpaceRow("alpha", 5.0, 1.0, 2.0)  # baseline outside interval
    with pytest.raises(ValueError, match="alpha"):
        ParameterSpace(rows=tuple(rows))


def test_rank_transform_ties():
    ranks = rank_transform([3.0, 1.0, 3.0, 2.0])
    assert np.array_equal(ranks, [3.5, 1.0, 3.5, 2.0])


def test_prcc_identifies_single_driver(rng):
    n, k = 500, 15
    x = rng.random((n, k))
    y = x[:, 4] ** 3  # rank-monotone in column 4 only
    values = prcc(x, y)
    assert values[4] > 0.99
    mask = np.ones(k, dtype=bool)
    mask[4] = False
    assert np.max(np.abs(values[mask])) < 0.1


def test_prcc_pure_noise(rng):
    n, k = 500, 15
    x = rng.random((n, k))
    y = rng.random(n)
    assert np.max(np.abs(prcc(x, y))) < 0.15


def test_prcc_perfect_copy(rng):
    x = rng.random((200, 15))
    values = prcc(x, x[:, 7].copy())
    assert values[7] == pytest.approx(1.0, abs=1e-10)


def test_prcc_rank_invariance(rng):
    x = rng.random((300, 15)) + 0.5
    y = rng.random(300) + x[:, 2]
    base = prcc(x, y)
    cubed = x.copy()
    cubed[:, 2] = cubed[:, 2] ** 3  # strictly monotone on positive values
    assert np.max(np.abs(prcc(cubed, y) - base)) < 1e-10
    assert np.max(np.abs(prcc(x, y**3) - base)) < 1e-10


def test_prcc_degenerate_column(rng):
    x = rng.random((100, 15))
    x[:, 3] = 0.25
    with pytest.raises(ValueError, match="degenerate column"):
        prcc(x, rng.random(100))


def test_prcc_requires_enough_samples(rng):
    x = rng.random((17, 15))
    with pytest.raises(ValueError, match="more than 17"):
        prcc(x, rng.random(17))


def _prcc_from_scratch(x, y):
    """Independent route: plain double-argsort ranks and lstsq partialing."""
    n, k = x.shape

    def ranks(v):
        out = np.empty(n)
        out[np.argsort(v)] = np.arange(1, n + 1)
        return out

    rx = np.column_stack([ranks(x[:, j]) for j in range(k)])
    ry = ranks(y)
    values = np.empty(k)
    for j in range(k):
        design = np.column_stack([np.ones(n), np.delete(rx, j, axis=1)])
        res_x = rx[:, j] - design @ np.linalg.lstsq(design, rx[:, j], rcond=None)[0]
        res_y = ry - design @ np.linalg.lstsq(design, ry, rcond=None)[0]
        values[j] = np.corrcoef(res_x, res_y)[0, 1]
    return values


def test_prcc_matches_from_scratch_implementation(rng):
    x = rng.random((100, 15))
    y = x @ rng.standard_normal(15) + 0.1 * rng.standard_normal(100)
    assert np.max(np.abs(prcc(x, y) - _prcc_from_scratch(x, y))) < 1e-8


def test_run_gsa_parallelism_identical():
    space = default_parameter_space()
    serial = run_gsa(space, 30, 50.0, X0, dt=0.5, seed=9, jobs=1)
    threaded = run_gsa(space, 30, 50.0, X0, dt=0.5, seed=9, jobs=4)
    assert np.array_equal(serial.prcc, threaded.prcc)
    assert serial.n_failed == threaded.n_failed == 0


def test_run_gsa_rejects_small_sample():
    with pytest.raises(ValueError, match="more than 17"):
        run_gsa(default_parameter_space(), 5, 50.0, X0)


def test_run_gsa_aborts_on_mass_failure():
    # an absurd step size blows up every sample
    with pytest.raises(RuntimeError, match="failed to integrate"):
        run_gsa(default_parameter_space(), 20, 2e9, X0, dt=1e9, seed=0)


def test_run_gsa_gdp_column_structure():
    # dG/dt = mu - epsilon*G involves no other parameter
    report = run_gsa(default_parameter_space(), 120, 2000.0, X0, dt=0.5, seed=2)
    assert report.value("mu", "G") > 0.9
    assert report.value("epsilon", "G") < -0.9
    others = [
        abs(report.value(name, "G"))
        for name in report.param_names
        if name not in ("mu", "epsilon")
    ]
    assert max(others) < 0.3  # looser than the n=500 acceptance bound
