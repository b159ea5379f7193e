"""Latin hypercube sampling and partial rank correlation sensitivity.

The global sensitivity pipeline draws a stratified sample over per-
parameter intervals, integrates the system to a snapshot time for every
sample row, and computes the partial rank correlation coefficient (PRCC)
of every compartment against every parameter: rank-transform all columns,
regress out the other parameters' ranks from both the target parameter's
ranks and the output's ranks, and correlate the two residual vectors.

The sample matrix is generated sequentially from the seed before any model
evaluation, so results are independent of evaluation parallelism.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .integrate import DEFAULT_DT, NonfiniteStateError, final_state
from .model import COMPARTMENTS, PARAM_NAMES, Parameters, validate_params

GSA_DEFAULT_DT = 0.5  # snapshot runs are long; 0.5 yr is still ~30x below the fastest timescale


@dataclass(frozen=True)
class SpaceRow:
    name: str
    baseline: float
    lower: float
    upper: float


@dataclass(frozen=True)
class ParameterSpace:
    """Per-parameter sampling intervals, one row per model parameter."""

    rows: tuple[SpaceRow, ...]

    def __post_init__(self):
        names = tuple(r.name for r in self.rows)
        if names != PARAM_NAMES:
            raise ValueError(f"space rows must cover parameters in order {PARAM_NAMES}")
        for r in self.rows:
            if not r.lower < r.upper:
                raise ValueError(f"{r.name}: lower bound must be below upper bound")
            if not (r.lower <= r.baseline <= r.upper):
                raise ValueError(f"{r.name}: baseline {r.baseline!r} outside interval")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.rows)

    def lowers(self) -> np.ndarray:
        return np.array([r.lower for r in self.rows])

    def uppers(self) -> np.ndarray:
        return np.array([r.upper for r in self.rows])


def default_parameter_space() -> ParameterSpace:
    """Bundled sampling intervals (mostly +/-10% around the baselines)."""
    return ParameterSpace(
        rows=(
            SpaceRow("alpha", 1.68, 1.521, 1.848),
            SpaceRow("phi", 0.008, 0.0072, 0.0088),
            SpaceRow("beta", 0.0003, 0.00027, 0.00033),
            SpaceRow("epsilon", 0.0008, 0.00072, 0.00088),
            SpaceRow("p", 0.016, 0.0144, 0.0176),
            SpaceRow("eta", 0.000001, 0.0000009, 0.0000011),
            SpaceRow("mu", 0.02145, 0.019305, 0.023595),
            SpaceRow("omega", 0.06133, 0.055197, 0.067463),
            SpaceRow("bigK", 11000.0, 10000.0, 12000.0),
            SpaceRow("theta", 0.0004, 0.00036, 0.00044),
            SpaceRow("sigma", 0.01, 0.009, 0.011),
            SpaceRow("s", 0.00529, 0.004761, 0.005819),
            SpaceRow("bigM", 1720.0, 1542.0, 1892.0),
            SpaceRow("nu", 0.001, 0.0009, 0.0011),
            SpaceRow("pi", 0.00005, 0.000045, 0.000055),
        )
    )


@dataclass(frozen=True)
class SampleMatrix:
    values: np.ndarray  # (n_samples, n_parameters)
    seed: int
    space: ParameterSpace

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]


def lhs_sample(space: ParameterSpace, n: int, seed: int) -> SampleMatrix:
    """Stratified sample: one point per equal-width stratum per column.

    Each column independently partitions its interval into n strata, draws
    one uniform point per stratum and applies a seeded permutation; columns
    use independent permutations.
    """
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    rng = np.random.default_rng(seed)
    k = len(space.rows)
    values = np.empty((n, k), dtype=float)
    for j, row in enumerate(space.rows):
        offsets = rng.random(n)
        points = row.lower + (row.upper - row.lower) * (np.arange(n) + offsets) / n
        values[:, j] = points[rng.permutation(n)]
    return SampleMatrix(values=values, seed=seed, space=space)


def rank_transform(values) -> np.ndarray:
    """Ranks 1..n with ties receiving the average of their rank range."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="mergesort")
    ranks = np.empty(v.shape[0], dtype=float)
    sorted_v = v[order]
    i = 0
    n = v.shape[0]
    while i < n:
        j = i
        while j + 1 < n and sorted_v[j + 1] == sorted_v[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _ols_residual(target: np.ndarray, design: np.ndarray) -> np.ndarray:
    # normal equations on a 15-column design; tiny fixed-size solve
    gram = design.T @ design
    coef = np.linalg.solve(gram, design.T @ target)
    return target - design @ coef


def prcc(samples, y, names=None) -> np.ndarray:
    """PRCC of each sample column against output vector ``y``.

    ``samples`` may be a :class:`SampleMatrix` or a plain (n, k) array.
    Raises ValueError on a degenerate (constant) column or if the sample
    count does not exceed n_parameters + 2.
    """
    if isinstance(samples, SampleMatrix):
        if names is None:
            names = samples.space.names
        samples = samples.values
    x = np.asarray(samples, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = x.shape
    if y.shape != (n,):
        raise ValueError(f"outputs must be a length-{n} vector, got shape {y.shape}")
    if n <= k + 2:
        raise ValueError(f"need more than {k + 2} samples for {k} parameters, got {n}")
    names = tuple(names) if names is not None else tuple(str(j) for j in range(k))
    ranked = np.empty_like(x)
    for j in range(k):
        if np.all(x[:, j] == x[0, j]):
            raise ValueError(f"degenerate column {names[j]!r}: zero rank variance")
        ranked[:, j] = rank_transform(x[:, j])
    if np.all(y == y[0]):
        raise ValueError("degenerate column 'output': zero rank variance")
    ranked_y = rank_transform(y)

    intercept = np.ones((n, 1))
    out = np.empty(k, dtype=float)
    for j in range(k):
        others = np.delete(ranked, j, axis=1)
        design = np.hstack([intercept, others])
        rx = _ols_residual(ranked[:, j], design)
        ry = _ols_residual(ranked_y, design)
        denom = np.sqrt(np.sum(rx * rx) * np.sum(ry * ry))
        out[j] = float(np.sum(rx * ry) / denom)
    return out


@dataclass(frozen=True)
class GsaReport:
    """PRCC of every (parameter, compartment) pair at the snapshot time."""

    prcc: np.ndarray  # (n_parameters, 4)
    param_names: tuple[str, ...]
    compartments: tuple[str, ...]
    t_snap: float
    n_samples: int
    n_failed: int
    seed: int

    def value(self, param: str, compartment: str) -> float:
        return float(
            self.prcc[self.param_names.index(param), self.compartments.index(compartment)]
        )


def run_gsa(
    space: ParameterSpace,
    n: int,
    t_snap: float,
    x0,
    dt: float = GSA_DEFAULT_DT,
    seed: int = 0,
    jobs: int = 1,
) -> GsaReport:
    """Full LHS -> integrate -> PRCC pipeline.

    Sample rows whose integration blows up are excluded and counted; more
    than 5% failures aborts.  Evaluations may run on ``jobs`` threads; the
    report is identical regardless of parallelism.
    """
    if n <= len(PARAM_NAMES) + 2:
        raise ValueError(
            f"need more than {len(PARAM_NAMES) + 2} samples for PRCC, got {n}"
        )
    matrix = lhs_sample(space, n, seed)
    outputs = np.full((n, 4), np.nan)
    failed = np.zeros(n, dtype=bool)

    def evaluate(i: int) -> None:
        params = validate_params(Parameters.from_values(matrix.values[i]))
        try:
            outputs[i] = final_state(params, x0, t_snap, dt)
        except NonfiniteStateError:
            failed[i] = True

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(evaluate, range(n)))
    else:
        for i in range(n):
            evaluate(i)

    n_failed = int(failed.sum())
    if n_failed > 0.05 * n:
        raise RuntimeError(
            f"{n_failed}/{n} sensitivity samples failed to integrate (> 5% limit)"
        )
    keep = ~failed
    x = matrix.values[keep]
    values = np.empty((len(PARAM_NAMES), 4), dtype=float)
    for m, _comp in enumerate(COMPARTMENTS):
        values[:, m] = prcc(x, outputs[keep, m], names=space.names)
    return GsaReport(
        prcc=values,
        param_names=space.names,
        compartments=COMPARTMENTS,
        t_snap=float(t_snap),
        n_samples=n,
        n_failed=n_failed,
        seed=seed,
    )
