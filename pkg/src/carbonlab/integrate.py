"""Fixed-step RK4 integration, steady-state detection and parameter sweeps.

Fixed step (rather than adaptive) keeps every output bit-reproducible
across runs and across the compiled/pure kernel backends; the system is
non-stiff at the bundled parameter scales (rates between ~1e-3/yr and
~1e-1/yr), so the default dt = 0.05 yr is far inside the stability region.

Any component driven below zero by a step is clamped to zero and the event
counted; the vector field itself is never altered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .model import PARAM_NAMES, Parameters, as_state, validate_params

DEFAULT_DT = 0.05


class NonfiniteStateError(RuntimeError):
    """The integrator produced NaN or infinity."""

    def __init__(self, step: int):
        self.step = step
        super().__init__(f"nonfinite state at step {step}")


@dataclass(frozen=True)
class Trajectory:
    """Time grid plus the state sequence produced by the integrator."""

    t: np.ndarray
    states: np.ndarray
    params: Parameters
    clamp_events: int

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def component(self, name: str) -> np.ndarray:
        from .model import COMPARTMENTS

        return self.states[:, COMPARTMENTS.index(name)]


def _n_steps(t_end: float, dt: float) -> int:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if t_end < dt:
        raise ValueError(f"t_end must be at least dt, got t_end={t_end!r}, dt={dt!r}")
    return int(round(t_end / dt))


def integrate_rk4(params: Parameters, x0, t_end: float, dt: float = DEFAULT_DT) -> Trajectory:
    """Integrate from ``x0`` over [0, t_end] with step ``dt``.

    Raises :class:`NonfiniteStateError` if the state blows up.
    """
    x0 = as_state(x0)
    if np.any(x0 < 0):
        raise ValueError(f"initial state must be nonnegative, got {x0!r}")
    n = _n_steps(t_end, dt)
    q = params.as_array()
    out = np.empty((n + 1, 4), dtype=float)
    clamps, bad = kernels.rk4_path(q, x0, n, dt, out)
    if bad >= 0:
        raise NonfiniteStateError(int(bad))
    t = np.arange(n + 1, dtype=float) * dt
    return Trajectory(t=t, states=out, params=params, clamp_events=int(clamps))


def final_state(params: Parameters, x0, t_end: float, dt: float = DEFAULT_DT) -> np.ndarray:
    """Like :func:`integrate_rk4` but without storing the path."""
    x0 = as_state(x0)
    n = _n_steps(t_end, dt)
    q = params.as_array()
    c, g, f, nn, _clamps, bad = kernels.rk4_final(q, x0, n, dt)
    if bad >= 0:
        raise NonfiniteStateError(int(bad))
    return np.array([c, g, f, nn])


def steady_state(
    params: Parameters,
    x0,
    tol: float = 1e-9,
    max_t: float = 50000.0,
    dt: float = DEFAULT_DT,
) -> tuple[np.ndarray, bool]:
    """Integrate until the component-relative residual falls below ``tol``.

    The residual is max_i |f_i| / max(1, |x_i|), checked at every node, so
    an exact equilibrium (stable or not) is returned immediately.  Returns
    the last state and a convergence flag; the flag is False when ``max_t``
    was exhausted first.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    x0 = as_state(x0)
    max_steps = _n_steps(max_t, dt)
    q = params.as_array()
    c, g, f, n, _steps, converged, _clamps, bad = kernels.steady_state_run(
        q, x0, dt, tol, max_steps
    )
    if bad >= 0:
        raise NonfiniteStateError(int(bad))
    return np.array([c, g, f, n]), bool(converged)


def scenario_sweep(
    params: Parameters,
    param_name: str,
    values,
    x0,
    t_end: float,
    dt: float = DEFAULT_DT,
) -> list[Trajectory]:
    """One trajectory per value of ``param_name``, everything else fixed.

    Output order matches the input value order.
    """
    if param_name not in PARAM_NAMES:
        raise ValueError(
            f"unknown parameter {param_name!r}; valid names: {', '.join(PARAM_NAMES)}"
        )
    runs = []
    for value in values:
        swept = validate_params(params.replace(**{param_name: float(value)}))
        runs.append(integrate_rk4(swept, x0, t_end, dt))
    return runs
