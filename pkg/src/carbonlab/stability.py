"""Local spectra, Routh-Hurwitz test and the Lyapunov global certificate.

The Jacobian's G row is (0, -eps, 0, 0) at any state, so -epsilon is
always an exact eigenvalue.  The remaining spectrum is that of the 3x3
(C, F, N) block, whose characteristic cubic is solved in closed form
(Cardano / trigonometric branch); no iterative eigensolver is involved,
which keeps results deterministic across platforms.

The cubic coefficients A1, A2, A3 are computed numerically from the block
(trace, principal minors, determinant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibria import Equilibrium
from .model import Parameters, RegionBounds, eval_jacobian


@dataclass(frozen=True)
class ConditionEvaluation:
    """A sufficient-condition check: satisfied when lhs < rhs."""

    name: str
    lhs: float
    rhs: float
    satisfied: bool


@dataclass(frozen=True)
class RouthCriterion:
    """Coefficients of the deflated cubic and the margin A1*A2 - A3."""

    a1: float
    a2: float
    a3: float
    margin: float

    @property
    def stable(self) -> bool:
        return self.a1 > 0 and self.a3 > 0 and self.margin > 0


@dataclass(frozen=True)
class StabilityReport:
    equilibrium_kind: str
    eigenvalues: tuple[complex, complex, complex, complex]
    locally_stable: bool
    routh: RouthCriterion | None
    condition_checks: tuple[ConditionEvaluation, ...]


@dataclass(frozen=True)
class GlobalStabilityReport:
    """Evaluation of the sufficient global-stability inequality at E4.

    The weights are pinned to m2 = phi/pi and m1 = nu*m2; the certificate
    holds when max{(eta*K/(m1*omega))*(m1*sigma - c_max)^2,
    (beta-eps)^2/eps} < 2*(p + eta*F4).  The condition is sufficient only:
    certified=False asserts nothing.
    """

    m1: float
    m2: float
    lhs: float
    rhs: float
    certified: bool


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def solve_cubic(a1: float, a2: float, a3: float) -> tuple[complex, complex, complex]:
    """Roots of the monic cubic x^3 + a1*x^2 + a2*x + a3.

    Closed form with a discriminant branch: Cardano for one real root and
    a conjugate pair, the trigonometric method for three real roots.
    """
    shift = a1 / 3.0
    p = a2 - a1 * a1 / 3.0
    q = 2.0 * a1 ** 3 / 27.0 - a1 * a2 / 3.0 + a3
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0.0:
        root = math.sqrt(disc)
        u = _cbrt(-q / 2.0 + root)
        v = _cbrt(-q / 2.0 - root)
        y1 = u + v
        re = -y1 / 2.0
        im = math.sqrt(3.0) / 2.0 * (u - v)
        ys = (complex(y1, 0.0), complex(re, im), complex(re, -im))
    elif p == 0.0 and q == 0.0:
        ys = (0j, 0j, 0j)
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        arg = min(1.0, max(-1.0, arg))
        theta = math.acos(arg)
        ys = tuple(
            complex(m * math.cos((theta - 2.0 * math.pi * k) / 3.0), 0.0) for k in range(3)
        )
    return tuple(y - shift for y in ys)


def deflated_block(params: Parameters, state) -> np.ndarray:
    """3x3 Jacobian block over (C, F, N) with the decoupled G row/column removed."""
    full = eval_jacobian(params, state)
    keep = [0, 2, 3]
    return full[np.ix_(keep, keep)]


def cubic_coefficients(block: np.ndarray) -> tuple[float, float, float]:
    """(A1, A2, A3) of det(psi*I - block) = psi^3 + A1*psi^2 + A2*psi + A3."""
    b = block
    a1 = -(b[0, 0] + b[1, 1] + b[2, 2])
    a2 = (
        (b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0])
        + (b[0, 0] * b[2, 2] - b[0, 2] * b[2, 0])
        + (b[1, 1] * b[2, 2] - b[1, 2] * b[2, 1])
    )
    det = (
        b[0, 0] * (b[1, 1] * b[2, 2] - b[1, 2] * b[2, 1])
        - b[0, 1] * (b[1, 0] * b[2, 2] - b[1, 2] * b[2, 0])
        + b[0, 2] * (b[1, 0] * b[2, 1] - b[1, 1] * b[2, 0])
    )
    a3 = -det
    return float(a1), float(a2), float(a3)


def _sort_key(z: complex):
    return (z.real, z.imag)


def eigenvalues_at(params: Parameters, eq: Equilibrium) -> tuple[complex, ...]:
    """All four eigenvalues at the equilibrium, sorted by real part ascending.

    One of them is exactly -epsilon (deflated analytically); the other
    three are the closed-form roots of the 3x3 block's characteristic
    cubic.
    """
    block = deflated_block(params, eq.state)
    a1, a2, a3 = cubic_coefficients(block)
    roots = solve_cubic(a1, a2, a3)
    eigs = list(roots) + [complex(-params.epsilon, 0.0)]
    return tuple(sorted(eigs, key=_sort_key))


def routh_hurwitz_interior(params: Parameters, e4: Equilibrium) -> RouthCriterion:
    """Routh-Hurwitz data for the interior equilibrium's deflated cubic."""
    a1, a2, a3 = cubic_coefficients(deflated_block(params, e4.state))
    return RouthCriterion(a1=a1, a2=a2, a3=a3, margin=a1 * a2 - a3)


def classify_local(params: Parameters, eq: Equilibrium) -> StabilityReport:
    """Spectral classification plus the per-equilibrium sufficient conditions.

    The ``locally_stable`` verdict comes from eigenvalue real parts alone;
    the reported inequality checks reproduce the tractable sufficient
    conditions for each boundary equilibrium and the Routh-Hurwitz margin
    for the interior one.
    """
    pr = params
    eigs = eigenvalues_at(params, eq)
    stable = all(z.real < 0 for z in eigs)
    c, _g, f, n = (float(v) for v in eq.state)
    checks: list[ConditionEvaluation] = []
    routh = None
    if eq.kind == "E1":
        # the forest direction grows at rate omega + eta*sigma*C1 > 0 whenever
        # E1 exists, so E1 can never be locally stable
        growth = pr.omega + pr.eta * pr.sigma * c
        checks.append(ConditionEvaluation("f_direction_decay", growth, 0.0, growth < 0.0))
    elif eq.kind == "E2":
        lhs = pr.omega - (2.0 * pr.omega / pr.bigK) * f + pr.eta * pr.sigma * c
        rhs = min(
            pr.eta * f + pr.p,
            pr.sigma * pr.eta ** 2 * f * c / (pr.eta * f + pr.p),
        )
        checks.append(ConditionEvaluation("cf_block_condition", lhs, rhs, lhs < rhs))
        n_rate = pr.s + pr.nu * pr.theta * f - pr.pi * c
        checks.append(ConditionEvaluation("n_direction_decay", n_rate, 0.0, n_rate < 0.0))
    elif eq.kind == "E3":
        lhs = pr.s - 2.0 * pr.s / pr.bigM - pr.pi * c
        rhs = min(pr.p, pr.pi * pr.phi * n / pr.p)
        checks.append(ConditionEvaluation("cn_block_condition", lhs, rhs, lhs < rhs))
        f_rate = pr.omega - pr.theta * n + pr.eta * pr.sigma * c
        checks.append(ConditionEvaluation("f_direction_decay", f_rate, 0.0, f_rate < 0.0))
    elif eq.kind == "E4":
        routh = routh_hurwitz_interior(params, eq)
        checks.append(
            ConditionEvaluation("routh_margin", routh.a3, routh.a1 * routh.a2, routh.margin > 0)
        )
    return StabilityReport(
        equilibrium_kind=eq.kind,
        eigenvalues=eigs,
        locally_stable=stable,
        routh=routh,
        condition_checks=tuple(checks),
    )


def lyapunov_global_check(
    params: Parameters, e4: Equilibrium, bounds: RegionBounds
) -> GlobalStabilityReport:
    """Evaluate the sufficient global-stability inequality at the interior point."""
    pr = params
    m2 = pr.phi / pr.pi
    m1 = pr.nu * m2
    f4 = float(e4.state[2])
    forest_term = (pr.eta * pr.bigK / (m1 * pr.omega)) * (m1 * pr.sigma - bounds.c_max) ** 2
    gdp_term = (pr.beta - pr.epsilon) ** 2 / pr.epsilon
    lhs = max(forest_term, gdp_term)
    rhs = 2.0 * (pr.p + pr.eta * f4)
    return GlobalStabilityReport(m1=m1, m2=m2, lhs=lhs, rhs=rhs, certified=lhs < rhs)


def characteristic_quartic(params: Parameters, state) -> np.ndarray:
    """Coefficients (monic, degree-descending) of det(psi*I - J) at ``state``.

    Convenience for cross-checking the analytic deflation against a generic
    root finder; the quartic factors as (psi + eps) times the deflated cubic.
    """
    a1, a2, a3 = cubic_coefficients(deflated_block(params, state))
    eps = params.epsilon
    return np.array([1.0, a1 + eps, a2 + eps * a1, a3 + eps * a2, eps * a3])
