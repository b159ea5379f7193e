"""Closed-form and numerically solved equilibria of the system.

Four constant solutions are computed, all sharing G* = mu/epsilon:

    E1 : forest-free and population-free  (F = N = 0)
    E2 : population-free                  (N = 0)
    E3 : forest-free                      (F = 0)
    E4 : interior                         (all components positive)

E1-E3 reduce to closed forms; E4 is the intersection of two implicit
curves in the (F, N) plane and is solved by damped Newton iteration with a
bisection fallback.  Existence conditions are evaluated and reported but
never gate the solvers: the final authority for the ``exists`` flag is the
component-relative residual of the full vector field at the returned
state, which must fall below :data:`RESIDUAL_TOL`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Parameters, eval_rhs, relative_residual

#: An equilibrium is certified to exist only if the component-relative
#: residual of the vector field at its state is below this.
RESIDUAL_TOL = 1e-9


class RootFindError(RuntimeError):
    """The interior equilibrium solver failed."""


@dataclass(frozen=True)
class ConditionCheck:
    """A named existence condition: the evaluated quantity must be positive."""

    name: str
    value: float
    satisfied: bool


@dataclass(frozen=True)
class Equilibrium:
    kind: str
    state: np.ndarray
    exists: bool
    conditions: tuple[ConditionCheck, ...]
    residual_norm: float

    def __iter__(self):
        return iter(self.state)


@dataclass(frozen=True)
class RootFindOptions:
    """Tuning for the interior-equilibrium Newton solver."""

    max_iter: int = 60
    tol: float = 1e-13
    max_backtracks: int = 40
    scan_points: int = 512
    bisect_iter: int = 200


def _positive(params: Parameters, state, conditions) -> Equilibrium:
    kind, values = state
    arr = np.array(values, dtype=float)
    residual = relative_residual(params, arr)
    exists = bool(residual < RESIDUAL_TOL and np.all(arr >= 0) and np.all(np.isfinite(arr)))
    return Equilibrium(
        kind=kind,
        state=arr,
        exists=exists,
        conditions=tuple(conditions),
        residual_norm=residual,
    )


def equilibrium_e1(params: Parameters) -> Equilibrium:
    """Forest- and population-free equilibrium: C1 = [alpha + (beta-eps)*mu/eps]/p."""
    g1 = params.mu / params.epsilon
    c1 = (params.alpha + (params.beta - params.epsilon) * g1) / params.p
    conds = [ConditionCheck("c1_positive", c1, c1 > 0)]
    return _positive(params, ("E1", (c1, g1, 0.0, 0.0)), conds)


def equilibrium_e2(params: Parameters) -> Equilibrium:
    """Population-free equilibrium.

    C2 is the unique positive root of

        (eta^2*sigma*K/omega)*C^2 + (eta*K + p)*C - [alpha + (beta-eps)*mu/eps] = 0

    computed with the cancellation-safe quadratic formula (the leading
    coefficient is ~1e-11 at the bundled parameters, so the textbook
    formula would lose all accuracy in the positive root).  F2 then follows
    from the forest nullcline F = K*(omega + eta*sigma*C)/omega.
    """
    pr = params
    g2 = pr.mu / pr.epsilon
    a = pr.eta * pr.eta * pr.sigma * pr.bigK / pr.omega
    b = pr.eta * pr.bigK + pr.p
    const = -(pr.alpha + (pr.beta - pr.epsilon) * g2)
    disc = b * b - 4.0 * a * const
    # q-form roots: q/a and const/q never subtract nearly equal quantities
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    roots = [q / a, const / q]
    c2 = max(roots)
    f2 = pr.bigK * (pr.omega + pr.eta * pr.sigma * c2) / pr.omega
    exist_value = pr.alpha * pr.epsilon + pr.mu * (pr.beta - pr.epsilon)
    conds = [ConditionCheck("c2_quadratic_constant_positive", exist_value, exist_value > 0)]
    return _positive(params, ("E2", (c2, g2, f2, 0.0)), conds)


def equilibrium_e3(params: Parameters) -> Equilibrium:
    """Forest-free equilibrium.

    C3 = s*[eps*(alpha + phi*M) + mu*(beta - eps)] / [eps*(s*p + pi*phi*M)]
    and N3 = M*(1 - pi*C3/s) from the population nullcline.
    """
    pr = params
    g3 = pr.mu / pr.epsilon
    numer = pr.epsilon * (pr.alpha + pr.phi * pr.bigM) + pr.mu * (pr.beta - pr.epsilon)
    denom = pr.epsilon * (pr.s * pr.p + pr.pi * pr.phi * pr.bigM)
    c3 = pr.s * numer / denom
    n3 = pr.bigM * (1.0 - pr.pi * c3 / pr.s)
    conds = [
        ConditionCheck("c3_numerator_positive", numer, numer > 0),
        ConditionCheck("printed_c3_denominator_margin", denom - numer, denom - numer > 0),
        ConditionCheck("n3_positive", n3, n3 > 0),
    ]
    return _positive(params, ("E3", (c3, g3, 0.0, n3)), conds)


# --- interior equilibrium ---------------------------------------------------


def _interior_setup(params: Parameters):
    """Shared closed forms for the reduced (F, N) system.

    Eliminating C through C(F, N) = (a0 + phi*N)/(p + eta*F) with
    a0 = alpha + (beta - eps)*mu/eps leaves two scalar residuals:

        r_a(F, N) = omega - (omega/K)*F - theta*N + eta*sigma*C(F, N)
        r_b(F, N) = s - (s/M)*N + theta*nu*F - pi*C(F, N)
    """
    pr = params
    a0 = pr.alpha + (pr.beta - pr.epsilon) * (pr.mu / pr.epsilon)

    def c_of(f, n):
        return (a0 + pr.phi * n) / (pr.p + pr.eta * f)

    def residuals(f, n):
        c = c_of(f, n)
        ra = pr.omega - (pr.omega / pr.bigK) * f - pr.theta * n + pr.eta * pr.sigma * c
        rb = pr.s - (pr.s / pr.bigM) * n + pr.theta * pr.nu * f - pr.pi * c
        return ra, rb

    def jacobian(f, n):
        denom = pr.p + pr.eta * f
        c = c_of(f, n)
        dc_df = -pr.eta * c / denom
        dc_dn = pr.phi / denom
        return np.array(
            [
                [-pr.omega / pr.bigK + pr.eta * pr.sigma * dc_df,
                 -pr.theta + pr.eta * pr.sigma * dc_dn],
                [pr.theta * pr.nu - pr.pi * dc_df,
                 -pr.s / pr.bigM - pr.pi * dc_dn],
            ]
        )

    return a0, c_of, residuals, jacobian


def curve_a_n(params: Parameters, f: float) -> float:
    """N on the forest nullcline (r_a = 0) at forest area ``f``.

    Returns NaN where the curve has no solution (degenerate denominator).
    """
    pr = params
    a0 = pr.alpha + (pr.beta - pr.epsilon) * (pr.mu / pr.epsilon)
    denom_c = pr.p + pr.eta * f
    den = pr.theta - pr.eta * pr.sigma * pr.phi / denom_c
    if den == 0:
        return math.nan
    return (pr.omega * (1.0 - f / pr.bigK) + pr.eta * pr.sigma * a0 / denom_c) / den


def curve_b_n(params: Parameters, f: float) -> float:
    """N on the population nullcline (r_b = 0) at forest area ``f``."""
    pr = params
    a0 = pr.alpha + (pr.beta - pr.epsilon) * (pr.mu / pr.epsilon)
    denom_c = pr.p + pr.eta * f
    den = pr.s / pr.bigM + pr.pi * pr.phi / denom_c
    return (pr.s + pr.theta * pr.nu * f - pr.pi * a0 / denom_c) / den


def _bisect_intersection(params: Parameters, f_hi: float, opts: RootFindOptions):
    """Bracket and bisect h(F) = N_a(F) - N_b(F) over [0, f_hi]."""
    def h(f):
        na = curve_a_n(params, f)
        if math.isnan(na):
            return math.nan
        return na - curve_b_n(params, f)

    grid = np.linspace(0.0, f_hi, opts.scan_points)
    values = [h(f) for f in grid]
    lo = hi = None
    for i in range(len(grid) - 1):
        v0, v1 = values[i], values[i + 1]
        if math.isnan(v0) or math.isnan(v1):
            continue
        if v0 == 0.0:
            lo = hi = grid[i]
            break
        if v0 * v1 < 0:
            lo, hi = grid[i], grid[i + 1]
            break
    if lo is None:
        return None
    if lo == hi:
        f_root = lo
    else:
        vlo = h(lo)
        for _ in range(opts.bisect_iter):
            mid = 0.5 * (lo + hi)
            vmid = h(mid)
            if vmid == 0.0 or hi - lo <= abs(mid) * 1e-16:
                lo = hi = mid
                break
            if vlo * vmid < 0:
                hi = mid
            else:
                lo, vlo = mid, vmid
        f_root = 0.5 * (lo + hi)
    return f_root, curve_a_n(params, f_root)


def equilibrium_e4(params: Parameters, opts: RootFindOptions | None = None) -> Equilibrium:
    """Interior equilibrium via damped Newton on the reduced (F, N) system.

    Initial guess is (F2, max(N3, tiny)); if Newton stalls, the root is
    re-bracketed by bisection along the forest nullcline parameterized by
    F.  Raises :class:`RootFindError` on non-convergence or if the root
    leaves the nonnegative orthant.
    """
    opts = opts or RootFindOptions()
    pr = params
    _a0, c_of, residuals, jacobian = _interior_setup(params)

    e2 = equilibrium_e2(params)
    e3 = equilibrium_e3(params)
    f = max(float(e2.state[2]), 1e-6)
    n = max(float(e3.state[3]), 1e-6)

    def norm(rab):
        return max(abs(rab[0]), abs(rab[1]))

    r = residuals(f, n)
    converged = norm(r) < opts.tol
    stalled = False
    for _ in range(opts.max_iter):
        if converged:
            break
        jac = jacobian(f, n)
        det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        if det == 0 or not math.isfinite(det):
            stalled = True
            break
        step_f = (-r[0] * jac[1, 1] + r[1] * jac[0, 1]) / det
        step_n = (-jac[0, 0] * r[1] + jac[1, 0] * r[0]) / det
        lam = 1.0
        improved = False
        for _ in range(opts.max_backtracks):
            f_new, n_new = f + lam * step_f, n + lam * step_n
            r_new = residuals(f_new, n_new)
            if math.isfinite(r_new[0]) and math.isfinite(r_new[1]) and norm(r_new) < norm(r):
                f, n, r = f_new, n_new, r_new
                improved = True
                break
            lam *= 0.5
        if not improved:
            stalled = True
            break
        converged = norm(r) < opts.tol
    if not converged and not stalled:
        stalled = True  # ran out of iterations

    if stalled and not converged:
        f_hi = float(e2.state[2]) if e2.state[2] > 0 else 2.0 * pr.bigK
        bracket = _bisect_intersection(params, f_hi, opts)
        if bracket is None:
            raise RootFindError(
                "no convergence solving the interior equilibrium: Newton stalled at "
                f"(F={f!r}, N={n!r}) with residual {norm(r)!r} and no bisection bracket found"
            )
        f, n = bracket
        r = residuals(f, n)

    c = c_of(f, n)
    g = pr.mu / pr.epsilon
    state = np.array([c, g, f, n])
    if np.any(state < 0):
        raise RootFindError(
            f"negative component in interior equilibrium: (C, G, F, N) = {tuple(state)!r}"
        )

    # printed existence / curve-shape conditions, evaluated for the report only
    lhs21 = (pr.epsilon * pr.p * (pr.s * pr.p + pr.pi * pr.phi * pr.bigM)) * (
        pr.epsilon * pr.omega * pr.p
        + pr.eta * pr.sigma * (pr.epsilon * pr.alpha + pr.mu * (pr.beta - pr.epsilon))
    )
    rhs21 = pr.epsilon * pr.bigM * (pr.p * pr.theta - pr.eta * pr.sigma * pr.phi) * (
        pr.epsilon * (pr.alpha + pr.s * pr.pi * pr.p) + pr.mu * (pr.beta - pr.epsilon)
    )
    v28 = pr.p * pr.theta - pr.eta * pr.sigma * pr.phi
    v30 = pr.epsilon * (pr.alpha + pr.s * pr.pi * pr.p) + pr.mu * (pr.beta - pr.epsilon)
    conds = [
        ConditionCheck("printed_intersection_condition", lhs21 - rhs21, lhs21 - rhs21 > 0),
        ConditionCheck("curve_a_axis_intercept_positive", v28, v28 > 0),
        ConditionCheck("curve_b_axis_intercept_positive", v30, v30 > 0),
    ]
    residual = relative_residual(params, state)
    return Equilibrium(
        kind="E4",
        state=state,
        exists=bool(residual < RESIDUAL_TOL and np.all(state >= 0)),
        conditions=tuple(conds),
        residual_norm=residual,
    )


def all_equilibria(params: Parameters, opts: RootFindOptions | None = None) -> list[Equilibrium]:
    """E1 through E4 in order."""
    return [
        equilibrium_e1(params),
        equilibrium_e2(params),
        equilibrium_e3(params),
        equilibrium_e4(params, opts),
    ]


def residual_vector(params: Parameters, eq: Equilibrium) -> np.ndarray:
    """Raw vector-field value at the equilibrium state (diagnostics)."""
    return eval_rhs(params, eq.state)
