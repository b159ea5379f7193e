# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernels.

Hot RK4 loops for the 4-compartment vector field.  The expression ordering
mirrors ``_kernels_py`` line for line and the extension is built with
-ffp-contract=off, so results are bit-identical to the pure-Python twin.
"""

from libc.math cimport fabs, isfinite

BACKEND_NAME = "c"


cdef inline void _deriv(const double* q,
                        double c, double g, double f, double n,
                        double* out) noexcept nogil:
    # q: alpha, phi, beta, epsilon, p, eta, mu, omega, bigK, theta,
    #    sigma, s, bigM, nu, pi
    out[0] = q[0] + q[1] * n + (q[2] - q[3]) * g - q[5] * c * f - q[4] * c
    out[1] = q[6] - q[3] * g
    out[2] = q[7] * f * (1.0 - f / q[8]) - q[9] * n * f + q[5] * q[10] * c * f
    out[3] = q[11] * n * (1.0 - n / q[12]) + q[9] * q[13] * n * f - q[14] * c * n


cdef inline int _step(const double* q, double dt, double half, double w,
                      double* x, long* clamps) noexcept nogil:
    """Advance x by one RK4 step with clamp-to-zero; returns 0, or 1 on nonfinite."""
    cdef double k1[4]
    cdef double k2[4]
    cdef double k3[4]
    cdef double k4[4]
    cdef double stage[4]
    cdef int i
    _deriv(q, x[0], x[1], x[2], x[3], k1)
    for i in range(4):
        stage[i] = x[i] + half * k1[i]
    _deriv(q, stage[0], stage[1], stage[2], stage[3], k2)
    for i in range(4):
        stage[i] = x[i] + half * k2[i]
    _deriv(q, stage[0], stage[1], stage[2], stage[3], k3)
    for i in range(4):
        stage[i] = x[i] + dt * k3[i]
    _deriv(q, stage[0], stage[1], stage[2], stage[3], k4)
    for i in range(4):
        x[i] = x[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if x[i] < 0.0:
            x[i] = 0.0
            clamps[0] += 1
    for i in range(4):
        if not isfinite(x[i]):
            return 1
    return 0


cdef inline double _rel_residual(const double* k, const double* x) noexcept nogil:
    cdef double rel = fabs(k[0]) / max(1.0, fabs(x[0]))
    cdef double r
    cdef int i
    for i in range(1, 4):
        r = fabs(k[i]) / max(1.0, fabs(x[i]))
        if r > rel:
            rel = r
    return rel


def rk4_path(double[::1] q, double[::1] x0, long n_steps, double dt,
             double[:, ::1] out):
    """Fixed-step RK4, storing every node state into ``out`` ((n_steps+1) x 4)."""
    cdef double x[4]
    cdef double half = 0.5 * dt
    cdef double w = dt / 6.0
    cdef long clamps = 0
    cdef long bad = -1
    cdef long step
    cdef int i
    for i in range(4):
        x[i] = x0[i]
        out[0, i] = x[i]
    with nogil:
        for step in range(n_steps):
            if _step(&q[0], dt, half, w, x, &clamps):
                bad = step
                break
            for i in range(4):
                out[step + 1, i] = x[i]
    return clamps, bad


def rk4_final(double[::1] q, double[::1] x0, long n_steps, double dt):
    """Fixed-step RK4 keeping only the final state."""
    cdef double x[4]
    cdef double half = 0.5 * dt
    cdef double w = dt / 6.0
    cdef long clamps = 0
    cdef long bad = -1
    cdef long step
    cdef int i
    for i in range(4):
        x[i] = x0[i]
    with nogil:
        for step in range(n_steps):
            if _step(&q[0], dt, half, w, x, &clamps):
                bad = step
                break
    return x[0], x[1], x[2], x[3], clamps, bad


def steady_state_run(double[::1] q, double[::1] x0, double dt, double tol,
                     long max_steps):
    """Integrate until the component-relative residual drops below ``tol``.

    Returns (c, g, f, n, steps, converged, clamps, bad_step); the residual
    is checked at the current node before each step.
    """
    cdef double x[4]
    cdef double k1[4]
    cdef double k2[4]
    cdef double k3[4]
    cdef double k4[4]
    cdef double stage[4]
    cdef double half = 0.5 * dt
    cdef double w = dt / 6.0
    cdef long clamps = 0
    cdef long steps = 0
    cdef long bad = -1
    cdef int converged = 0
    cdef int done = 0
    cdef long it
    cdef int i
    for i in range(4):
        x[i] = x0[i]
    with nogil:
        for it in range(max_steps):
            _deriv(&q[0], x[0], x[1], x[2], x[3], k1)
            if _rel_residual(k1, x) < tol:
                converged = 1
                done = 1
                break
            for i in range(4):
                stage[i] = x[i] + half * k1[i]
            _deriv(&q[0], stage[0], stage[1], stage[2], stage[3], k2)
            for i in range(4):
                stage[i] = x[i] + half * k2[i]
            _deriv(&q[0], stage[0], stage[1], stage[2], stage[3], k3)
            for i in range(4):
                stage[i] = x[i] + dt * k3[i]
            _deriv(&q[0], stage[0], stage[1], stage[2], stage[3], k4)
            for i in range(4):
                x[i] = x[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                if x[i] < 0.0:
                    x[i] = 0.0
                    clamps += 1
            steps += 1
            for i in range(4):
                if not isfinite(x[i]):
                    bad = steps - 1
                    done = 1
                    break
            if done:
                break
        if not done and bad < 0:
            _deriv(&q[0], x[0], x[1], x[2], x[3], k1)
            if _rel_residual(k1, x) < tol:
                converged = 1
    return x[0], x[1], x[2], x[3], steps, converged, clamps, bad
