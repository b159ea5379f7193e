"""Pure-Python integration kernels.

Fallback twin of the compiled ``_kernels`` extension.  Expression ordering
is kept literally identical between the two implementations (and the
extension is compiled without FP contraction), so both backends produce
bit-identical trajectories.

All kernels take the parameter vector ``q`` in canonical order
(alpha, phi, beta, epsilon, p, eta, mu, omega, bigK, theta, sigma, s,
bigM, nu, pi) and a 4-component state (C, G, F, N).

Return conventions:
    clamps   -- number of component clamp-to-zero events
    bad_step -- index of the step whose result was nonfinite, or -1
"""

BACKEND_NAME = "python"


def rk4_path(q, x0, n_steps, dt, out):
    """Fixed-step RK4, storing every node state into ``out`` ((n_steps+1) x 4)."""
    alpha, phi, beta, epsilon, p, eta, mu, omega, bigK, theta, sigma, s, bigM, nu, pi = (
        float(v) for v in q
    )
    c, g, f, n = (float(v) for v in x0)
    half = 0.5 * dt
    w = dt / 6.0
    clamps = 0
    out[0, 0] = c
    out[0, 1] = g
    out[0, 2] = f
    out[0, 3] = n
    for step in range(n_steps):
        k1c = alpha + phi * n + (beta - epsilon) * g - eta * c * f - p * c
        k1g = mu - epsilon * g
        k1f = omega * f * (1.0 - f / bigK) - theta * n * f + eta * sigma * c * f
        k1n = s * n * (1.0 - n / bigM) + theta * nu * n * f - pi * c * n

        c2 = c + half * k1c
        g2 = g + half * k1g
        f2 = f + half * k1f
        n2 = n + half * k1n
        k2c = alpha + phi * n2 + (beta - epsilon) * g2 - eta * c2 * f2 - p * c2
        k2g = mu - epsilon * g2
        k2f = omega * f2 * (1.0 - f2 / bigK) - theta * n2 * f2 + eta * sigma * c2 * f2
        k2n = s * n2 * (1.0 - n2 / bigM) + theta * nu * n2 * f2 - pi * c2 * n2

        c3 = c + half * k2c
        g3 = g + half * k2g
        f3 = f + half * k2f
        n3 = n + half * k2n
        k3c = alpha + phi * n3 + (beta - epsilon) * g3 - eta * c3 * f3 - p * c3
        k3g = mu - epsilon * g3
        k3f = omega * f3 * (1.0 - f3 / bigK) - theta * n3 * f3 + eta * sigma * c3 * f3
        k3n = s * n3 * (1.0 - n3 / bigM) + theta * nu * n3 * f3 - pi * c3 * n3

        c4 = c + dt * k3c
        g4 = g + dt * k3g
        f4 = f + dt * k3f
        n4 = n + dt * k3n
        k4c = alpha + phi * n4 + (beta - epsilon) * g4 - eta * c4 * f4 - p * c4
        k4g = mu - epsilon * g4
        k4f = omega * f4 * (1.0 - f4 / bigK) - theta * n4 * f4 + eta * sigma * c4 * f4
        k4n = s * n4 * (1.0 - n4 / bigM) + theta * nu * n4 * f4 - pi * c4 * n4

        c = c + w * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        g = g + w * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
        f = f + w * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
        n = n + w * (k1n + 2.0 * k2n + 2.0 * k3n + k4n)
        if c < 0.0:
            c = 0.0
            clamps += 1
        if g < 0.0:
            g = 0.0
            clamps += 1
        if f < 0.0:
            f = 0.0
            clamps += 1
        if n < 0.0:
            n = 0.0
            clamps += 1
        if not (c - c == 0.0 and g - g == 0.0 and f - f == 0.0 and n - n == 0.0):
            return clamps, step
        out[step + 1, 0] = c
        out[step + 1, 1] = g
        out[step + 1, 2] = f
        out[step + 1, 3] = n
    return clamps, -1


def rk4_final(q, x0, n_steps, dt):
    """Fixed-step RK4 keeping only the final state."""
    alpha, phi, beta, epsilon, p, eta, mu, omega, bigK, theta, sigma, s, bigM, nu, pi = (
        float(v) for v in q
    )
    c, g, f, n = (float(v) for v in x0)
    half = 0.5 * dt
    w = dt / 6.0
    clamps = 0
    for step in range(n_steps):
        k1c = alpha + phi * n + (beta - epsilon) * g - eta * c * f - p * c
        k1g = mu - epsilon * g
        k1f = omega * f * (1.0 - f / bigK) - theta * n * f + eta * sigma * c * f
        k1n = s * n * (1.0 - n / bigM) + theta * nu * n * f - pi * c * n

        c2 = c + half * k1c
        g2 = g + half * k1g
        f2 = f + half * k1f
        n2 = n + half * k1n
        k2c = alpha + phi * n2 + (beta - epsilon) * g2 - eta * c2 * f2 - p * c2
        k2g = mu - epsilon * g2
        k2f = omega * f2 * (1.0 - f2 / bigK) - theta * n2 * f2 + eta * sigma * c2 * f2
        k2n = s * n2 * (1.0 - n2 / bigM) + theta * nu * n2 * f2 - pi * c2 * n2

        c3 = c + half * k2c
        g3 = g + half * k2g
        f3 = f + half * k2f
        n3 = n + half * k2n
        k3c = alpha + phi * n3 + (beta - epsilon) * g3 - eta * c3 * f3 - p * c3
        k3g = mu - epsilon * g3
        k3f = omega * f3 * (1.0 - f3 / bigK) - theta * n3 * f3 + eta * sigma * c3 * f3
        k3n = s * n3 * (1.0 - n3 / bigM) + theta * nu * n3 * f3 - pi * c3 * n3

        c4 = c + dt * k3c
        g4 = g + dt * k3g
        f4 = f + dt * k3f
        n4 = n + dt * k3n
        k4c = alpha + phi * n4 + (beta - epsilon) * g4 - eta * c4 * f4 - p * c4
        k4g = mu - epsilon * g4
        k4f = omega * f4 * (1.0 - f4 / bigK) - theta * n4 * f4 + eta * sigma * c4 * f4
        k4n = s * n4 * (1.0 - n4 / bigM) + theta * nu * n4 * f4 - pi * c4 * n4

        c = c + w * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        g = g + w * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
        f = f + w * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
        n = n + w * (k1n + 2.0 * k2n + 2.0 * k3n + k4n)
        if c < 0.0:
            c = 0.0
            clamps += 1
        if g < 0.0:
            g = 0.0
            clamps += 1
        if f < 0.0:
            f = 0.0
            clamps += 1
        if n < 0.0:
            n = 0.0
            clamps += 1
        if not (c - c == 0.0 and g - g == 0.0 and f - f == 0.0 and n - n == 0.0):
            return c, g, f, n, clamps, step
    return c, g, f, n, clamps, -1


def steady_state_run(q, x0, dt, tol, max_steps):
    """Integrate until the component-relative residual drops below ``tol``.

    The stationarity test max_i |f_i| / max(1, |x_i|) < tol is evaluated at
    the current node *before* each step (an exact equilibrium is returned
    immediately), reusing the derivative as the first RK4 stage.

    Returns (c, g, f, n, steps, converged, clamps, bad_step).
    """
    alpha, phi, beta, epsilon, p, eta, mu, omega, bigK, theta, sigma, s, bigM, nu, pi = (
        float(v) for v in q
    )
    c, g, f, n = (float(v) for v in x0)
    half = 0.5 * dt
    w = dt / 6.0
    clamps = 0
    steps = 0
    for _ in range(max_steps):
        k1c = alpha + phi * n + (beta - epsilon) * g - eta * c * f - p * c
        k1g = mu - epsilon * g
        k1f = omega * f * (1.0 - f / bigK) - theta * n * f + eta * sigma * c * f
        k1n = s * n * (1.0 - n / bigM) + theta * nu * n * f - pi * c * n

        rel = abs(k1c) / max(1.0, abs(c))
        r = abs(k1g) / max(1.0, abs(g))
        if r > rel:
            rel = r
        r = abs(k1f) / max(1.0, abs(f))
        if r > rel:
            rel = r
        r = abs(k1n) / max(1.0, abs(n))
        if r > rel:
            rel = r
        if rel < tol:
            return c, g, f, n, steps, 1, clamps, -1

        c2 = c + half * k1c
        g2 = g + half * k1g
        f2 = f + half * k1f
        n2 = n + half * k1n
        k2c = alpha + phi * n2 + (beta - epsilon) * g2 - eta * c2 * f2 - p * c2
        k2g = mu - epsilon * g2
        k2f = omega * f2 * (1.0 - f2 / bigK) - theta * n2 * f2 + eta * sigma * c2 * f2
        k2n = s * n2 * (1.0 - n2 / bigM) + theta * nu * n2 * f2 - pi * c2 * n2

        c3 = c + half * k2c
        g3 = g + half * k2g
        f3 = f + half * k2f
        n3 = n + half * k2n
        k3c = alpha + phi * n3 + (beta - epsilon) * g3 - eta * c3 * f3 - p * c3
        k3g = mu - epsilon * g3
        k3f = omega * f3 * (1.0 - f3 / bigK) - theta * n3 * f3 + eta * sigma * c3 * f3
        k3n = s * n3 * (1.0 - n3 / bigM) + theta * nu * n3 * f3 - pi * c3 * n3

        c4 = c + dt * k3c
        g4 = g + dt * k3g
        f4 = f + dt * k3f
        n4 = n + dt * k3n
        k4c = alpha + phi * n4 + (beta - epsilon) * g4 - eta * c4 * f4 - p * c4
        k4g = mu - epsilon * g4
        k4f = omega * f4 * (1.0 - f4 / bigK) - theta * n4 * f4 + eta * sigma * c4 * f4
        k4n = s * n4 * (1.0 - n4 / bigM) + theta * nu * n4 * f4 - pi * c4 * n4

        c = c + w * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        g = g + w * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
        f = f + w * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
        n = n + w * (k1n + 2.0 * k2n + 2.0 * k3n + k4n)
        if c < 0.0:
            c = 0.0
            clamps += 1
        if g < 0.0:
            g = 0.0
            clamps += 1
        if f < 0.0:
            f = 0.0
            clamps += 1
        if n < 0.0:
            n = 0.0
            clamps += 1
        steps += 1
        if not (c - c == 0.0 and g - g == 0.0 and f - f == 0.0 and n - n == 0.0):
            return c, g, f, n, steps, 0, clamps, steps - 1

    k1c = alpha + phi * n + (beta - epsilon) * g - eta * c * f - p * c
    k1g = mu - epsilon * g
    k1f = omega * f * (1.0 - f / bigK) - theta * n * f + eta * sigma * c * f
    k1n = s * n * (1.0 - n / bigM) + theta * nu * n * f - pi * c * n
    rel = abs(k1c) / max(1.0, abs(c))
    r = abs(k1g) / max(1.0, abs(g))
    if r > rel:
        rel = r
    r = abs(k1f) / max(1.0, abs(f))
    if r > rel:
        rel = r
    r = abs(k1n) / max(1.0, abs(n))
    if r > rel:
        rel = r
    return c, g, f, n, steps, 1 if rel < tol else 0, clamps, -1
