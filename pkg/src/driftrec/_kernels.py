"""Compiled inner loops (numba)."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def linear_recursion(A, x0, W):
    """States of ``x(t) = A x(t-1) + W[t-1]`` for t = 1..n, row 0 = x0."""
    n, p = W.shape
    out = np.empty((n + 1, p))
    out[0] = x0
    x = x0.copy()
    for t in range(n):
        y = W[t].copy()
        for i in range(p):
            s = 0.0
            for j in range(p):
                s += A[i, j] * x[j]
            y[i] += s
        x = y
        out[t + 1] = x
    return out


@njit(cache=True)
def _soft(z, t):
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


@njit(cache=True)
def kkt_violation(Q, g, lam, theta):
    """Largest violation of the lasso optimality conditions at ``theta``."""
    m = g.shape[0]
    worst = 0.0
    for j in range(m):
        r = -g[j]
        for i in range(m):
            r += Q[j, i] * theta[i]
        if theta[j] > 0.0:
            v = abs(r + lam)
        elif theta[j] < 0.0:
            v = abs(r - lam)
        else:
            v = abs(r) - lam
            if v < 0.0:
                v = 0.0
        if v > worst:
            worst = v
    return worst


@njit(cache=True)
def coordinate_descent(Q, g, lam, theta0, tol, max_iter):
    """Cyclic coordinate descent for ``0.5 t'Qt - g't + lam |t|_1``.

    Returns ``(theta, sweeps, kkt, converged)``.  Coordinates with
    ``Q[j, j] <= 0`` are held at zero.
    """
    m = g.shape[0]
    theta = theta0.copy()
    grad = -g.copy()
    for j in range(m):
        if theta[j] != 0.0:
            for i in range(m):
                grad[i] += Q[i, j] * theta[j]
    kkt = np.inf
    for sweep in range(1, max_iter + 1):
        for j in range(m):
            qjj = Q[j, j]
            if qjj <= 0.0:
                new = 0.0
            else:
                new = _soft(theta[j] - grad[j] / qjj, lam / qjj)
            delta = new - theta[j]
            if delta != 0.0:
                for i in range(m):
                    grad[i] += Q[i, j] * delta
                theta[j] = new
        kkt = kkt_violation(Q, g, lam, theta)
        if kkt <= tol:
            return theta, sweep, kkt, True
        if sweep % 64 == 0:
            # refresh the running gradient against accumulated rounding
            for i in range(m):
                s = -g[i]
                for k in range(m):
                    s += Q[i, k] * theta[k]
                grad[i] = s
    return theta, max_iter, kkt, False


@njit(cache=True)
def monomial2_euler(Th, x0, W, dt):
    """Euler steps of ``x += dt Th F(x) + W[t]`` with ``F`` the square-free
    degree-2 monomials.  Returns ``(states, bad)``; ``bad`` is the first
    non-finite step, or -1."""
    n, p = W.shape
    m = Th.shape[1]
    out = np.empty((n + 1, p))
    out[0] = x0
    x = x0.copy()
    f = np.empty(m)
    for t in range(n):
        f[0] = 1.0
        for i in range(p):
            f[1 + i] = x[i]
        c = 1 + p
        for i in range(p):
            for j in range(i + 1, p):
                f[c] = x[i] * x[j]
                c += 1
        ok = True
        for i in range(p):
            s = 0.0
            for k in range(m):
                s += Th[i, k] * f[k]
            x[i] = x[i] + dt * s + W[t, i]
            if not np.isfinite(x[i]):
                ok = False
        out[t + 1] = x
        if not ok:
            return out, t + 1
    return out, -1
