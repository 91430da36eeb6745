"""Compiled inner loops for the aggregation flow.

All kernels take the state as an (N, |G|) complex128 array together with the
Cayley table ``cayley`` and the quotient table ``quot[a, b] = a * b^-1``.
"""
import numba as nb
import numpy as np


@nb.njit(cache=True)
def defect(xc, xi, quot, out):
    """out = xc xi^dagger - xi xc^dagger."""
    n = xc.shape[0]
    out[:] = 0.0
    for a in range(n):
        for b in range(n):
            out[quot[a, b]] += xc[a] * np.conj(xi[b]) - xi[a] * np.conj(xc[b])


@nb.njit(cache=True)
def rhs(X, cayley, quot, kappa, out):
    N, n = X.shape
    xc = np.zeros(n, dtype=np.complex128)
    for i in range(N):
        xc += X[i]
    xc /= N
    d = np.empty(n, dtype=np.complex128)
    for i in range(N):
        defect(xc, X[i], quot, d)
        out[i, :] = 0.0
        for g in range(n):
            for h in range(n):
                out[i, cayley[g, h]] += d[g] * X[i, h]
        for k in range(n):
            out[i, k] *= kappa


@nb.njit(cache=True)
def rk4(X, cayley, quot, kappa, dt, nsteps, renorm):
    """Advance X in place by ``nsteps`` RK4 steps.

    Returns -1 on success, otherwise the (0-based) index of the first step
    that produced a non-finite value. With ``renorm`` every agent is projected
    back to unit norm after each step.
    """
    k1 = np.empty_like(X)
    k2 = np.empty_like(X)
    k3 = np.empty_like(X)
    k4 = np.empty_like(X)
    tmp = np.empty_like(X)
    N, n = X.shape
    for s in range(nsteps):
        rhs(X, cayley, quot, kappa, k1)
        tmp[:] = X + 0.5 * dt * k1
        rhs(tmp, cayley, quot, kappa, k2)
        tmp[:] = X + 0.5 * dt * k2
        rhs(tmp, cayley, quot, kappa, k3)
        tmp[:] = X + dt * k3
        rhs(tmp, cayley, quot, kappa, k4)
        X += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        for i in range(N):
            for k in range(n):
                if not (np.isfinite(X[i, k].real) and np.isfinite(X[i, k].imag)):
                    return s
        if renorm:
            for i in range(N):
                r = np.sqrt(np.sum(X[i].real ** 2 + X[i].imag ** 2))
                if r > 0.0:
                    X[i] /= r
    return -1


@nb.njit(cache=True)
def diagnostics(X, quot, kappa):
    """(R2, V, dissipation, residual, min_norm, max_norm) of a state."""
    N, n = X.shape
    xc = np.zeros(n, dtype=np.complex128)
    for i in range(N):
        xc += X[i]
    xc /= N
    r2 = np.sum(xc.real ** 2 + xc.imag ** 2)
    v = 0.0
    for i in range(N):
        for j in range(N):
            diff = X[i] - X[j]
            v += np.sum(diff.real ** 2 + diff.imag ** 2)
    v /= N * N
    d = np.empty(n, dtype=np.complex128)
    diss = 0.0
    resid = 0.0
    lo = np.inf
    hi = 0.0
    for i in range(N):
        defect(xc, X[i], quot, d)
        sq = np.sum(d.real ** 2 + d.imag ** 2)
        diss += sq
        resid = max(resid, np.sqrt(sq))
        r = np.sqrt(np.sum(X[i].real ** 2 + X[i].imag ** 2))
        lo = min(lo, r)
        hi = max(hi, r)
    diss *= 2.0 * kappa / N
    return r2, v, diss, resid, lo, hi


@nb.njit(cache=True)
def kuramoto_rk4(theta, kappa, dt, nsteps, out):
    """Integrate dtheta_i/dt = (2 kappa / N) sum_k sin(theta_k - theta_i); out[s] holds step s."""
    N = theta.shape[0]
    c = 2.0 * kappa / N

    def f(th, res):
        for i in range(N):
            acc = 0.0
            for k in range(N):
                acc += np.sin(th[k] - th[i])
            res[i] = c * acc

    k1 = np.empty(N)
    k2 = np.empty(N)
    k3 = np.empty(N)
    k4 = np.empty(N)
    th = theta.copy()
    out[0] = th
    for s in range(nsteps):
        f(th, k1)
        f(th + 0.5 * dt * k1, k2)
        f(th + 0.5 * dt * k2, k3)
        f(th + dt * k3, k4)
        th += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[s + 1] = th
