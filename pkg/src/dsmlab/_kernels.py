"""Compiled inner loop of the optical-Bloch engine.

One trapezoidal (Crank-Nicolson) step of the coupled system

    d/dt rho21 = g rho21 + i/2 (cR rho31R + cL rho31L)
    d/dt rho31R = i/2 P + i/2 cR rho21 - D rho31R
    d/dt rho31L = i/2 Q + i/2 cL rho21 - D rho31L
    dP/dx = i eta rho31R,   -dQ/dx = i eta rho31L     (quasi-static probes)

The atomic unknowns at the new time are eliminated point by point, leaving a
2x2 block-tridiagonal system for the probe fields (P, Q) that is solved with
a block Thomas sweep.  Cost is O(n) per step.
"""
import numba
import numpy as np


@numba.njit(cache=True, fastmath=False)
def implicit_steps(r, a, b, P, Q, g, D, eta, dx, dt, cR, cL, pin, qin, nsteps):
    n = r.size
    h = 0.5 * dt
    s = 0.5j * h
    e = 1.0 / (1.0 + h * D)
    es = e * s
    k = 0.5j * eta * dx
    Ra = np.empty(n, np.complex128)
    Rb = np.empty(n, np.complex128)
    r0 = np.empty(n, np.complex128)
    rP = np.empty(n, np.complex128)
    rQ = np.empty(n, np.complex128)
    a0 = np.empty(n, np.complex128)
    aP = np.empty(n, np.complex128)
    aQ = np.empty(n, np.complex128)
    b0 = np.empty(n, np.complex128)
    bP = np.empty(n, np.complex128)
    bQ = np.empty(n, np.complex128)
    i00 = np.empty(n, np.complex128)
    i01 = np.empty(n, np.complex128)
    i10 = np.empty(n, np.complex128)
    i11 = np.empty(n, np.complex128)
    d0s = np.empty(n, np.complex128)
    d1s = np.empty(n, np.complex128)
    for it in range(nsteps):
        c1 = cR[it]
        c2 = cL[it]
        n1 = cR[it + 1]
        n2 = cL[it + 1]
        ssen = s * s * e * (n1 * n1 + n2 * n2)
        for j in range(n):
            rr = r[j]
            rRr = rr + h * (g[j] * rr + 0.5j * (c1 * a[j] + c2 * b[j]))
            Ra[j] = a[j] + h * (0.5j * P[j] + 0.5j * c1 * rr - D * a[j])
            Rb[j] = b[j] + h * (0.5j * Q[j] + 0.5j * c2 * rr - D * b[j])
            w = 1.0 / ((1.0 - h * g[j]) - ssen)
            r0[j] = w * (rRr + es * (n1 * Ra[j] + n2 * Rb[j]))
            rP[j] = w * s * es * n1
            rQ[j] = w * s * es * n2
            a0[j] = e * Ra[j] + es * n1 * r0[j]
            aP[j] = es + es * n1 * rP[j]
            aQ[j] = es * n1 * rQ[j]
            b0[j] = e * Rb[j] + es * n2 * r0[j]
            bP[j] = es * n2 * rP[j]
            bQ[j] = es + es * n2 * rQ[j]
        # forward sweep; row j couples (P,Q)_{j-1}, (P,Q)_j, (P,Q)_{j+1}
        for j in range(n):
            if j == 0:
                B00 = 1.0 + 0j
                B01 = 0j
                d0 = pin[it + 1]
            else:
                B00 = 1.0 - k * aP[j]
                B01 = -k * aQ[j]
                d0 = k * (a0[j] + a0[j - 1])
            if j == n - 1:
                B10 = 0j
                B11 = 1.0 + 0j
                d1 = qin[it + 1]
            else:
                B10 = -k * bP[j]
                B11 = 1.0 - k * bQ[j]
                d1 = k * (b0[j] + b0[j + 1])
            if j > 0:
                A00 = -1.0 - k * aP[j - 1]
                A01 = -k * aQ[j - 1]
                M0 = A00 * i00[j - 1] + A01 * i10[j - 1]
                M1 = A00 * i01[j - 1] + A01 * i11[j - 1]
                C10 = -k * bP[j]
                C11 = -1.0 - k * bQ[j]
                B00 -= M1 * C10
                B01 -= M1 * C11
                d0 -= M0 * d0s[j - 1] + M1 * d1s[j - 1]
            det = B00 * B11 - B01 * B10
            i00[j] = B11 / det
            i01[j] = -B01 / det
            i10[j] = -B10 / det
            i11[j] = B00 / det
            d0s[j] = d0
            d1s[j] = d1
        xp = 0j
        xq = 0j
        for j in range(n - 1, -1, -1):
            t0 = d0s[j]
            t1 = d1s[j]
            if j < n - 1:
                t1 -= (-k * bP[j + 1]) * xp + (-1.0 - k * bQ[j + 1]) * xq
            xp = i00[j] * t0 + i01[j] * t1
            xq = i10[j] * t0 + i11[j] * t1
            P[j] = xp
            Q[j] = xq
        for j in range(n):
            r[j] = r0[j] + rP[j] * P[j] + rQ[j] * Q[j]
            a[j] = a0[j] + aP[j] * P[j] + aQ[j] * Q[j]
            b[j] = b0[j] + bP[j] * P[j] + bQ[j] * Q[j]
