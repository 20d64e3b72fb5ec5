#!/usr/bin/env python3
"""Reference values for the test suite, computed without the C++ library.

Assembles the fitted operator eps*Delta + b.grad + c from scratch with numpy,
solves with LAPACK (dense, full spectrum) or ARPACK shift-invert (sparse), and
prints the numbers that tests/oracle_values.hpp freezes.

    python3 tools/oracles.py > /tmp/oracles.txt
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

TWO_PI = 2.0 * np.pi


def bern(z):
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    big = np.abs(z) > 1e-8
    out[big] = z[big] / np.expm1(z[big])
    out[~big] = 1.0 - z[~big] / 2.0 + z[~big] ** 2 / 12.0
    return out


def circle_matrix(n, eps, bfun, cfun):
    h = TWO_PI / n
    x = h * np.arange(n)
    b = bfun(x)
    bp = 0.5 * (b + np.roll(b, -1))
    bm = 0.5 * (b + np.roll(b, 1))
    k = eps / h**2
    up = -k * bern(bp * h / eps)
    lo = -k * bern(-bm * h / eps)
    A = np.zeros((n, n))
    idx = np.arange(n)
    A[idx, (idx + 1) % n] += up
    A[idx, (idx - 1) % n] += lo
    A[idx, idx] += -(up + lo) + cfun(x)
    return x, A


def torus_matrix(n, eps, bx, by, cfun):
    h = TWO_PI / n
    g = h * np.arange(n)
    X, Y = np.meshgrid(g, g, indexing="xy")  # node = i + n*j, x fastest
    X, Y = X.ravel(), Y.ravel()
    N = n * n
    i = np.arange(N) % n
    j = np.arange(N) // n
    k = eps / h**2
    rows, cols, vals = [], [], []
    diag = cfun(X, Y).astype(float)
    for axis, comp in ((0, bx(X, Y)), (1, by(X, Y))):
        if axis == 0:
            ip = (i + 1) % n + n * j
            im = (i - 1) % n + n * j
        else:
            ip = i + n * ((j + 1) % n)
            im = i + n * ((j - 1) % n)
        up = -k * bern(0.5 * (comp + comp[ip]) * h / eps)
        lo = -k * bern(-0.5 * (comp + comp[im]) * h / eps)
        rows += [np.arange(N), np.arange(N)]
        cols += [ip, im]
        vals += [up, lo]
        diag -= up + lo
    rows.append(np.arange(N))
    cols.append(np.arange(N))
    vals.append(diag)
    A = sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N))
    return X, Y, h, A


def dense_principal(A, h):
    w, V = np.linalg.eig(A)
    k = np.argmin(w.real)
    u = V[:, k].real
    u = u * np.sign(u.sum())
    u /= np.sqrt(np.sum(u**2) * h)
    return w[k].real, u


def sparse_principal(A, cell):
    shift = -1.0
    w, V = spla.eigs(A, k=1, sigma=shift, which="LM", tol=1e-13)
    u = V[:, 0].real
    u = u * np.sign(u.sum())
    u /= np.sqrt(np.sum(u**2) * cell)
    return w[0].real, u


def main():
    print("# circle_well n=256, a = 2 + cos x")
    for eps in (0.2, 0.1, 0.05, 0.02, 0.01):
        x, A = circle_matrix(256, eps, lambda x: 0 * x, lambda x: 2 + np.cos(x))
        lam, u = dense_principal(A, TWO_PI / 256)
        d = np.abs(np.angle(np.exp(1j * (x - np.pi))))
        mass = np.sum(u[d <= 0.5] ** 2) * TWO_PI / 256
        print(f"circle_well eps={eps} lambda={lam:.15g} mass_pi_0.5={mass:.15g}")

    print("# 1-D fixtures at n=64")
    fixtures = {
        "constant_identity": (lambda x: 0 * x, lambda x: 5 + 0 * x, (1, 0.1, 0.01)),
        "circle_well": (lambda x: 0 * x, lambda x: 2 + np.cos(x), (0.2, 0.1, 0.05, 0.02, 0.01)),
        "circle_sine_pressure": (lambda x: -np.sin(x), lambda x: 1 + 0.75 * np.cos(x), (0.2, 0.1, 0.05, 0.02, 0.01)),
    }
    for name, (bf, cf, epss) in fixtures.items():
        for eps in epss:
            x, A = circle_matrix(64, eps, bf, cf)
            lam, u = dense_principal(A, TWO_PI / 64)
            print(f"n64 {name} eps={eps} lambda={lam:.15g} u0={u[0]:.15g} umax={u.max():.15g}")

    print("# torus_morse n=128, b = (sin x, sin y), c = 1 + (cos x + cos y)/4, phi = -(cos x + cos y)")
    pts = [(0, 0), (0, np.pi), (np.pi, 0), (np.pi, np.pi)]
    for eps in (0.2, 0.1, 0.05, 0.02):
        X, Y, h, A = torus_matrix(128, eps, lambda X, Y: np.sin(X), lambda X, Y: np.sin(Y),
                                  lambda X, Y: 1 + 0.25 * (np.cos(X) + np.cos(Y)))
        lam, u = sparse_principal(A, h * h)
        phi = -(np.cos(X) + np.cos(Y))
        w = np.exp(-(phi - phi.min()) / eps) * u**2
        w /= w.sum() * h * h
        total = 0.0
        for P in pts:
            dx = np.angle(np.exp(1j * (X - P[0])))
            dy = np.angle(np.exp(1j * (Y - P[1])))
            total += w[dx**2 + dy**2 <= 0.4**2].sum() * h * h
        print(f"torus_morse eps={eps} lambda={lam:.15g} ball_total={total:.15g}")


if __name__ == "__main__":
    main()
