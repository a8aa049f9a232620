"""Throwaway Poisson MLE used only as a test oracle.

Plain Newton-Raphson on the raw design with a Gauss-Jordan solve written
out by hand: no standardization, no step halving, nothing shared with the
package's fitter.
"""

import math


def _solve(A, b):
    n = len(b)
    M = [list(map(float, row)) + [float(v)] for row, v in zip(A, b)]
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(M[r][c]))
        M[c], M[piv] = M[piv], M[c]
        for r in range(n):
            if r != c:
                f = M[r][c] / M[c][c]
                M[r] = [a - f * p for a, p in zip(M[r], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def newton_mle(y, covariates, iters=100):
    rows = [[1.0] + [float(v) for v in row] for row in covariates]
    p = len(rows[0])
    beta = [math.log(sum(y) / len(y))] + [0.0] * (p - 1)
    for _ in range(iters):
        mu = [math.exp(sum(b * x for b, x in zip(beta, row))) for row in rows]
        grad = [sum(row[j] * (yi - m) for row, yi, m in zip(rows, y, mu)) for j in range(p)]
        info = [[sum(row[j] * row[k] * m for row, m in zip(rows, mu)) for k in range(p)] for j in range(p)]
        step = _solve(info, grad)
        beta = [b + s for b, s in zip(beta, step)]
        if max(abs(s) for s in step) < 1e-14:
            break
    return beta
