"""Independent reference implementations used as test oracles.

Everything here works on plain Python lists of ``Fraction`` and follows the
definitions literally, sharing no code with the package.
"""

from fractions import Fraction

import numpy as np


def naive_empirical(xs, ys):
    """Domains and values of the empirical subcopula by the literal double loop."""
    n = len(xs)
    r = sorted(set(xs))
    s = sorted(set(ys))
    q1 = [Fraction(0)]
    for ri in r:
        q1.append(q1[-1] + Fraction(sum(1 for x in xs if x == ri), n))
    q2 = [Fraction(0)]
    for sj in s:
        q2.append(q2[-1] + Fraction(sum(1 for y in ys if y == sj), n))
    S = [[Fraction(0)] * (len(s) + 1) for _ in range(len(r) + 1)]
    for i, ri in enumerate(r, start=1):
        for j, sj in enumerate(s, start=1):
            S[i][j] = Fraction(sum(1 for x, y in zip(xs, ys) if x <= ri and y <= sj), n)
    return q1, q2, S


def naive_d(q1, q2, S):
    pos = max(S[i][j] - q1[i] * q2[j] for i in range(len(q1)) for j in range(len(q2)))
    neg = max(q1[i] * q2[j] - S[i][j] for i in range(len(q1)) for j in range(len(q2)))
    return pos - neg


def naive_mu(xs, ys):
    q1, q2, S = naive_empirical(xs, ys)
    if len(q1) == 2 or len(q2) == 2:
        return Fraction(0)
    d = naive_d(q1, q2, S)
    M = [[min(u, v) for v in q2] for u in q1]
    W = [[max(u + v - 1, Fraction(0)) for v in q2] for u in q1]
    if d >= 0:
        return d / naive_d(q1, q2, M)
    return -d / naive_d(q1, q2, W)


def brute_bound(n, kind):
    """d(M) or d(W) on the grid {0, 1/n, ..., 1} by scanning all (n+1)^2 points.

    Works in integer units of 1/n^2, so the result is exact.
    """
    k = np.arange(n + 1)
    i, j = np.meshgrid(k, k, indexing="ij")
    f = np.minimum(i, j) if kind == "M" else np.maximum(i + j - n, 0)
    gap = n * f - i * j
    return Fraction(int(gap.max()) - int((-gap).max()), n * n)
