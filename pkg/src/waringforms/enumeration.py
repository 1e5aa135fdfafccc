"""Fincke-Pohst enumeration of short vectors in Z-lattices with rational Gram.

The Gram matrix is LLL-reduced exactly before enumerating, and vectors are
mapped back to the input coordinates.  Pruning runs in floating point with a generous tolerance; every vector that
is returned has had its value recomputed exactly, so the float path can only
cost extra nodes, never a wrong answer.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

_REL_TOL = 1e-7


class EnumerationError(ValueError):
    pass


def quadratic_value(G: Sequence[Sequence[Fraction]], x: Sequence[int]) -> Fraction:
    """Exact value x^T G x."""
    support = [i for i, xi in enumerate(x) if xi]
    total = Fraction(0)
    for i in support:
        row = G[i]
        xi = x[i]
        acc = Fraction(0)
        for j in support:
            acc += row[j] * x[j]
        total += xi * acc
    return total


def _float_ldl(G):
    """Float q_i, m_ij with x^T G x = sum_i q_i (x_i + sum_{j>i} m_ij x_j)^2."""
    n = len(G)
    g = [[float(G[i][j]) for j in range(n)] for i in range(n)]
    q = [0.0] * n
    m = [[0.0] * n for _ in range(n)]
    for i in range(n):
        s = g[i][i]
        for k in range(i):
            s -= m[k][i] * m[k][i] * q[k]
        if not s > 0:
            raise EnumerationError("Gram matrix is not positive definite")
        q[i] = s
        for j in range(i + 1, n):
            t = g[i][j]
            for k in range(i):
                t -= m[k][i] * m[k][j] * q[k]
            m[i][j] = t / s
    return q, m


def _gso(G):
    """Exact Gram-Schmidt data: mu[i][j] (j < i) and squared lengths b[i]."""
    n = len(G)
    mu = [[Fraction(0)] * n for _ in range(n)]
    b = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            t = Fraction(G[i][j])
            for k in range(j):
                t -= mu[j][k] * mu[i][k] * b[k]
            mu[i][j] = t / b[j]
        t = Fraction(G[i][i])
        for k in range(i):
            t -= mu[i][k] * mu[i][k] * b[k]
        if t <= 0:
            raise EnumerationError("Gram matrix is not positive definite")
        b[i] = t
    return mu, b


def lll_gram(G, delta: Fraction = Fraction(99, 100)):
    """(G', B) with G' = B^T G B LLL-reduced and B unimodular; B[i] is the i-th new basis vector."""
    n = len(G)
    G = [[Fraction(x) for x in row] for row in G]
    B = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    if n < 2:
        _gso(G)
        return G, B
    mu, b = _gso(G)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = math.floor(mu[k][j] + Fraction(1, 2))
            if not q:
                continue
            for l in range(n):
                G[k][l] -= q * G[j][l]
            for l in range(n):
                G[l][k] -= q * G[l][j]
            B[k] = [x - q * y for x, y in zip(B[k], B[j])]
            for l in range(j):
                mu[k][l] -= q * mu[j][l]
            mu[k][j] -= q
        if b[k] >= (delta - mu[k][k - 1] ** 2) * b[k - 1]:
            k += 1
            continue
        G[k], G[k - 1] = G[k - 1], G[k]
        for row in G:
            row[k], row[k - 1] = row[k - 1], row[k]
        B[k], B[k - 1] = B[k - 1], B[k]
        mu, b = _gso(G)
        k = max(k - 1, 1)
    return G, B


def _to_input(B, y) -> tuple[int, ...]:
    n = len(B)
    return tuple(sum(y[i] * B[i][c] for i in range(n)) for c in range(n))


def _search(G, bound: Fraction, shrink: bool, node_cap: int | None = None):
    n = len(G)
    q, m = _float_ldl(G)
    best = Fraction(bound)
    found: list[tuple[tuple[int, ...], Fraction]] = []
    x = [0] * n
    partial = [0.0] * (n + 1)
    nodes = 0

    def slack(b: Fraction) -> float:
        bf = float(b)
        return bf + _REL_TOL * (abs(bf) + 1.0)

    limit = slack(best)

    def rec(i: int):
        nonlocal limit, best, nodes
        nodes += 1
        if node_cap is not None and nodes > node_cap:
            raise EnumerationError("enumeration node cap exceeded")
        c = 0.0
        for j in range(i + 1, n):
            c -= m[i][j] * x[j]
        rem = limit - partial[i + 1]
        if rem < 0:
            return
        r = math.sqrt(rem / q[i])
        lo = math.ceil(c - r)
        hi = math.floor(c + r)
        if lo > hi:
            return
        # zig-zag from the centre so short vectors are met early
        centre = min(max(round(c), lo), hi)
        order = [centre]
        step = 1
        while centre - step >= lo or centre + step <= hi:
            if centre + step <= hi:
                order.append(centre + step)
            if centre - step >= lo:
                order.append(centre - step)
            step += 1
        for xi in order:
            d = xi - c
            p = partial[i + 1] + q[i] * d * d
            if p > limit:
                continue
            x[i] = xi
            partial[i] = p
            if i == 0:
                if any(x):
                    val = quadratic_value(G, x)
                    if val <= best:
                        if shrink and val < best:
                            best = val
                            limit = slack(best)
                            found[:] = [f for f in found if f[1] <= best]
                        found.append((tuple(x), val))
            else:
                rec(i - 1)
        x[i] = 0

    if n:
        rec(n - 1)
    return best, found


def short_vectors(G, bound, node_cap: int | None = None):
    """All nonzero integer x with x^T G x <= bound, as (x, value) pairs.

    Both x and -x are reported.
    """
    Gr, B = lll_gram(G)
    _, found = _search(Gr, Fraction(bound), shrink=False, node_cap=node_cap)
    return sorted(((_to_input(B, y), v) for y, v in found), key=lambda f: (f[1], f[0]))


def shortest_vectors(G, node_cap: int | None = None):
    """The minimum of x^T G x over nonzero integer x and every vector attaining it."""
    n = len(G)
    if n == 0:
        raise EnumerationError("empty lattice")
    Gr, B = lll_gram(G)
    start = min(Gr[i][i] for i in range(n))
    best, found = _search(Gr, start, shrink=True, node_cap=node_cap)
    return best, sorted(_to_input(B, y) for y, v in found if v == best)
