"""Brute-force reference implementations used only by the tests.

Plain nested loops over Fractions, written from the definitions and sharing
no code with the package.
"""

from fractions import Fraction
from itertools import combinations


def F(table):
    return [[Fraction(v) for v in row] for row in table]


def gromov(D, x, y, z):
    return (D[x][y] + D[x][z] - D[y][z]) / 2


def underline(D):
    n = len(D)
    if n == 1:
        return [Fraction(0)]
    if n == 2:
        return [D[0][1] / 2, D[0][1] / 2]
    out = []
    for x in range(n):
        others = [y for y in range(n) if y != x]
        out.append(min(gromov(D, x, y, z) for y, z in combinations(others, 2)))
    return out


def trim_once(D):
    """One trimming step: ``(new table, class index per old point, underline)``."""
    n = len(D)
    ud = underline(D)
    lowered = [[Fraction(0) if i == j else D[i][j] - ud[i] - ud[j] for j in range(n)] for i in range(n)]
    cls = [-1] * n
    reps = []
    for i in range(n):
        if cls[i] < 0:
            cls[i] = len(reps)
            reps.append(i)
            for j in range(i + 1, n):
                if lowered[i][j] == 0:
                    cls[j] = cls[i]
    new = [[lowered[a][b] for b in reps] for a in reps]
    return new, cls, ud


def trimming(D):
    """All levels as ``(table, underline, class map to the next level)`` up to the first trim one."""
    levels = []
    cur = F(D)
    for _ in range(len(D) + 2):
        new, cls, ud = trim_once(cur)
        if all(v == 0 for v in ud):
            levels.append((cur, ud, None))
            return levels
        levels.append((cur, ud, cls))
        cur = new
    raise AssertionError("trimming did not stabilize")


def sigma(levels, n_points):
    """sigma per original point (index), following the class maps."""
    out = []
    for x in range(n_points):
        total, pos = Fraction(0), x
        for table, ud, cls in levels:
            total += ud[pos]
            if cls is None:
                break
            pos = cls[pos]
        out.append(total)
    return out


def in_tight_span(D, f):
    """Classical definition: ``f(x) = max over all y (including x) of d(x,y) - f(y)``."""
    n = len(D)
    f = [Fraction(v) for v in f]
    return all(f[x] == max(D[x][y] - f[y] for y in range(n)) for x in range(n))


def floyd(nodes, edges):
    """All-pairs shortest paths over an undirected weighted graph (Fractions)."""
    INF = None
    dist = {(a, b): (Fraction(0) if a == b else INF) for a in nodes for b in nodes}
    for a, b, w in edges:
        for p, q in ((a, b), (b, a)):
            if dist[p, q] is None or w < dist[p, q]:
                dist[p, q] = w
    for k in nodes:
        for i in nodes:
            if dist[i, k] is None:
                continue
            for j in nodes:
                if dist[k, j] is None:
                    continue
                v = dist[i, k] + dist[k, j]
                if dist[i, j] is None or v < dist[i, j]:
                    dist[i, j] = v
    return dist
