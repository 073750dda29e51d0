"""Integer kernels for the O(n^2)/O(n^3) inner loops.

Every kernel works on integer tables that the callers obtained by scaling
rationals to a common denominator, so results stay exact.  Two backends:

* ``numba``: ``@njit`` loops over int64 arrays.
* ``numpy``: vectorized code that also accepts ``dtype=object`` arrays of
  Python ints, which is the overflow escape hatch for huge denominators.

``TRIMSPAN_BACKEND=numpy`` forces the numpy path; the default is numba when
it imports.  Object arrays always take the numpy path.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

BACKEND = os.environ.get("TRIMSPAN_BACKEND", "numba").strip().lower()
if BACKEND not in ("numba", "numpy"):
    raise ImportError(f"TRIMSPAN_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")
USE_NUMBA = BACKEND == "numba" and numba is not None


# --------------------------------------------------------------------------
# numpy implementations (dtype-agnostic)


def np_underline_twice(M):
    n = M.shape[0]
    out = np.empty(n, dtype=M.dtype)
    idx = np.arange(n)
    for x in range(n):
        others = idx[idx != x]
        sub = M[np.ix_(others, others)]
        g = M[x, others][:, None] + M[x, others][None, :] - sub
        iu = np.triu_indices(len(others), k=1)
        out[x] = g[iu].min()
    return out


def np_triangle_violation(M):
    n = M.shape[0]
    for i in range(n):
        bad = M[i, :][:, None] + M < M[i, :][None, :]
        hits = np.argwhere(bad)
        if len(hits):
            j, k = hits[0]
            return int(i), int(j), int(k)
    return None


def np_best_response(M, F):
    S, n = F.shape
    B = np.empty((S, n), dtype=object if object in (M.dtype, F.dtype) else np.int64)
    W = np.empty((S, n), dtype=np.int64)
    idx = np.arange(n)
    for x in range(n):
        others = idx[idx != x]
        vals = M[x, others][None, :] - F[:, others]
        arg = vals.argmax(axis=1)
        B[:, x] = vals[np.arange(S), arg]
        W[:, x] = others[arg]
    return B, W


def np_project_pass(M, F):
    F = F.copy()
    n = F.shape[1]
    idx = np.arange(n)
    for x in range(n):
        others = idx[idx != x]
        if len(others) == 0:
            F[:, x] = 0
            continue
        best = (M[x, others][None, :] - F[:, others]).max(axis=1)
        F[:, x] = np.maximum(best, 0)
    return F


def np_sup_distances(F):
    P = F.shape[0]
    out = np.empty((P, P), dtype=F.dtype)
    for a in range(P):
        out[a, :] = np.abs(F - F[a][None, :]).max(axis=1)
    return out


def np_metric_closure(M):
    M = M.copy()
    for k in range(M.shape[0]):
        M = np.minimum(M, M[:, k][:, None] + M[k, :][None, :])
    return M


# --------------------------------------------------------------------------
# numba implementations (int64 only)

if numba is not None:

    @numba.njit(cache=True)
    def nb_underline_twice(M):
        n = M.shape[0]
        out = np.empty(n, dtype=np.int64)
        for x in range(n):
            first = True
            best = 0
            for y in range(n):
                if y == x:
                    continue
                for z in range(y + 1, n):
                    if z == x:
                        continue
                    g = M[x, y] + M[x, z] - M[y, z]
                    if first or g < best:
                        best = g
                        first = False
            out[x] = best
        return out

    @numba.njit(cache=True)
    def nb_triangle_violation(M):
        n = M.shape[0]
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if M[i, j] + M[j, k] < M[i, k]:
                        return i, j, k
        return -1, -1, -1

    @numba.njit(cache=True)
    def nb_best_response(M, F):
        S, n = F.shape
        B = np.empty((S, n), dtype=np.int64)
        W = np.empty((S, n), dtype=np.int64)
        for s in range(S):
            for x in range(n):
                first = True
                best = 0
                arg = -1
                for y in range(n):
                    if y == x:
                        continue
                    v = M[x, y] - F[s, y]
                    if first or v > best:
                        best = v
                        arg = y
                        first = False
                B[s, x] = best
                W[s, x] = arg
        return B, W

    @numba.njit(cache=True)
    def nb_project_pass(M, F):
        F = F.copy()
        S, n = F.shape
        for s in range(S):
            for x in range(n):
                best = 0
                for y in range(n):
                    if y == x:
                        continue
                    v = M[x, y] - F[s, y]
                    if v > best:
                        best = v
                F[s, x] = best
        return F

    @numba.njit(cache=True)
    def nb_sup_distances(F):
        P, n = F.shape
        out = np.zeros((P, P), dtype=np.int64)
        for a in range(P):
            for b in range(a + 1, P):
                m = 0
                for x in range(n):
                    v = abs(F[a, x] - F[b, x])
                    if v > m:
                        m = v
                out[a, b] = m
                out[b, a] = m
        return out

    @numba.njit(cache=True)
    def nb_metric_closure(M):
        M = M.copy()
        n = M.shape[0]
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    v = M[i, k] + M[k, j]
                    if v < M[i, j]:
                        M[i, j] = v
        return M


# --------------------------------------------------------------------------
# dispatch


def _fast(*arrays):
    return USE_NUMBA and all(a.dtype == np.int64 for a in arrays)


def _c(a):
    return np.ascontiguousarray(a)


def underline_twice(M):
    """Per point, twice the minimal Gromov product over pairs of other points.

    Requires at least three points.
    """
    if _fast(M):
        return nb_underline_twice(_c(M))
    return np_underline_twice(M)


def triangle_violation(M):
    """Lexicographically first ``(i, j, k)`` with ``M[i,j] + M[j,k] < M[i,k]``."""
    if _fast(M):
        hit = nb_triangle_violation(_c(M))
        return None if hit[0] < 0 else tuple(int(v) for v in hit)
    return np_triangle_violation(M)


def best_response(M, F):
    """``B[s,x] = max_{y != x} M[x,y] - F[s,y]`` with first argmax ``W``."""
    if _fast(M, F):
        return nb_best_response(_c(M), _c(F))
    return np_best_response(M, F)


def project_pass(M, F):
    """One sequential coordinate pass ``F[s,x] <- max(0, best response)``."""
    if _fast(M, F):
        return nb_project_pass(_c(M), _c(F))
    return np_project_pass(M, F)


def sup_distances(F):
    """Pairwise sup-norm distances between the rows of ``F``."""
    if _fast(F):
        return nb_sup_distances(_c(F))
    return np_sup_distances(F)


def metric_closure(M):
    """Shortest-path closure (Floyd-Warshall)."""
    if _fast(M):
        return nb_metric_closure(_c(M))
    return np_metric_closure(M)
