"""Finite (pseudo)metric spaces with exact rational distances.

A space is an ordered tuple of string labels plus a symmetric table of
:class:`~fractions.Fraction` distances.  Everything here is immutable and
pure.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import lcm
from typing import Mapping, Sequence

from . import _kernels
from ._exact import as_fraction, common_denominator, from_int, to_int_array
from .errors import (
    AsymmetryError,
    DriftTooLarge,
    EmptySpace,
    InvariantError,
    NegativeDistanceError,
    NonzeroDiagonalError,
    TriangleViolation,
    UnknownPoint,
)

DriftFunction = Mapping[str, Fraction]

ZERO = Fraction(0)


@dataclass(frozen=True)
class FinitePseudometricSpace:
    labels: tuple
    dist: tuple

    @cached_property
    def index(self):
        return {label: i for i, label in enumerate(self.labels)}

    def __len__(self):
        return len(self.labels)

    def __contains__(self, label):
        return label in self.index

    def position(self, label):
        try:
            return self.index[label]
        except KeyError:
            raise UnknownPoint(label) from None

    def d(self, x, y):
        return self.dist[self.position(x)][self.position(y)]

    @property
    def is_metric(self):
        return isinstance(self, FiniteMetricSpace)

    @cached_property
    def scaled(self):
        """``(den, M)`` with ``M`` the integer table ``den * dist``."""
        den = 1
        for row in self.dist:
            den = lcm(den, common_denominator(row))
        return den, to_int_array(self.dist, den)

    def eccentricity(self, x):
        i = self.position(x)
        return max(self.dist[i])

    def items(self):
        """Yield ``(x, y, d(x, y))`` for unordered pairs of distinct points."""
        for i, j in combinations(range(len(self.labels)), 2):
            yield self.labels[i], self.labels[j], self.dist[i][j]


@dataclass(frozen=True)
class FiniteMetricSpace(FinitePseudometricSpace):
    pass


@dataclass(frozen=True)
class QuotientMap:
    source: FinitePseudometricSpace
    target: FiniteMetricSpace
    assignment: Mapping[str, str]

    def __call__(self, x):
        try:
            return self.assignment[x]
        except KeyError:
            raise UnknownPoint(x) from None

    def fibers(self):
        out = {v: [] for v in self.target.labels}
        for x in self.source.labels:
            out[self.assignment[x]].append(x)
        return out

    @property
    def is_identity(self):
        return len(self.target) == len(self.source) and all(
            self.assignment[x] == x for x in self.source.labels
        )


def validate_space(table, labels=None):
    """Check the pseudometric axioms exactly and return a typed space.

    ``table`` is a square nested sequence of numbers (ints, Fractions,
    decimal strings, ``"p/q"`` strings, floats).  The result is a
    :class:`FiniteMetricSpace` when all off-diagonal entries are positive,
    otherwise a :class:`FinitePseudometricSpace`.
    """
    rows = [list(r) for r in table]
    n = len(rows)
    if n == 0:
        raise EmptySpace("a space needs at least one point")
    if labels is None:
        labels = [f"p{i}" for i in range(n)]
    labels = tuple(str(label) for label in labels)
    if len(labels) != n:
        raise ValueError(f"{len(labels)} labels for a {n}x{n} table")
    if len(set(labels)) != n:
        raise ValueError("labels must be distinct")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValueError(f"row {i} has {len(row)} entries, expected {n}")
    dist = tuple(tuple(as_fraction(v) for v in row) for row in rows)

    for i in range(n):
        if dist[i][i] != 0:
            raise NonzeroDiagonalError(
                f"d({labels[i]},{labels[i]}) = {dist[i][i]} != 0", (labels[i],)
            )
    for i in range(n):
        for j in range(n):
            if dist[i][j] < 0:
                raise NegativeDistanceError(
                    f"d({labels[i]},{labels[j]}) = {dist[i][j]} < 0", (labels[i], labels[j])
                )
    for i, j in combinations(range(n), 2):
        if dist[i][j] != dist[j][i]:
            raise AsymmetryError(
                f"d({labels[i]},{labels[j]}) = {dist[i][j]} but "
                f"d({labels[j]},{labels[i]}) = {dist[j][i]}",
                (labels[i], labels[j]),
            )

    metric = all(dist[i][j] > 0 for i, j in combinations(range(n), 2))
    space = (FiniteMetricSpace if metric else FinitePseudometricSpace)(labels, dist)
    hit = _kernels.triangle_violation(space.scaled[1])
    if hit is not None:
        i, j, k = hit
        x, y, z = labels[i], labels[j], labels[k]
        raise TriangleViolation(
            f"d({x},{y}) + d({y},{z}) = {dist[i][j] + dist[j][k]} < d({x},{z}) = {dist[i][k]}",
            (x, y, z),
        )
    return space


def gromov_product(S, x, y, z):
    """``(d(x,y) + d(x,z) - d(y,z)) / 2``, the overlap of geodesics from ``x``."""
    return (S.d(x, y) + S.d(x, z) - S.d(y, z)) / 2


def underline_d(S):
    """The function ``x -> min Gromov product at x over pairs of other points``.

    Singletons get 0 and two-point spaces get half the distance at both
    points (the min over an empty set is never taken).  Returns a dict in
    label order.
    """
    n = len(S)
    if n == 0:
        raise EmptySpace("underline_d of an empty space")
    if n == 1:
        return {S.labels[0]: ZERO}
    if n == 2:
        half = S.dist[0][1] / 2
        return {S.labels[0]: half, S.labels[1]: half}
    den, M = S.scaled
    twice = _kernels.underline_twice(M)
    return {label: from_int(v, 2 * den) for label, v in zip(S.labels, twice)}


def is_trim(S):
    return all(v == 0 for v in underline_d(S).values())


def lies_between(S, x, y, z):
    """Menger betweenness: ``x`` lies between ``y`` and ``z``."""
    return S.d(y, z) == S.d(x, y) + S.d(x, z)


def menger_sufficient_trim(S):
    """Every point lies between two distinct other points (sufficient for trim)."""
    if len(S) == 0:
        raise EmptySpace("empty space")
    for x in S.labels:
        others = [y for y in S.labels if y != x]
        if not any(lies_between(S, x, y, z) for y, z in combinations(others, 2)):
            return False
    return True


def drift(S, delta):
    """Pull every point towards all others: ``d(x,y) - delta(x) - delta(y)``.

    ``delta`` must not exceed :func:`underline_d` anywhere; the result is
    validated as a pseudometric and, when the drift lemma applies, its own
    underline_d is checked to equal ``underline_d(S) - delta``.
    """
    ud = underline_d(S)
    delta = {x: as_fraction(delta[x]) for x in S.labels}
    for x in S.labels:
        if delta[x] > ud[x]:
            raise DriftTooLarge(x, delta[x], ud[x])
    n = len(S)
    table = [
        [
            ZERO if i == j else S.dist[i][j] - delta[S.labels[i]] - delta[S.labels[j]]
            for j in range(n)
        ]
        for i in range(n)
    ]
    out = validate_space(table, S.labels)
    if n >= 3 or (n == 2 and len(set(delta.values())) == 1):
        got = underline_d(out)
        for x in S.labels:
            if got[x] != ud[x] - delta[x]:
                raise InvariantError(f"drift lemma fails at {x!r}: {got[x]} != {ud[x] - delta[x]}")
    return out


def metric_quotient(P):
    """Glue points at distance zero.

    Target points are named by the lexicographically least label of their
    class and listed in order of first appearance.  Returns
    ``(FiniteMetricSpace, QuotientMap)``.
    """
    n = len(P)
    if n == 0:
        raise EmptySpace("quotient of an empty space")
    classes = []
    owner = [-1] * n
    for i in range(n):
        if owner[i] >= 0:
            continue
        members = [j for j in range(n) if P.dist[i][j] == 0]
        for j in members:
            if owner[j] >= 0:
                raise InvariantError("zero-distance relation is not transitive")
            owner[j] = len(classes)
        classes.append(members)
    for members in classes:
        for a, b in combinations(members, 2):
            if P.dist[a][b] != 0:
                raise InvariantError("zero-distance relation is not transitive")

    names = [min(P.labels[j] for j in members) for members in classes]
    reps = [members[0] for members in classes]
    m = len(classes)
    table = [[P.dist[reps[a]][reps[b]] for b in range(m)] for a in range(m)]
    for a, b in combinations(range(m), 2):
        for i in classes[a]:
            for j in classes[b]:
                if P.dist[i][j] != table[a][b]:
                    raise InvariantError("quotient distance depends on representatives")
    target = validate_space(table, names)
    if not isinstance(target, FiniteMetricSpace):
        raise InvariantError("metric quotient is not a metric")
    assignment = {P.labels[j]: names[owner[j]] for j in range(n)}
    return target, QuotientMap(P, target, assignment)


def subspace(S, labels):
    idx = [S.position(x) for x in labels]
    table = [[S.dist[i][j] for j in idx] for i in idx]
    return validate_space(table, labels)


def relabel(S, labels: Sequence[str]):
    return validate_space(S.dist, labels)
