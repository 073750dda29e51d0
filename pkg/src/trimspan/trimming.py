"""Trimming transformation, stabilized trimming sequences and the series sigma.

For a finite metric space the tower ``X_0 -> X_1 -> ...`` becomes constant
after at most ``card(X)`` steps: each non-identity step either merges points
or, without a merge, lands on a trim space whose next step is the identity.
We stop at the first trim level ``N`` (a singleton counts as trim), so
``X_inf = X_N`` and ``d_inf = d_N`` exactly.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Optional

from .errors import InvariantError, NeverMeets, UnknownPoint
from .metric import (
    FiniteMetricSpace,
    QuotientMap,
    drift,
    metric_quotient,
    underline_d,
)

ZERO = Fraction(0)


@dataclass(frozen=True)
class TrimLevel:
    space: FiniteMetricSpace
    underline: Mapping[str, Fraction]
    projection: Optional[QuotientMap]


def _trim(S, ud):
    lowered = drift(S, ud)
    return metric_quotient(lowered)


def trim_step(S):
    """Return ``(t(S), p_S)``: the metric quotient of ``d - ud(x) - ud(y)``."""
    _require_metric(S)
    return _trim(S, underline_d(S))


def _require_metric(S):
    if not isinstance(S, FiniteMetricSpace):
        raise TypeError("trimming needs a FiniteMetricSpace; take metric_quotient first")


@dataclass(frozen=True)
class TrimSequence:
    levels: tuple
    N: int

    @property
    def base(self):
        return self.levels[0].space

    @property
    def x_infinity(self):
        return self.levels[self.N].space

    @cached_property
    def chains(self):
        """``chains[k][v]`` lists the images of level-``k`` point ``v`` at levels k..N."""
        out = []
        for k, level in enumerate(self.levels):
            table = {}
            for v in level.space.labels:
                path = [v]
                for lower in self.levels[k : self.N]:
                    path.append(lower.projection.assignment[path[-1]])
                table[v] = tuple(path)
            out.append(table)
        return out

    def image(self, k, v, level):
        """The image of ``v`` in ``X_k`` at ``X_level`` (level >= k; capped at N)."""
        if level < k:
            raise ValueError(f"cannot map level {k} up to level {level}")
        try:
            chain = self.chains[k][v]
        except (IndexError, KeyError):
            raise UnknownPoint(v) from None
        return chain[min(level, self.N) - k]

    def point(self, x, k):
        """``x_(k)`` for ``x`` in ``X_0``."""
        return self.image(0, x, k)

    @cached_property
    def to_infinity(self):
        return {x: self.point(x, self.N) for x in self.base.labels}

    def underline(self, k, v):
        if k >= self.N:
            return ZERO
        return self.levels[k].underline[v]

    def d_infinity(self, u, v):
        return self.x_infinity.d(u, v)

    @cached_property
    def tails(self):
        """``tails[k][v] = sum_{s >= k} ud_s(v_(s))``: sigma at a cylinder vertex."""
        out = []
        for k, level in enumerate(self.levels):
            out.append(
                {
                    v: sum(
                        (self.underline(s, self.image(k, v, s)) for s in range(k, self.N)),
                        ZERO,
                    )
                    for v in level.space.labels
                }
            )
        return out

    @cached_property
    def sigma_table(self):
        return dict(self.tails[0])

    @cached_property
    def partial_sums(self):
        """``partial_sums[n][x] = sigma^n(x)`` for ``0 <= n <= N``."""
        labels = self.base.labels
        out = [{x: ZERO for x in labels}]
        for k in range(self.N):
            prev = out[-1]
            out.append({x: prev[x] + self.underline(k, self.point(x, k)) for x in labels})
        return out


def trimming_sequence(S):
    """Iterate trimming until the current level is trim."""
    _require_metric(S)
    levels = []
    current = S
    while True:
        ud = underline_d(current)
        if all(v == 0 for v in ud.values()):
            levels.append(TrimLevel(current, ud, None))
            break
        nxt, proj = _trim(current, ud)
        levels.append(TrimLevel(current, ud, proj))
        current = nxt
        if len(levels) > len(S):
            raise InvariantError(f"trimming did not stabilize within {len(S)} steps")
    return TrimSequence(tuple(levels), len(levels) - 1)


def meeting_index(seq, x, y):
    """Smallest ``k`` with ``x_(k) = y_(k)``; raises :class:`NeverMeets` otherwise."""
    cx = seq.chains[0].get(x)
    cy = seq.chains[0].get(y)
    if cx is None:
        raise UnknownPoint(x)
    if cy is None:
        raise UnknownPoint(y)
    for k, (a, b) in enumerate(zip(cx, cy)):
        if a == b:
            return k
    raise NeverMeets(x, y)


def congruent(seq, x, y):
    """``x`` and ``y`` map to the same point of ``X_inf``."""
    return seq.point(x, seq.N) == seq.point(y, seq.N)


def sigma_partial(seq, x, n):
    """``sum_{k < n} ud_k(x_(k))``; ``n = 0`` gives 0, ``n >= N`` gives sigma."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if x not in seq.base:
        raise UnknownPoint(x)
    return seq.partial_sums[min(n, seq.N)][x]


def sigma(seq, x):
    """The full series; all terms from level N on vanish."""
    try:
        return seq.sigma_table[x]
    except KeyError:
        raise UnknownPoint(x) from None


def sigma_levels(seq):
    """``[sigma^0, ..., sigma^N]`` as dicts over ``X_0``."""
    return [dict(row) for row in seq.partial_sums]
