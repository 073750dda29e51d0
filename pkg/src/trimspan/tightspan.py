"""Tight span of a finite metric space and its decomposition by trimming.

A function ``f`` on ``X`` belongs to ``T(X)`` when for every ``x``
``f(x) = max_{y != x} (d(x,y) - f(y))`` (singleton: ``f = 0``).  For finite
``X`` the supremum is a maximum, so membership is decided exactly and comes
with a witness ``y`` per point.

The decomposition sorts every member into one of three verdicts: a branch
point of the quotient cylinder (``f = f_a`` with ``sigma(a) > 0``), a
member of ``tau`` (``f = sigma + f_inf`` lifted from ``T(X_inf)``), or a root,
which is both.
"""

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Optional

from . import _kernels
from ._exact import as_fraction, from_int, scale_together
from .cylinder import (
    EdgeInterior,
    Vertex,
    point_on_edge,
    rho,
    rho_matrix,
    sigma_point,
)
from .errors import (
    BaseMismatch,
    InternalContradiction,
    InvariantError,
    NotMember,
    StarViolation,
)
from .metric import metric_quotient

ZERO = Fraction(0)

BRANCH = "branch"
ROOT = "root"
TAU = "tau"


@dataclass(frozen=True)
class TightSpanFunction:
    base: object
    values: tuple

    def __post_init__(self):
        values = tuple(as_fraction(v) for v in self.values)
        if len(values) != len(self.base.labels):
            raise ValueError(f"{len(values)} values for {len(self.base.labels)} points")
        for label, v in zip(self.base.labels, values):
            if v < 0:
                raise ValueError(f"negative value {v} at {label!r}")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, base, mapping):
        missing = [x for x in base.labels if x not in mapping]
        if missing:
            raise ValueError(f"no value for {missing}")
        extra = set(mapping) - set(base.labels)
        if extra:
            raise ValueError(f"unknown points {sorted(extra)}")
        return cls(base, tuple(mapping[x] for x in base.labels))

    def __getitem__(self, label):
        return self.values[self.base.position(label)]

    def as_dict(self):
        return dict(zip(self.base.labels, self.values))

    def dominates(self, other):
        """Pointwise ``self >= other`` where ``other`` maps labels to rationals."""
        return all(v >= other[x] for x, v in zip(self.base.labels, self.values))


@dataclass(frozen=True)
class Membership:
    """Outcome of a membership test.

    ``witnesses[x]`` is a ``y != x`` attaining ``max_y d(x,y) - f(y)``.  On
    failure exactly one of ``star_violation`` (a pair with
    ``f(x) + f(y) < d(x,y)``) or ``slack`` (a point where ``f`` exceeds that
    maximum, with the excess) is set.
    """

    member: bool
    witnesses: Mapping[str, str]
    star_violation: Optional[tuple] = None
    slack: Optional[tuple] = None

    def __bool__(self):
        return self.member


def _values(S, f):
    if isinstance(f, TightSpanFunction):
        if f.base.labels != S.labels:
            raise BaseMismatch("function is defined on a different point set")
        return f.values
    if isinstance(f, Mapping):
        return tuple(as_fraction(f[x]) for x in S.labels)
    values = tuple(as_fraction(v) for v in f)
    if len(values) != len(S):
        raise ValueError(f"{len(values)} values for {len(S)} points")
    return values


def is_member(S, f):
    """Exact membership in ``T(S)`` with a certificate (see :class:`Membership`)."""
    vals = _values(S, f)
    labels = S.labels
    for x, v in zip(labels, vals):
        if v < 0:
            return Membership(False, {}, star_violation=(x, x))
    if len(S) == 1:
        x = labels[0]
        if vals[0] == 0:
            return Membership(True, {x: x})
        return Membership(False, {x: x}, slack=(x, vals[0]))
    den, (M, F) = scale_together(S.dist, [vals])
    B, W = _kernels.best_response(M, F)
    witnesses = {x: labels[int(W[0, i])] for i, x in enumerate(labels)}
    for i, x in enumerate(labels):
        if F[0, i] < B[0, i]:
            return Membership(False, witnesses, star_violation=(x, witnesses[x]))
    for i, x in enumerate(labels):
        if F[0, i] > B[0, i]:
            return Membership(False, witnesses, slack=(x, from_int(F[0, i] - B[0, i], den)))
    return Membership(True, witnesses)


def membership_batch(S, functions):
    """Membership verdicts for many functions at once (no certificates)."""
    rows = [_values(S, f) for f in functions]
    if not rows:
        return []
    if len(S) == 1:
        return [r[0] == 0 for r in rows]
    den, (M, F) = scale_together(S.dist, rows)
    B, _ = _kernels.best_response(M, F)
    return [bool((F[s] == B[s]).all()) and min(rows[s]) >= 0 for s in range(len(rows))]


def certify(S, f, error=NotMember, what="function"):
    cert = is_member(S, f)
    if not cert:
        detail = cert.star_violation or cert.slack
        raise error(f"{what} is not in the tight span ({detail})")
    return cert


def d_T(f, g):
    """Sup-distance between two functions over the same space."""
    if f.base is not g.base and (f.base.labels != g.base.labels or f.base.dist != g.base.dist):
        raise BaseMismatch("functions live on different spaces")
    return max(abs(a - b) for a, b in zip(f.values, g.values))


def d_T_matrix(functions):
    """Pairwise sup-distances; exact, via the integer kernel."""
    if not functions:
        return []
    den, (F,) = scale_together([f.values for f in functions])
    D = _kernels.sup_distances(F)
    P = len(functions)
    return [[from_int(D[i, j], den) for j in range(P)] for i in range(P)]


def kuratowski(S, x):
    """The function ``y -> d(x, y)``."""
    i = S.position(x)
    return TightSpanFunction(S, S.dist[i])


def _check_star(S, rows):
    for vals in rows:
        for x, v in zip(S.labels, vals):
            if v < 0:
                raise StarViolation(x, x)
    if len(S) == 1:
        return
    den, (M, F) = scale_together(S.dist, rows)
    B, W = _kernels.best_response(M, F)
    bad = F < B
    for s in range(len(rows)):
        for i, x in enumerate(S.labels):
            if bad[s, i]:
                raise StarViolation(x, S.labels[int(W[s, i])])


def project_batch(S, starts):
    """Apply :func:`project` to several start functions."""
    rows = [_values(S, f) for f in starts]
    if not rows:
        return []
    _check_star(S, rows)
    den, (M, F) = scale_together(S.dist, rows)
    G = _kernels.project_pass(M, F)
    out = [TightSpanFunction(S, [from_int(v, den) for v in G[s]]) for s in range(len(rows))]
    verdicts = membership_batch(S, out)
    for f, start, ok in zip(out, rows, verdicts):
        if not ok:
            raise InvariantError(f"coordinate pass left the tight span: {f.as_dict()}")
        if any(a > b for a, b in zip(f.values, start)):
            raise InvariantError("coordinate pass increased a coordinate")
    return out


def project(S, f0):
    """Push a function satisfying ``f(x) + f(y) >= d(x,y)`` down into ``T(S)``.

    One pass over the labels in order sets ``f(x) = max(0, max_{y != x}
    d(x,y) - f(y))``.  Each update keeps the pair inequalities, makes ``x``
    tight, and never raises a coordinate; later updates cannot undo earlier
    tightness because that would break a pair inequality.  The output is
    certified before it is returned.
    """
    return project_batch(S, [f0])[0]


# ---------------------------------------------------------------------------
# maps from the cylinder and from the trimming levels


def f_point(seq, C, a, certify_member=True):
    """``x -> rho(x, a)``: the image of a cylinder point in ``T(X)``."""
    C.check_point(a)
    X = seq.base
    f = TightSpanFunction(X, [rho(C, Vertex(0, x), a) for x in X.labels])
    if certify_member:
        certify(X, f, InvariantError, f"f_point({a})")
    return f


def lift(seq, n, g):
    """Embed ``g`` in ``T(X_n)`` as ``x -> g(x_(n)) + sigma^n(x)``."""
    if not 0 <= n <= seq.N:
        raise ValueError(f"level {n} outside 0..{seq.N}")
    Xn = seq.levels[n].space
    g_vals = dict(zip(Xn.labels, _values(Xn, g)))
    certify(Xn, g_vals, NotMember, f"upstairs function at level {n}")
    X = seq.base
    part = seq.partial_sums[n]
    out = TightSpanFunction(X, [g_vals[seq.point(x, n)] + part[x] for x in X.labels])
    certify(X, out, InvariantError, "lift")
    return out


def tau_lift(seq, f):
    """Embed ``f`` in ``T(X_inf)`` as ``x -> f(x_(inf)) + sigma(x)``."""
    return lift(seq, seq.N, f)


def descend(seq, n, f):
    """Inverse of :func:`lift`: the function ``g`` on ``X_n`` with ``lift(g) = f``.

    Raises :class:`NotMember` if ``f`` is not ``>= sigma^n``.
    """
    X = seq.base
    vals = dict(zip(X.labels, _values(X, f)))
    part = seq.partial_sums[min(n, seq.N)]
    Xn = seq.levels[min(n, seq.N)].space
    for x in X.labels:
        if vals[x] < part[x]:
            raise NotMember(f"f({x}) < sigma^{n}({x}); not in the image of level {n}")
    g = {}
    for x in X.labels:
        v = vals[x] - part[x]
        y = seq.point(x, n)
        if y in g and g[y] != v:
            raise InvariantError(f"f - sigma^{n} is not constant on the fiber over {y!r}")
        g[y] = v
    return TightSpanFunction.from_mapping(Xn, g)


def filtration_level(seq, f):
    """``(n, in_tau)``: the largest ``n <= N`` with ``f >= sigma^n``."""
    X = seq.base
    certify(X, f)
    vals = dict(zip(X.labels, _values(X, f)))
    level = 0
    for n in range(1, seq.N + 1):
        part = seq.partial_sums[n]
        if all(vals[x] >= part[x] for x in X.labels):
            level = n
        else:
            break
    return level, level == seq.N


@dataclass(frozen=True)
class Classification:
    """Verdict of :func:`decompose`.

    ``point`` is set for branch points and roots, ``witness`` (the function
    on ``X_inf``) for tau members and roots, ``component`` for roots.
    """

    kind: str
    level: int
    point: Optional[object] = None
    component: Optional[str] = None
    witness: Optional[TightSpanFunction] = None


def decompose(seq, C, f):
    """Classify a member of ``T(X)`` as branch point, tau member or root."""
    X = seq.base
    n, in_tau = filtration_level(seq, f)
    vals = dict(zip(X.labels, _values(X, f)))

    if in_tau:
        f_inf = descend(seq, seq.N, f)
        certify(seq.x_infinity, f_inf, InternalContradiction, "tau witness")
        zeros = [u for u, v in f_inf.as_dict().items() if v == 0]
        if zeros:
            u = zeros[0]
            a = Vertex(seq.N, u)
            if f_point(seq, C, a, certify_member=False).values != tuple(vals[x] for x in X.labels):
                raise InternalContradiction(f"root candidate {a} does not realize f")
            return Classification(ROOT, n, point=a, component=C.component(a), witness=f_inf)
        if tau_lift(seq, f_inf).values != tuple(vals[x] for x in X.labels):
            raise InternalContradiction("tau witness does not lift back to f")
        return Classification(TAU, n, witness=f_inf)

    g = descend(seq, n, f)
    level = seq.levels[n]
    for y in level.space.labels:
        if g[y] < level.underline[y]:
            break
    else:
        raise InternalContradiction(f"no point below underline_d at filtration level {n}")
    a = point_on_edge(C, Vertex(n, y), g[y])
    fa = f_point(seq, C, a, certify_member=False)
    if fa.values != tuple(vals[x] for x in X.labels):
        raise InternalContradiction(f"branch candidate {a} does not realize f")
    if sigma_point(C, a) <= 0:
        raise InternalContradiction(f"branch candidate {a} has sigma = 0")
    return Classification(BRANCH, n, point=a)


# ---------------------------------------------------------------------------
# pseudometric spaces


def pseudo_tight_span(P, h):
    """Pull ``h`` in ``T(metric quotient of P)`` back to ``T(P)`` along the quotient."""
    target, q = metric_quotient(P)
    h_vals = dict(zip(target.labels, _values(target, h)))
    certify(target, h_vals, NotMember, "function on the quotient")
    out = TightSpanFunction(P, [h_vals[q(x)] for x in P.labels])
    certify(P, out, InvariantError, "pulled-back function")
    return out


def quotient_function(P, f):
    """Inverse of :func:`pseudo_tight_span`; members are constant on zero-distance classes."""
    certify(P, f)
    target, q = metric_quotient(P)
    h = {}
    for x, v in zip(P.labels, _values(P, f)):
        u = q(x)
        if u in h and h[u] != v:
            raise InvariantError(f"member of T(P) differs on the class of {u!r}")
        h[u] = v
    return TightSpanFunction.from_mapping(target, h)


# ---------------------------------------------------------------------------
# sampling and the main-theorem check


def random_start(S, rng, grid=16):
    """A random function satisfying the pair inequalities.

    Each coordinate is a random multiple of ``1/grid`` of the point's
    eccentricity; a common shift then repairs the pair inequalities.
    """
    vals = [Fraction(rng.randint(0, grid), grid) * S.eccentricity(x) for x in S.labels]
    shift = ZERO
    for i, j in combinations(range(len(S)), 2):
        gap = S.dist[i][j] - vals[i] - vals[j]
        if gap > 2 * shift:
            shift = gap / 2
    return [v + shift for v in vals]


def sample_members(S, count, rng):
    return project_batch(S, [random_start(S, rng) for _ in range(count)])


def sample_tight_span(seq, count, rng):
    """Members of ``T(X)`` spread over the trimming filtration.

    Half are projected random starts on ``X`` itself; the rest are lifts of
    projected samples from a uniformly chosen level ``0..N`` (level N gives
    members of tau).
    """
    plan = [0 if rng.random() < 0.5 else rng.randint(0, seq.N) for _ in range(count)]
    out = [None] * count
    for n in sorted(set(plan)):
        idx = [i for i, k in enumerate(plan) if k == n]
        Xn = seq.levels[n].space
        for i, g in zip(idx, sample_members(Xn, len(idx), rng)):
            out[i] = g if n == 0 else lift(seq, n, g)
    return out


def _fmt_fn(f):
    return {x: str(v) for x, v in f.as_dict().items()}


def verify_main_theorem(seq, C, sample_count, seed):
    """Sample ``T(X)``, decompose every sample and cross-check the maps.

    Returns ``{"samples", "branch", "root", "tau", "violations"}``; an empty
    violation list means every check passed.
    """
    rng = random.Random(seed)
    X = seq.base
    violations = []
    counts = {BRANCH: 0, ROOT: 0, TAU: 0}
    sigma_full = seq.partial_sums[seq.N]

    for i, f in enumerate(sample_tight_span(seq, sample_count, rng)):
        try:
            cls = decompose(seq, C, f)
        except (InvariantError, NotMember) as exc:
            violations.append({"check": "decompose", "sample": i, "f": _fmt_fn(f), "error": str(exc)})
            continue
        counts[cls.kind] += 1
        if cls.kind == BRANCH:
            if sigma_point(C, cls.point) <= 0:
                violations.append({"check": "branch-sigma", "sample": i, "point": str(cls.point)})
            if f.dominates(sigma_full):
                violations.append({"check": "branch-in-tau", "sample": i, "f": _fmt_fn(f)})

    # cylinder points: membership, isometry, and decompose(f_a) recovering a
    points = list(C.vertices) + C.sample_points()
    funcs = [f_point(seq, C, a, certify_member=False) for a in points]
    for a, ok in zip(points, membership_batch(X, funcs)):
        if not ok:
            violations.append({"check": "f_point-member", "point": str(a)})
    dist_T = d_T_matrix(funcs)
    dist_C = rho_matrix(C, points)
    for i, j in combinations(range(len(points)), 2):
        if dist_T[i][j] != dist_C[i][j]:
            violations.append(
                {
                    "check": "f_point-isometry",
                    "points": [str(points[i]), str(points[j])],
                    "d_T": str(dist_T[i][j]),
                    "rho": str(dist_C[i][j]),
                }
            )
    for a, fa in zip(points, funcs):
        try:
            cls = decompose(seq, C, fa)
        except (InvariantError, NotMember) as exc:
            violations.append({"check": "decompose-f_point", "point": str(a), "error": str(exc)})
            continue
        if sigma_point(C, a) == 0:
            if cls.kind != ROOT or cls.component != C.component(a):
                violations.append({"check": "decompose-root", "point": str(a), "got": cls.kind})
        elif cls.kind != BRANCH or rho(C, a, cls.point) != 0:
            violations.append({"check": "decompose-branch", "point": str(a), "got": cls.kind})

    # tau lifts land in every filtration term and are isometric
    X_inf = seq.x_infinity
    upstairs = sample_members(X_inf, max(2, min(sample_count, 8)), rng)
    lifted = []
    for h in upstairs:
        try:
            fh = tau_lift(seq, h)
        except (InvariantError, NotMember) as exc:
            violations.append({"check": "tau_lift", "error": str(exc)})
            continue
        lifted.append((h, fh))
        for n in range(seq.N + 1):
            if not fh.dominates(seq.partial_sums[n]):
                violations.append({"check": "tau_lift-filtration", "level": n, "f": _fmt_fn(fh)})
    for (h1, f1), (h2, f2) in combinations(lifted, 2):
        if d_T(f1, f2) != d_T(h1, h2):
            violations.append({"check": "tau_lift-isometry", "f": [_fmt_fn(f1), _fmt_fn(f2)]})

    return {
        "samples": sample_count,
        "branch": counts[BRANCH],
        "root": counts[ROOT],
        "tau": counts[TAU],
        "violations": violations,
    }
