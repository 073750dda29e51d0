"""Exact invariant checks over one instance.

Every check returns a list of violation records (plain dicts); an empty list
means the property held.  The acceptance tests and ``trimspan verify`` both
go through :func:`run_invariants`.
"""

import random
from fractions import Fraction
from itertools import combinations

from . import _kernels
from ._exact import fmt, scale_together
from .cylinder import (
    Vertex,
    build_cylinder,
    leaves_above,
    lies_below,
    path_distance,
    quotient_cylinder,
    rho,
    rho_matrix,
    sigma_point,
)
from .errors import InvariantError, NotMember, TrimspanError
from .metric import drift, is_trim, underline_d
from .tightspan import (
    d_T,
    d_T_matrix,
    descend,
    f_point,
    is_member,
    lift,
    membership_batch,
    sample_members,
    sample_tight_span,
    tau_lift,
)
from .treegen import chain_level_metric, oracle_levels
from .trimming import congruent, meeting_index, sigma, sigma_partial, trim_step, trimming_sequence


def _v(check, **info):
    return {"check": check, **{k: (fmt(v) if isinstance(v, Fraction) else v) for k, v in info.items()}}


def check_axioms(seq):
    """Pairwise bound on underline_d, drift lemma, fixed point, N <= card."""
    out = []
    for k, level in enumerate(seq.levels):
        S, ud = level.space, level.underline
        for x, y, d in S.items():
            if ud[x] + ud[y] > d:
                out.append(_v("underline-bound", level=k, points=[x, y], lhs=ud[x] + ud[y], d=d))
        for scale in (Fraction(1, 2), Fraction(1)):
            delta = {x: scale * ud[x] for x in S.labels}
            try:
                lowered = drift(S, delta)
            except (InvariantError, TrimspanError) as exc:
                out.append(_v("drift", level=k, scale=scale, error=str(exc)))
                continue
            if len(S) >= 3:
                got = underline_d(lowered)
                bad = [x for x in S.labels if got[x] != ud[x] - delta[x]]
                if bad:
                    out.append(_v("drift-lemma", level=k, scale=scale, points=bad))
    top = seq.x_infinity
    if not is_trim(top):
        out.append(_v("final-level-trim"))
    nxt, proj = trim_step(top)
    if not proj.is_identity or nxt.dist != top.dist:
        out.append(_v("fixed-point"))
    if seq.N > len(seq.base):
        out.append(_v("N-bound", N=seq.N, card=len(seq.base)))
    return out


def check_sigma(seq):
    """Distance identities through sigma, monotonicity, non-expansive limit map."""
    out = []
    X = seq.base
    for x, y, d in X.items():
        if congruent(seq, x, y):
            m = meeting_index(seq, x, y)
            rhs = sigma_partial(seq, x, m) + sigma_partial(seq, y, m)
            if d != rhs:
                out.append(_v("sigma-congruent", points=[x, y], d=d, rhs=rhs))
        else:
            ux, uy = seq.to_infinity[x], seq.to_infinity[y]
            d_inf = seq.d_infinity(ux, uy)
            rhs = d_inf + sigma(seq, x) + sigma(seq, y)
            if d != rhs:
                out.append(_v("sigma-separated", points=[x, y], d=d, rhs=rhs))
            if d_inf > d:
                out.append(_v("limit-expands", points=[x, y]))
        prev = d
        for k in range(1, seq.N + 1):
            cur = seq.levels[k].space.d(seq.point(x, k), seq.point(y, k))
            if cur > prev:
                out.append(_v("monotone", points=[x, y], level=k))
            prev = cur
    return out


def _triangle_on(table):
    _, (M,) = scale_together(table)
    return _kernels.triangle_violation(M)


def check_cylinder(C, rng, witnesses=50):
    """Restriction to levels, triangle inequality, height bounds, minimality."""
    out = []
    seq = C.seq
    for k, level in enumerate(seq.levels):
        S = level.space
        for u, v, d in S.items():
            r = rho(C, Vertex(k, u), Vertex(k, v))
            if r != d:
                out.append(_v("rho-restriction", level=k, points=[u, v], rho=r, d=d))

    points = list(C.vertices) + C.sample_points()
    table = rho_matrix(C, points)
    hit = _triangle_on(table)
    if hit is not None:
        out.append(_v("rho-triangle", points=[str(points[i]) for i in hit]))

    for a, b in combinations(points, 2):
        if C.component(a) != C.component(b):
            continue
        sa, sb = sigma_point(C, a), sigma_point(C, b)
        dl = path_distance(C, a, b)
        if not abs(sa - sb) <= dl <= sa + sb:
            out.append(_v("height-bounds", points=[str(a), str(b)]))
        if lies_below(C, b, a) and sa != dl + sb:
            out.append(_v("height-below", points=[str(a), str(b)]))

    cross = [(a, b) for a, b in combinations(points, 2) if C.component(a) != C.component(b)]
    rng.shuffle(cross)
    X = seq.base
    for a, b in cross[:witnesses]:
        xs, ys = leaves_above(C, a), leaves_above(C, b)
        if not xs or not ys:
            out.append(_v("no-leaf-above", points=[str(a), str(b)]))
            continue
        x, y = xs[0], ys[0]
        value = X.d(x, y) - path_distance(C, Vertex(0, x), a) - path_distance(C, Vertex(0, y), b)
        if value != rho(C, a, b):
            out.append(_v("minimality", points=[str(a), str(b)], leaves=[x, y]))

    for x, y, _ in X.items():
        same = C.components[Vertex(0, x)] == C.components[Vertex(0, y)]
        if same != congruent(seq, x, y):
            out.append(_v("components", points=[x, y]))
    if set(C.component_ids) != set(C.components.values()):
        out.append(_v("components-biject"))
    Q = quotient_cylinder(C)
    for u, w, length in Q.edges:
        if rho(C, u, w) != length:
            out.append(_v("quotient-edge", edge=[str(u), str(w)]))
    return out


def check_maps(seq, C, rng, samples=6):
    """Cylinder points into T(X), and the lifts from the filtration levels."""
    out = []
    X = seq.base
    points = list(C.vertices) + C.sample_points()
    funcs = [f_point(seq, C, a, certify_member=False) for a in points]
    for a, ok in zip(points, membership_batch(X, funcs)):
        if not ok:
            out.append(_v("f_point-member", point=str(a)))
    dist_T = d_T_matrix(funcs)
    dist_C = rho_matrix(C, points)
    for i, j in combinations(range(len(points)), 2):
        if dist_T[i][j] != dist_C[i][j]:
            out.append(_v("f_point-isometry", points=[str(points[i]), str(points[j])]))

    for n in range(seq.N + 1):
        Xn = seq.levels[n].space
        gs = sample_members(Xn, samples, rng)
        try:
            fs = [lift(seq, n, g) for g in gs]
        except (InvariantError, NotMember) as exc:
            out.append(_v("lift", level=n, error=str(exc)))
            continue
        floor = seq.partial_sums[n]
        for g, f in zip(gs, fs):
            if not is_member(X, f):
                out.append(_v("lift-member", level=n))
            if not f.dominates(floor):
                out.append(_v("lift-floor", level=n))
            if descend(seq, n, f).values != g.values:
                out.append(_v("lift-descend", level=n))
        for (g1, f1), (g2, f2) in combinations(zip(gs, fs), 2):
            if d_T(f1, f2) != d_T(g1, g2):
                out.append(_v("lift-isometry", level=n))

        # image characterization: f >= sigma^n iff f comes from level n
        for f in sample_tight_span(seq, samples, rng):
            if f.dominates(floor):
                try:
                    g = descend(seq, n, f)
                except (InvariantError, NotMember) as exc:
                    out.append(_v("descend", level=n, error=str(exc)))
                    continue
                if not is_member(Xn, g) or lift(seq, n, g).values != f.values:
                    out.append(_v("lift-image", level=n))
            else:
                try:
                    descend(seq, n, f)
                    out.append(_v("descend-accepts", level=n))
                except NotMember:
                    pass

    hs = sample_members(seq.x_infinity, samples, rng)
    lifted = [tau_lift(seq, h) for h in hs]
    for f in lifted:
        if not f.dominates(seq.partial_sums[seq.N]) or not is_member(X, f):
            out.append(_v("tau_lift-image"))
    for (h1, f1), (h2, f2) in combinations(zip(hs, lifted), 2):
        if d_T(f1, f2) != d_T(h1, h2):
            out.append(_v("tau_lift-isometry"))
    return out


def run_invariants(S, seed=0, seq=None, C=None):
    """All module invariants on one metric space; ``{group: [violations]}``."""
    rng = random.Random(seed)
    if seq is None:
        seq = trimming_sequence(S)
    if C is None:
        C = build_cylinder(seq)
    return {
        "axioms": check_axioms(seq),
        "sigma": check_sigma(seq),
        "cylinder": check_cylinder(C, rng),
        "maps": check_maps(seq, C, rng),
    }


def check_chain_oracle(spec, seq):
    """Compare trimming of a chain metric with the chain itself.

    On every level where the fiber hypothesis holds, the trimming level must
    match the chain level point for point (matched through the images of
    level-0 points), with the same distances and ``underline_d_k = delta_k``.
    """
    out = []
    good = oracle_levels(spec)
    for k in good + ([good[-1] + 1] if good else []):
        if k > seq.N:
            out.append(_v("chain-depth", level=k, N=seq.N))
            continue
        match = {}
        for x in seq.base.labels:
            ours, theirs = seq.point(x, k), spec.image(0, x, k)
            if match.setdefault(theirs, ours) != ours:
                out.append(_v("chain-fiber", level=k, point=theirs))
        if len(set(match.values())) != len(spec.levels[k]):
            out.append(_v("chain-size", level=k))
            continue
        D = chain_level_metric(spec, k)
        S = seq.levels[k].space
        for u, v, d in D.items():
            if S.d(match[u], match[v]) != d:
                out.append(_v("chain-distance", level=k, points=[u, v]))
        if k in good:
            for u in spec.levels[k]:
                got = seq.underline(k, match[u])
                if got != spec.delta[k][u]:
                    out.append(_v("chain-underline", level=k, point=u, got=got, want=spec.delta[k][u]))
    return out
