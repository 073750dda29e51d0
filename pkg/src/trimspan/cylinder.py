"""The trimming cylinder: a finite edge-weighted forest over the trimming levels.

Vertices are ``(k, v)`` with ``v`` in ``X_k``, ``0 <= k <= N``; every vertex
below level N has one edge down to ``(k+1, p_k(v))`` of length ``ud_k(v)``.
Levels above N are not materialized: they would only add zero-length edges.
Edges are oriented upper to lower and interior points are measured from the
upper endpoint.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Union

from ._exact import as_fraction
from .errors import InvariantError, UnexpectedGlue, UnknownPoint

ZERO = Fraction(0)


@dataclass(frozen=True, order=True)
class Vertex:
    level: int
    label: str

    def __str__(self):
        return f"{self.label}@{self.level}"


@dataclass(frozen=True, order=True)
class EdgeInterior:
    """A point strictly inside the edge below ``Vertex(level, label)``."""

    level: int
    label: str
    offset: Fraction

    @property
    def upper(self):
        return Vertex(self.level, self.label)

    def __str__(self):
        return f"{self.label}@{self.level}+{self.offset}"


CylinderPoint = Union[Vertex, EdgeInterior]


@dataclass(frozen=True)
class Cylinder:
    seq: object
    vertices: tuple
    edges: Mapping  # upper Vertex -> (lower Vertex, length)
    components: Mapping  # Vertex -> component id (label of the X_inf point)

    @property
    def N(self):
        return self.seq.N

    @property
    def leaves(self):
        return tuple(Vertex(0, x) for x in self.seq.base.labels)

    @property
    def component_ids(self):
        return tuple(self.seq.x_infinity.labels)

    def edge_length(self, v):
        return self.edges[v][1]

    def lower(self, v):
        return self.edges[v][0]

    def positive_edges(self):
        return [v for v in self.vertices if v in self.edges and self.edges[v][1] > 0]

    def component(self, a):
        return self.components[_upper_vertex(a)]

    def check_point(self, a):
        if isinstance(a, Vertex):
            if a not in self.components:
                raise UnknownPoint(a)
        elif isinstance(a, EdgeInterior):
            if a.upper not in self.edges:
                raise UnknownPoint(a)
            if not 0 < a.offset < self.edges[a.upper][1]:
                raise ValueError(f"offset {a.offset} outside (0, {self.edges[a.upper][1]})")
        else:
            raise TypeError(f"not a cylinder point: {a!r}")
        return a

    def sample_points(self, fractions=(Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))):
        """Interior points at the given relative positions on every positive edge."""
        out = []
        for v in self.positive_edges():
            length = self.edges[v][1]
            out.extend(EdgeInterior(v.level, v.label, t * length) for t in fractions)
        return out

    @cached_property
    def _sigma_vertex(self):
        return {Vertex(k, v): s for k, tail in enumerate(self.seq.tails) for v, s in tail.items()}


def _upper_vertex(a):
    return a.upper if isinstance(a, EdgeInterior) else a


def build_cylinder(seq):
    vertices = []
    edges = {}
    components = {}
    for k, level in enumerate(seq.levels):
        for v in level.space.labels:
            vert = Vertex(k, v)
            vertices.append(vert)
            components[vert] = seq.image(k, v, seq.N)
            if k < seq.N:
                edges[vert] = (Vertex(k + 1, level.projection.assignment[v]), level.underline[v])
    return Cylinder(seq, tuple(vertices), edges, components)


def point_on_edge(C, v, t):
    """The point at offset ``t`` below vertex ``v``, normalized to a vertex at the ends."""
    t = as_fraction(t)
    lower, length = C.edges[v]
    if t == 0:
        return v
    if t == length:
        return lower
    if not 0 < t < length:
        raise ValueError(f"offset {t} outside [0, {length}]")
    return EdgeInterior(v.level, v.label, t)


def sigma_point(C, a):
    """Height of ``a`` above the bottom of its chain (sum of lengths below it)."""
    if isinstance(a, Vertex):
        try:
            return C._sigma_vertex[a]
        except KeyError:
            raise UnknownPoint(a) from None
    lower, length = C.edges[a.upper]
    return length - a.offset + C._sigma_vertex[lower]


def _descending_vertices(C, a):
    """``{level: label}`` for the vertices on the descending path from ``a``."""
    v = C.edges[a.upper][0] if isinstance(a, EdgeInterior) else a
    chain = C.seq.chains[v.level][v.label]
    return {v.level + i: label for i, label in enumerate(chain)}


def lies_below(C, a, b):
    """True iff ``a != b`` and a descending path runs from ``b`` down to ``a``."""
    if a == b:
        return False
    kb, vb = b.level, b.label
    tb = b.offset if isinstance(b, EdgeInterior) else ZERO
    ka, va = a.level, a.label
    ta = a.offset if isinstance(a, EdgeInterior) else ZERO
    if ka == kb and va == vb:
        return ta > tb
    if ka > kb:
        return C.seq.image(kb, vb, ka) == va
    return False


def path_distance(C, a, b):
    """Path pseudometric inside one component."""
    if C.component(a) != C.component(b):
        raise ValueError("points lie in different components")
    if a == b:
        return ZERO
    sa, sb = sigma_point(C, a), sigma_point(C, b)
    if lies_below(C, a, b):
        return sb - sa
    if lies_below(C, b, a):
        return sa - sb
    meet = meet_vertex(C, a, b)
    return sa + sb - 2 * sigma_point(C, meet)


def meet_vertex(C, a, b):
    """Highest vertex on both descending paths."""
    da = _descending_vertices(C, a)
    db = _descending_vertices(C, b)
    for k in range(max(min(da), min(db)), C.N + 1):
        if da[k] == db[k]:
            return Vertex(k, da[k])
    raise ValueError("points lie in different components")


def rho(C, a, b):
    """The minimal pseudometric on the cylinder."""
    ca, cb = C.component(a), C.component(b)
    if ca == cb:
        return path_distance(C, a, b)
    return C.seq.d_infinity(ca, cb) + sigma_point(C, a) + sigma_point(C, b)


def leaves_above(C, a):
    """Leaves ``x`` of ``X_0`` whose descending path passes through ``a``."""
    out = []
    for x in C.seq.base.labels:
        leaf = Vertex(0, x)
        if leaf == a or lies_below(C, a, leaf):
            out.append(x)
    return out


def special_and_roots(C):
    """Vertices whose whole downward tail has length zero, and the special components."""
    special = frozenset(v for v in C.vertices if C._sigma_vertex[v] == 0)
    roots = frozenset(C.components[v] for v in special)
    return special, roots


@dataclass(frozen=True)
class QuotientCylinder:
    cylinder: Cylinder
    nodes: tuple  # representative Vertex per collapsed class
    edges: tuple  # (upper rep, lower rep, length > 0)
    node_of: Mapping  # Vertex -> representative
    roots: Mapping  # component id -> representative
    leaf_of: Mapping = field(default_factory=dict)  # X_0 label -> representative

    def distance(self, u, v):
        return rho(self.cylinder, u, v)

    @property
    def leaves(self):
        degree = {n: 0 for n in self.nodes}
        for u, v, _ in self.edges:
            degree[u] += 1
            degree[v] += 1
        return tuple(n for n in self.nodes if degree[n] == 1)


def quotient_cylinder(C):
    """Contract zero-length edges; mark the collapsed special subtree as the root."""
    parent = {v: v for v in C.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for v, (lower, length) in C.edges.items():
        if length == 0:
            ru, rl = find(v), find(lower)
            if ru != rl:
                parent[max(ru, rl)] = min(ru, rl)

    comps = C.component_ids
    for i, u in enumerate(comps):
        for w in comps[i + 1 :]:
            if C.seq.d_infinity(u, w) == 0:
                raise UnexpectedGlue(f"components {u!r} and {w!r} at d_inf = 0")

    members = {}
    for v in C.vertices:
        members.setdefault(find(v), []).append(v)
    node_of = {}
    for group in members.values():
        rep = min(group)
        for v in group:
            node_of[v] = rep
    nodes = tuple(sorted(set(node_of.values())))
    edges = tuple(
        (node_of[v], node_of[lower], length)
        for v, (lower, length) in C.edges.items()
        if length > 0
    )
    for u, w, _ in edges:
        if u == w:
            raise InvariantError("positive edge collapsed onto itself")
    roots = {C.components[Vertex(C.N, u)]: node_of[Vertex(C.N, u)] for u in comps}
    leaf_of = {x: node_of[Vertex(0, x)] for x in C.seq.base.labels}
    return QuotientCylinder(C, nodes, edges, node_of, roots, leaf_of)


def rho_matrix(C, points):
    """Symmetric table of ``rho`` over ``points``."""
    P = len(points)
    out = [[ZERO] * P for _ in range(P)]
    for i in range(P):
        for j in range(i + 1, P):
            out[i][j] = out[j][i] = rho(C, points[i], points[j])
    return out
