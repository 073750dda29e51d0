"""Metric trees, leaf spaces, chain constructions and random test spaces.

Also hosts the independent oracles used to cross-check ``underline_d``: the
leaf-edge bound for leaf spaces of trees and the chain construction whose
trimming sequence is known in closed form when every fiber has at least
three points.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from typing import Mapping

import numpy as np

from . import _kernels
from ._exact import as_fraction, fmt, from_int, to_int_array
from .errors import NoMeeting, NonpositiveLength, NotATree, ParseError, TooFewLeaves
from .metric import validate_space

ZERO = Fraction(0)


@dataclass(frozen=True)
class MetricTree:
    nodes: tuple
    edges: tuple  # (u, v, length)
    pseudometric: bool = False

    def __post_init__(self):
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise ValueError("duplicate node names")
        edges = []
        for u, v, length in self.edges:
            if u not in known or v not in known:
                raise ValueError(f"edge ({u}, {v}) uses an unknown node")
            if u == v:
                raise NotATree(f"loop at {u!r}")
            length = as_fraction(length)
            if length < 0 or (length == 0 and not self.pseudometric):
                raise NonpositiveLength(f"edge ({u}, {v}) has length {length}")
            edges.append((u, v, length))
        object.__setattr__(self, "edges", tuple(edges))

    @cached_property
    def adjacency(self):
        adj = {n: [] for n in self.nodes}
        for u, v, length in self.edges:
            adj[u].append((v, length))
            adj[v].append((u, length))
        return adj

    def degree(self, node):
        return len(self.adjacency[node])

    @property
    def connected(self):
        if not self.nodes:
            return False
        return len(self._reach(self.nodes[0])) == len(self.nodes)

    @property
    def acyclic(self):
        # a forest has exactly (#nodes - #components) edges
        seen, comps = set(), 0
        for n in self.nodes:
            if n not in seen:
                comps += 1
                seen |= set(self._reach(n))
        return len(self.edges) == len(self.nodes) - comps

    @property
    def is_tree(self):
        return self.connected and self.acyclic

    @property
    def leaves(self):
        return tuple(n for n in self.nodes if self.degree(n) == 1)

    def _reach(self, source):
        dist = {source: ZERO}
        stack = [source]
        while stack:
            u = stack.pop()
            for v, length in self.adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + length
                    stack.append(v)
        return dist

    def distances_from(self, source):
        """Path (pseudo)metric from ``source``; assumes a tree."""
        return self._reach(source)


def leaf_space(T):
    """The leaves of ``T`` with the restricted path metric."""
    if not T.is_tree:
        raise NotATree("graph is disconnected or has a cycle")
    leaves = T.leaves
    if not leaves:
        raise TooFewLeaves("tree has no leaves")
    rows = []
    for x in leaves:
        dist = T.distances_from(x)
        rows.append([dist[y] for y in leaves])
    return validate_space(rows, leaves)


def underline_d_tree_oracle(T):
    """Per leaf ``x``: ``(length of the edge at x, exact)``.

    The length is a lower bound for ``underline_d(x)`` and equals it when the
    other end of that edge touches at least two further leaves.
    """
    if not T.is_tree:
        raise NotATree("graph is disconnected or has a cycle")
    leaves = T.leaves
    if len(leaves) < 3:
        raise TooFewLeaves(f"need at least 3 leaves, got {len(leaves)}")
    leafset = set(leaves)
    out = {}
    for x in leaves:
        (v, length), = T.adjacency[x]
        others = sum(1 for w, _ in T.adjacency[v] if w in leafset and w != x)
        out[x] = (length, others >= 2)
    return out


def four_point_violation(S):
    """A quadruple violating the four-point condition, or ``None``."""
    labels = S.labels
    for x, y, z, w in combinations(labels, 4):
        sums = sorted(
            [S.d(x, y) + S.d(z, w), S.d(x, z) + S.d(y, w), S.d(x, w) + S.d(y, z)]
        )
        if sums[1] != sums[2]:
            return (x, y, z, w)
    return None


# ---------------------------------------------------------------------------
# Newick subset

_DELIMS = set("(),:;")


class _NewickParser:
    def __init__(self, text, pseudometric):
        self.text = text
        self.pos = 0
        self.pseudometric = pseudometric
        self.nodes = []
        self.edges = []
        self.auto = 0

    def error(self, message):
        raise ParseError(message, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def name(self):
        self.skip()
        if self.peek() == "'":
            end = self.text.find("'", self.pos + 1)
            if end < 0:
                self.error("unterminated quoted name")
            label = self.text[self.pos + 1 : end]
            self.pos = end + 1
            return label
        start = self.pos
        while (
            self.pos < len(self.text)
            and self.text[self.pos] not in _DELIMS
            and not self.text[self.pos].isspace()
        ):
            self.pos += 1
        return self.text[start : self.pos]

    def length(self):
        self.skip()
        start = self.pos
        token = self.name()
        if not token:
            self.pos = start
            self.error("missing branch length")
        try:
            value = as_fraction(token)
        except (ValueError, ZeroDivisionError):
            self.pos = start
            self.error(f"bad branch length {token!r}")
        if value < 0 or (value == 0 and not self.pseudometric):
            raise NonpositiveLength(f"branch length {token} at position {start}")
        return value

    def add(self, label, is_leaf):
        if not label:
            if is_leaf:
                self.error("unnamed leaf")
            label = f"_n{self.auto}"
            self.auto += 1
        if label in self.nodes:
            self.error(f"duplicate node name {label!r}")
        self.nodes.append(label)
        return label

    def subtree(self):
        children = []
        if self.peek() == "(":
            self.pos += 1
            while True:
                child = self.subtree()
                if self.peek() != ":":
                    self.error("missing branch length")
                self.pos += 1
                children.append((child, self.length()))
                if self.peek() == ",":
                    self.pos += 1
                    continue
                self.expect(")")
                break
            label = self.add(self.name(), is_leaf=False)
        else:
            label = self.add(self.name(), is_leaf=True)
        for child, length in children:
            self.edges.append((label, child, length))
        return label

    def parse(self):
        if self.peek() == "":
            self.error("empty input")
        self.subtree()
        if self.peek() == ":":
            self.pos += 1
            self.length()
        self.expect(";")
        if self.peek() != "":
            self.error("trailing characters after ';'")
        return MetricTree(tuple(self.nodes), tuple(self.edges), self.pseudometric)


def parse_newick(text, pseudometric=False):
    """Parse nested parentheses with ``name:length`` annotations ending in ``;``."""
    return _NewickParser(text, pseudometric).parse()


# ---------------------------------------------------------------------------
# chain construction


@dataclass(frozen=True)
class ChainSpec:
    """Sets ``X_0 .. X_M``, surjections ``X_k -> X_{k+1}`` and weights on ``X_k`` (k < M)."""

    levels: tuple
    proj: tuple
    delta: tuple

    def __post_init__(self):
        levels = tuple(tuple(str(v) for v in lvl) for lvl in self.levels)
        M = len(levels) - 1
        if M < 0:
            raise ValueError("a chain needs at least one level")
        if len(self.proj) != M or len(self.delta) != M:
            raise ValueError(f"need {M} projections and {M} weight tables")
        proj, delta = [], []
        for k in range(M):
            p = _level_table(self.proj[k], levels[k])
            p = {x: str(v) for x, v in p.items()}
            if set(p.values()) != set(levels[k + 1]):
                raise ValueError(f"projection {k} is not onto level {k + 1}")
            w = {x: as_fraction(v) for x, v in _level_table(self.delta[k], levels[k]).items()}
            if any(v <= 0 for v in w.values()):
                raise ValueError(f"weights at level {k} must be positive")
            proj.append(p)
            delta.append(w)
        for k, lvl in enumerate(levels):
            if len(set(lvl)) != len(lvl) or not lvl:
                raise ValueError(f"level {k} must be a nonempty set of distinct labels")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "proj", tuple(proj))
        object.__setattr__(self, "delta", tuple(delta))

    @property
    def depth(self):
        return len(self.levels) - 1

    def image(self, k, x, level):
        for i in range(k, level):
            x = self.proj[i][x]
        return x

    def fiber_sizes(self, k):
        counts = {}
        for v in self.proj[k].values():
            counts[v] = counts.get(v, 0) + 1
        return counts

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(obj["levels"]), tuple(obj["proj"]), tuple(obj["delta"]))

    def to_json(self):
        return {
            "levels": [list(lvl) for lvl in self.levels],
            "proj": [dict(p) for p in self.proj],
            "delta": [{x: fmt(v) for x, v in w.items()} for w in self.delta],
        }


def _level_table(table, labels):
    if isinstance(table, Mapping):
        out = {str(k): v for k, v in table.items()}
    else:
        table = list(table)
        if len(table) != len(labels):
            raise ValueError("list-valued table must align with the level labels")
        out = dict(zip(labels, table))
    if set(out) != set(labels):
        raise ValueError("table keys do not match the level labels")
    return {x: out[x] for x in labels}


def chain_level_metric(spec, k):
    """The tree metric restricted to level ``k``: sum of weights up to the meeting level."""
    labels = spec.levels[k]
    n = len(labels)
    rows = [[ZERO] * n for _ in range(n)]
    for i, j in combinations(range(n), 2):
        x, y = labels[i], labels[j]
        total = ZERO
        level = k
        while x != y:
            if level == spec.depth:
                raise NoMeeting(labels[i], labels[j])
            total += spec.delta[level][x] + spec.delta[level][y]
            x, y = spec.proj[level][x], spec.proj[level][y]
            level += 1
        rows[i][j] = rows[j][i] = total
    return validate_space(rows, labels)


def chain_metric(spec):
    return chain_level_metric(spec, 0)


def oracle_levels(spec):
    """Levels ``k`` where trimming must give ``underline_d_k = delta_k``.

    That holds while every fiber of ``p_0 .. p_k`` has at least three points.
    """
    out = []
    for k in range(spec.depth):
        if min(spec.fiber_sizes(k).values()) < 3:
            break
        out.append(k)
    return out


def chain_oracle(spec):
    """Expected trimming data wherever the fiber hypothesis holds.

    Returns ``{"levels": [{"level", "labels", "dist", "underline"}...]}``;
    levels past the last oracle level carry only the metric.
    """
    good = oracle_levels(spec)
    upto = (good[-1] + 1) if good else 0
    out = []
    for k in range(upto + 1):
        S = chain_level_metric(spec, k)
        entry = {
            "level": k,
            "labels": list(S.labels),
            "dist": [[fmt(v) for v in row] for row in S.dist],
        }
        if k in good:
            entry["underline"] = {x: fmt(v) for x, v in spec.delta[k].items()}
        out.append(entry)
    return {"levels": out}


def sequence_chain(alphabet="012", length=3, fill="0", delta=1):
    """Finite truncation of the eventually-constant-sequence chain.

    ``X_k`` holds the words of length ``length - k`` over ``alphabet`` ending
    in ``fill``; projections drop the first letter.  ``delta`` is a constant
    or a callable ``(k, word) -> weight``.
    """
    levels = []
    for k in range(length):
        size = length - k
        levels.append(tuple("".join(w) + fill for w in product(alphabet, repeat=size - 1)))
    proj = [{w: w[1:] for w in levels[k]} for k in range(length - 1)]
    weight = delta if callable(delta) else (lambda k, w: delta)
    deltas = [{w: weight(k, w) for w in levels[k]} for k in range(length - 1)]
    return ChainSpec(tuple(levels), tuple(proj), tuple(deltas))



def random_chain(rng, depth=3, min_fiber=3, top_fiber=None):
    """Random chain with every fiber of size ``min_fiber`` or ``min_fiber + 1``.

    ``top_fiber`` overrides the fiber size into the single top point, so the
    last level can deliberately break the three-point hypothesis.
    """
    levels = [["r"]]
    proj = []
    for k in range(depth):
        parents = levels[0]
        children, p = [], {}
        for v in parents:
            size = top_fiber if (k == 0 and top_fiber) else rng.randint(min_fiber, min_fiber + 1)
            for i in range(size):
                child = f"{v}.{i}" if v != "r" else str(i)
                children.append(child)
                p[child] = v
        levels.insert(0, children)
        proj.insert(0, p)
    deltas = [{x: _random_length(rng) for x in lvl} for lvl in levels[:-1]]
    return ChainSpec(tuple(tuple(lvl) for lvl in levels), tuple(proj), tuple(deltas))

# ---------------------------------------------------------------------------
# desk instances


def equilateral(side=2, n=3):
    labels = [f"x{i + 1}" for i in range(n)]
    return validate_space([[0 if i == j else side for j in range(n)] for i in range(n)], labels)


def line_space(coords=(0, 1, 3)):
    coords = [as_fraction(c) for c in coords]
    labels = [f"p{fmt(c)}" for c in coords]
    return validate_space([[abs(a - b) for b in coords] for a in coords], labels)


def two_point(r=4):
    return validate_space([[0, r], [r, 0]], ["x", "y"])


def circle_space(k=4, circumference=4):
    """``k`` equally spaced points on a circle with the arc-length metric."""
    step = Fraction(as_fraction(circumference), k)
    names = ["N", "E", "S", "W"] if k == 4 else [f"c{i}" for i in range(k)]
    rows = [[min(abs(i - j), k - abs(i - j)) * step for j in range(k)] for i in range(k)]
    return validate_space(rows, names)


def hamming_space(length=2, alphabet="01"):
    words = ["".join(w) for w in product(alphabet, repeat=length)]
    rows = [[sum(a != b for a, b in zip(u, v)) for v in words] for u in words]
    return validate_space(rows, words)


def caterpillar_chain():
    return ChainSpec(
        (("a", "b", "c", "d", "e", "f"), ("u", "v"), ("w",)),
        (
            {"a": "u", "b": "u", "c": "u", "d": "v", "e": "v", "f": "v"},
            {"u": "w", "v": "w"},
        ),
        ({x: 1 for x in "abcdef"}, {"u": 2, "v": 3}),
    )


def caterpillar():
    """Two fibers of three points: 2 inside a fiber, 7 across."""
    return chain_metric(caterpillar_chain())


def caterpillar_tree():
    return parse_newick("((a:1,b:1,c:1)u:5,d:1,e:1,f:1)v;")


def star(*legs):
    legs = legs or (1, 2, 3)
    inner = ",".join(f"l{i}:{fmt(as_fraction(v))}" for i, v in enumerate(legs))
    return parse_newick(f"({inner})c;")


def example_sequence_space():
    return chain_metric(sequence_chain())


def desk_instances():
    return {
        "equilateral(2)": equilateral(2),
        "line{0,1,3}": line_space((0, 1, 3)),
        "2-point(4)": two_point(4),
        "circle-4": circle_space(4, 4),
        "caterpillar": caterpillar(),
        "sequences(012,3)": example_sequence_space(),
    }


# ---------------------------------------------------------------------------
# random spaces


def _random_length(rng):
    return Fraction(rng.randint(1, 8), rng.choice((1, 2, 4)))


def random_tree(rng, max_leaves=12, min_leaves=3, pseudometric=False):
    """Random metric tree with ``min_leaves..max_leaves`` leaves.

    New nodes attach to earlier ones; with some probability several leaves
    share a parent, so both oracle clauses get exercised.
    """
    while True:
        m = rng.randint(3, max_leaves + 4)
        nodes = ["n0"]
        edges = []
        for i in range(1, m):
            if i >= 2 and rng.random() < 0.3:
                parent = edges[-1][0]
            else:
                parent = nodes[rng.randrange(len(nodes))]
            nodes.append(f"n{i}")
            length = _random_length(rng)
            if pseudometric and rng.random() < 0.2:
                length = ZERO
            edges.append((parent, f"n{i}", length))
        T = MetricTree(tuple(nodes), tuple(edges), pseudometric)
        if min_leaves <= len(T.leaves) <= max_leaves:
            return T


def random_tree_metric(rng, n):
    """``n`` distinct points chosen among the nodes of a random weighted tree."""
    m = n + rng.randint(1, n + 2)
    nodes = [f"n{i}" for i in range(m)]
    edges = [(nodes[rng.randrange(i)], nodes[i], _random_length(rng)) for i in range(1, m)]
    T = MetricTree(tuple(nodes), tuple(edges))
    chosen = rng.sample(nodes, n)
    rows = []
    for x in chosen:
        dist = T.distances_from(x)
        rows.append([dist[y] for y in chosen])
    return validate_space(rows, [f"p{i}" for i in range(n)])


def metric_closure(rows):
    """Shortest-path closure of a symmetric nonnegative table (exact)."""
    rows = [[as_fraction(v) for v in row] for row in rows]
    den = 1
    for row in rows:
        for q in row:
            den = np.lcm(den, q.denominator)
    den = int(den)
    M = _kernels.metric_closure(to_int_array(rows, den))
    return [[from_int(v, den) for v in row] for row in M]


def perturbed_metric(rng, n, grid=8):
    """A random tree metric moved inside an l-infinity ball, then repaired.

    Each entry moves by a random multiple of ``1/grid`` (at most a quarter of
    the smallest distance scale times a random factor), entries are kept
    positive, and the shortest-path closure restores the triangle inequality.
    """
    base = random_tree_metric(rng, n)
    radius = rng.randint(1, 4 * grid)
    rows = [list(r) for r in base.dist]
    for i, j in combinations(range(n), 2):
        v = rows[i][j] + Fraction(rng.randint(-radius, radius), grid)
        v = max(v, Fraction(1, grid))
        rows[i][j] = rows[j][i] = v
    return validate_space(metric_closure(rows), base.labels)


def random_metric_space(rng, n):
    if n >= 3 and rng.random() < 0.5:
        return perturbed_metric(rng, n)
    return random_tree_metric(rng, n)


def random_suite(seed=0, count=300, sizes=(2, 8)):
    """Deterministic list of random rational metric spaces."""
    import random

    rng = random.Random(seed)
    lo, hi = sizes
    return [random_metric_space(rng, rng.randint(lo, hi)) for _ in range(count)]

