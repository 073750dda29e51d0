"""CSV, JSON and DOT serialization.  Rationals travel as ``"p/q"`` strings."""

import csv
import io
import json

from ._exact import as_fraction, fmt
from .cylinder import EdgeInterior, Vertex, sigma_point
from .errors import ParseError
from .metric import validate_space
from .tightspan import TightSpanFunction


def parse_matrix_csv(text):
    """Header row of labels, then one row of distances per label.

    A leading label column is accepted when the header starts with an empty
    cell.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty matrix file", 0)
    header = [c.strip() for c in rows[0]]
    body = rows[1:]
    if header and header[0] == "":
        header = header[1:]
        body = [r[1:] for r in body]
    if len(body) != len(header):
        raise ParseError(f"{len(header)} labels but {len(body)} rows", len(rows))
    table = []
    for i, row in enumerate(body, start=2):
        try:
            table.append([as_fraction(c.strip()) for c in row])
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"non-numeric entry in row {i}", i) from None
        if len(table[-1]) != len(header):
            raise ParseError(f"row {i} has {len(row)} entries, expected {len(header)}", i)
    return validate_space(table, header)


def read_matrix_csv(path):
    with open(path, newline="") as fh:
        return parse_matrix_csv(fh.read())


def matrix_csv(S):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(S.labels)
    for row in S.dist:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def table_json(values):
    return {k: fmt(v) for k, v in values.items()}


def space_json(S):
    return {"labels": list(S.labels), "dist": [[fmt(v) for v in row] for row in S.dist]}


def sequence_json(seq):
    levels = []
    for k, level in enumerate(seq.levels):
        entry = space_json(level.space)
        entry["underline"] = table_json(level.underline)
        entry["proj"] = dict(level.projection.assignment) if level.projection else None
        levels.append(entry)
    return {
        "N": seq.N,
        "levels": levels,
        "x_infinity": space_json(seq.x_infinity),
        "to_infinity": dict(seq.to_infinity),
        "sigma": table_json(seq.sigma_table),
    }


def point_json(a):
    if isinstance(a, Vertex):
        return {"vertex": [a.level, a.label]}
    return {"edge": [a.level, a.label], "offset": fmt(a.offset)}


def cylinder_json(C, Q):
    return {
        "N": C.N,
        "vertices": [
            {"level": v.level, "label": v.label, "sigma": fmt(sigma_point(C, v)), "component": C.components[v]}
            for v in C.vertices
        ],
        "edges": [
            {"upper": [v.level, v.label], "lower": [w.level, w.label], "length": fmt(length)}
            for v, (w, length) in C.edges.items()
        ],
        "components": list(C.component_ids),
        "quotient": {
            "nodes": [str(n) for n in Q.nodes],
            "edges": [[str(u), str(w), fmt(length)] for u, w, length in Q.edges],
            "roots": {c: str(r) for c, r in Q.roots.items()},
        },
    }


def _dot_id(v):
    return json.dumps(str(v))


def quotient_dot(Q):
    """The collapsed cylinder as an undirected DOT graph; roots drawn as double circles."""
    roots = set(Q.roots.values())
    lines = ["graph cylinder {", "  node [shape=circle];"]
    for n in Q.nodes:
        shape = "doublecircle" if n in roots else "circle"
        lines.append(f"  {_dot_id(n)} [shape={shape}];")
    for u, w, length in Q.edges:
        lines.append(f"  {_dot_id(u)} -- {_dot_id(w)} [label=\"{fmt(length)}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_point(obj):
    if "vertex" in obj:
        level, label = obj["vertex"]
        return Vertex(int(level), str(label))
    level, label = obj["edge"]
    return EdgeInterior(int(level), str(label), as_fraction(obj["offset"]))


def parse_function(obj, S):
    """A tight-span candidate from ``{label: value}`` or a list in label order."""
    if isinstance(obj, dict):
        missing = [x for x in S.labels if x not in obj]
        extra = [x for x in obj if x not in S]
        if missing or extra:
            raise ParseError(f"function keys do not match the space (missing {missing}, extra {extra})")
        values = [obj[x] for x in S.labels]
    elif isinstance(obj, list):
        if len(obj) != len(S):
            raise ParseError(f"expected {len(S)} values, got {len(obj)}")
        values = obj
    else:
        raise ParseError("function must be a JSON object or list")
    try:
        return TightSpanFunction(S, tuple(as_fraction(v) for v in values))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(str(exc)) from None


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.pos) from None


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=False)
