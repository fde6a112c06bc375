"""Text formats: ``aut`` blocks for automorphisms, ``graphmap`` blocks for maps."""

from __future__ import annotations

from .errors import InputError
from .graphs import Graph, GraphMap
from .words import Basis, Endo


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield n, line


def parse_aut(lines) -> Endo:
    lines = list(lines)
    if not lines:
        raise InputError("empty input")
    n, header = lines[0]
    fields = header.split()
    if fields[0] != "aut":
        raise InputError(f"line {n}: expected 'aut' header")
    opts = {}
    for f in fields[1:]:
        key, sep, val = f.partition("=")
        if not sep:
            raise InputError(f"line {n}: bad header field {f!r}")
        opts[key] = val
    if "names" not in opts:
        raise InputError(f"line {n}: header needs names=")
    basis = Basis.of(opts["names"])
    if "rank" in opts and opts["rank"] != str(basis.rank):
        raise InputError(f"line {n}: rank={opts['rank']} but {basis.rank} names given")
    images = {}
    ended = False
    for n, line in lines[1:]:
        if ended:
            raise InputError(f"line {n}: text after 'end'")
        if line == "end":
            ended = True
            continue
        lhs, sep, rhs = line.partition("->")
        lhs = lhs.strip()
        if not sep or lhs not in basis.names:
            raise InputError(f"line {n}: expected '<generator> -> <word>'")
        if lhs in images:
            raise InputError(f"line {n}: generator {lhs} given twice")
        images[lhs] = rhs.strip()
    if not ended:
        raise InputError("missing 'end'")
    missing = [x for x in basis.names if x not in images]
    if missing:
        raise InputError(f"no image for {' '.join(missing)}")
    return Endo.from_strings(basis, images)


def parse_graphmap(lines) -> GraphMap:
    lines = list(lines)
    if not lines or lines[0][1] != "graphmap":
        raise InputError("expected 'graphmap' header")
    vertices, edges, maps = [], [], []
    ended = False
    for n, line in lines[1:]:
        if ended:
            raise InputError(f"line {n}: text after 'end'")
        toks = line.split()
        if toks[0] == "end" and len(toks) == 1:
            ended = True
        elif toks[0] == "vertex" and len(toks) == 2:
            vertices.append(toks[1])
        elif toks[0] == "edge" and len(toks) == 4:
            edges.append(tuple(toks[1:]))
        elif toks[0] == "map" and len(toks) >= 2:
            maps.append((n, toks[1], toks[2:]))
        else:
            raise InputError(f"line {n}: cannot parse {line!r}")
    if not ended:
        raise InputError("missing 'end'")
    graph = Graph.build(vertices, edges)
    vmap: dict[int, int] = {}
    images: dict[int, tuple] = {}
    for n, name, rest in maps:
        if name in graph.vertices:
            if len(rest) != 1:
                raise InputError(f"line {n}: a vertex maps to one vertex")
            v = graph.vertex(name)
            if v in vmap:
                raise InputError(f"line {n}: vertex {name} mapped twice")
            vmap[v] = graph.vertex(rest[0])
        elif name in graph.edges:
            e = graph.edge(name)
            if e in images:
                raise InputError(f"line {n}: edge {name} mapped twice")
            images[e] = graph.parse_path(" ".join(rest))
        else:
            raise InputError(f"line {n}: unknown vertex or edge {name!r}")
    for e in range(graph.num_edges):
        if e not in images:
            raise InputError(f"no image for edge {graph.edges[e]}")
    for v in range(graph.num_vertices):
        if v in vmap:
            continue
        # infer from an incident edge with a nonempty image
        for e, (a, b) in enumerate(graph.ends):
            im = images[e]
            if im and a == v:
                vmap[v] = graph.init(im[0])
                break
            if im and b == v:
                vmap[v] = graph.term(im[-1])
                break
        else:
            raise InputError(f"no image for vertex {graph.vertices[v]}")
    return GraphMap(graph, tuple(vmap[v] for v in range(graph.num_vertices)),
                    tuple(images[e] for e in range(graph.num_edges)))


def parse_document(text: str):
    """Return ``("aut", Endo)`` or ``("graphmap", GraphMap)`` by header."""
    lines = list(_lines(text))
    if not lines:
        raise InputError("empty input")
    head = lines[0][1].split()[0]
    if head == "aut":
        return "aut", parse_aut(lines)
    if head == "graphmap":
        return "graphmap", parse_graphmap(lines)
    raise InputError(f"unknown header {head!r}")


def format_aut(e: Endo) -> str:
    b = e.basis
    out = [f"aut rank={b.rank} names={','.join(b.names)}"]
    out += [f"{x} -> {im}" for x, im in zip(b.names, e.images)]
    out.append("end")
    return "\n".join(out) + "\n"


def format_graphmap(m: GraphMap) -> str:
    g = m.graph
    out = ["graphmap"]
    out += [f"vertex {v}" for v in g.vertices]
    out += [f"edge {e} {g.vertices[a]} {g.vertices[b]}" for e, (a, b) in zip(g.edges, g.ends)]
    out += [f"map {v} {g.vertices[m.vmap[i]]}" for i, v in enumerate(g.vertices)]
    out += [f"map {e} {g.format_path(m.images[i])}" for i, e in enumerate(g.edges)]
    out.append("end")
    return "\n".join(out) + "\n"
