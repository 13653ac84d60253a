"""Positive-cone monoid membership for finite acyclic amplified graphs, the
unit-normalizing automorphism, and the corner construction of adding finite
heads.

For an amplified graph (every present edge of infinite multiplicity) the
monoid H of positive classes is generated by the basis vectors d_v together
with every d_v minus a finite sum of d_w over out-neighbors w of v, with
repetition allowed.  Membership has a reachability characterization: a vector
lies in H exactly when every strictly negative coordinate sits at a vertex
with a strictly positive coordinate somewhere strictly upstream.  The test
suite validates this against a bounded exhaustive generator-multiset oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import PreconditionError
from .model import MultGraph, is_acyclic, is_amplified, reachable_from

K0Vector = Mapping[str, int]


def _require_amplified_acyclic(g: MultGraph) -> None:
    if not is_amplified(g):
        raise PreconditionError("unsupported: graph has finite-multiplicity edges")
    if not is_acyclic(g):
        raise PreconditionError("unsupported: graph has a cycle")


def _coords(g: MultGraph, x: K0Vector) -> dict[str, int]:
    unknown = set(x) - set(g.vertices)
    if unknown:
        raise PreconditionError(f"vector indexes unknown vertices: {sorted(unknown)}")
    return {v: x.get(v, 0) for v in g.vertices}


@dataclass(frozen=True)
class MonoidCertificate:
    """Either a multiset of generator instances summing to the element, or a
    refutation: a negative coordinate all of whose strict ancestors are
    nonpositive."""

    member: bool
    generators: tuple[tuple[str, tuple[tuple[str, int], ...]], ...] | None
    refutation: tuple[str, tuple[str, ...]] | None

    def replay(self, g: MultGraph) -> dict[str, int]:
        """Sum the generator instances back into a vector."""
        if self.generators is None:
            raise PreconditionError("refutation certificates do not replay")
        total = {v: 0 for v in g.vertices}
        for apex, subs in self.generators:
            total[apex] += 1
            for w, count in subs:
                total[w] -= count
        return total

    def to_dict(self) -> dict:
        return {
            "member": self.member,
            "generators": None
            if self.generators is None
            else [{"apex": a, "subtract": [{"vertex": w, "count": c} for w, c in subs]} for a, subs in self.generators],
            "refutation": None
            if self.refutation is None
            else {"vertex": self.refutation[0], "nonpositive_ancestors": list(self.refutation[1])},
        }


def monoid_contains(g: MultGraph, x: K0Vector) -> tuple[bool, MonoidCertificate]:
    """Decide membership of x in the positive-cone monoid of an amplified
    acyclic graph, with a replayable certificate either way."""
    _require_amplified_acyclic(g)
    coords = _coords(g, x)

    strict_reach = {v: reachable_from(g, v) - {v} for v in g.vertices}
    negatives = [v for v in g.vertices if coords[v] < 0]
    funders: dict[str, str] = {}
    for v in negatives:
        for u in g.vertices:
            if coords[u] >= 1 and v in strict_reach[u]:
                funders[v] = u
                break
        else:
            ancestors = tuple(sorted(u for u in g.vertices if v in strict_reach[u]))
            return False, MonoidCertificate(False, None, (v, ancestors))

    instances = _build_instances(g, coords, funders)
    cert = MonoidCertificate(True, instances, None)
    assert cert.replay(g) == coords, "certificate replay mismatch"
    return True, cert


def _shortest_path(g: MultGraph, u: str, v: str) -> list[str]:
    prev: dict[str, str] = {}
    frontier = [u]
    seen = {u}
    while frontier:
        nxt = []
        for a in frontier:
            for b in g.successors(a):
                if b not in seen:
                    seen.add(b)
                    prev[b] = a
                    if b == v:
                        path = [v]
                        while path[-1] != u:
                            path.append(prev[path[-1]])
                        return path[::-1]
                    nxt.append(b)
        frontier = nxt
    raise AssertionError(f"no path {u} -> {v}")


def _build_instances(g, coords, funders):
    """Assemble generator instances: one merged instance per funder routes a
    unit down a shortest path to each funded deficit, intermediate instances
    cancel themselves, and plain basis instances cover the remainder."""
    instances: list[tuple[str, dict[str, int]]] = []
    net = {v: 0 for v in g.vertices}
    by_funder: dict[str, list[str]] = {}
    for v in sorted(funders):
        by_funder.setdefault(funders[v], []).append(v)

    for u in sorted(by_funder):
        first_steps: dict[str, int] = {}
        for v in by_funder[u]:
            deficit = -coords[v]
            path = _shortest_path(g, u, v)
            amounts = [deficit if i == len(path) - 2 else 1 for i in range(len(path) - 1)]
            first_steps[path[1]] = first_steps.get(path[1], 0) + amounts[0]
            net[path[1]] -= amounts[0]
            for i in range(1, len(path) - 1):
                instances.append((path[i], {path[i + 1]: amounts[i]}))
                net[path[i]] += 1
                net[path[i + 1]] -= amounts[i]
        instances.append((u, first_steps))
        net[u] += 1

    for v in sorted(net):
        remaining = coords[v] - net[v]
        assert remaining >= 0, f"over-funded vertex {v}"
        instances.extend((v, {}) for _ in range(remaining))

    instances.sort(key=lambda inst: (inst[0], sorted(inst[1].items())))
    return tuple((apex, tuple(sorted(subs.items()))) for apex, subs in instances)


@dataclass(frozen=True)
class UnitNormalization:
    """The automorphism data moving a source-positive class to an everywhere
    positive one: the target vector m, the matrices of the automorphism and
    its inverse, and the k-multipliers per (vertex, funding source)."""

    m: Mapping[str, int]
    alpha: Mapping[tuple[str, str], int]
    beta: Mapping[tuple[str, str], int]
    k_table: Mapping[tuple[str, str], int]
    sources: tuple[str, ...]
    t_sets: Mapping[str, tuple[str, ...]]

    def to_dict(self) -> dict:
        return {
            "m": dict(sorted(self.m.items())),
            "alpha": [{"row": r, "col": c, "value": v} for (r, c), v in sorted(self.alpha.items())],
            "beta": [{"row": r, "col": c, "value": v} for (r, c), v in sorted(self.beta.items())],
            "k_table": [{"vertex": a, "source": b, "k": v} for (a, b), v in sorted(self.k_table.items())],
            "sources": list(self.sources),
        }


def matvec(vertices, mat: Mapping[tuple[str, str], int], vec: Mapping[str, int]) -> dict[str, int]:
    out = {r: 0 for r in vertices}
    for (r, c), a in mat.items():
        out[r] += a * vec.get(c, 0)
    return out


def matmul(vertices, a: Mapping[tuple[str, str], int], b: Mapping[tuple[str, str], int]) -> dict[tuple[str, str], int]:
    out: dict[tuple[str, str], int] = {}
    by_row: dict[str, list[tuple[str, int]]] = {}
    for (r, c), v in b.items():
        by_row.setdefault(r, []).append((c, v))
    for (r, c), v in a.items():
        for c2, v2 in by_row.get(c, ()):
            key = (r, c2)
            out[key] = out.get(key, 0) + v * v2
    return {k: v for k, v in out.items() if v != 0}


def _identity(vertices) -> dict[tuple[str, str], int]:
    return {(v, v): 1 for v in vertices}


def source_positive(g: MultGraph, n: K0Vector) -> bool:
    """True when n is >= 1 at every source.  Necessary (not claimed
    sufficient) for n to be the class of a full projection."""
    if not is_acyclic(g):
        raise PreconditionError("unsupported: graph has a cycle")
    coords = _coords(g, n)
    return all(coords[v] >= 1 for v in g.sources())


def unit_normalize(g: MultGraph, n: K0Vector) -> UnitNormalization:
    """Normalize a source-positive monoid element to an everywhere-positive
    one via an automorphism preserving the monoid.

    For each vertex v, T_v collects the sources that reach v (v itself when v
    is a source); k_{v,w} = max(0, ceil((1 - n_v)/n_w)) is the least
    multiplier with n_w * k + n_v >= 1; and m_v = n_v + sum n_w * k_{v,w}.
    The map adds k_{w,v} copies of row w to each source row v; its inverse
    subtracts them.  Asserted here: alpha * beta = identity, alpha(n) = m
    with every m_v >= 1, and alpha maps a truncated generating family of the
    monoid back into the monoid.
    """
    _require_amplified_acyclic(g)
    coords = _coords(g, n)
    member, _cert = monoid_contains(g, n)
    if not member:
        raise PreconditionError("vector is not in the positive-cone monoid")
    sources = tuple(g.sources())
    for v in sources:
        if coords[v] < 1:
            raise PreconditionError(f"source {v!r} has coordinate {coords[v]} < 1")

    reach = {v: reachable_from(g, v) for v in g.vertices}
    t_sets = {v: tuple(w for w in sources if v in reach[w]) for v in g.vertices}

    k_table: dict[tuple[str, str], int] = {}
    for v in g.vertices:
        for w in t_sets[v]:
            k_table[(v, w)] = max(0, math.ceil((1 - coords[v]) / coords[w]))

    m = {v: coords[v] + sum(coords[w] * k_table[(v, w)] for w in t_sets[v]) for v in g.vertices}

    alpha = _identity(g.vertices)
    beta = _identity(g.vertices)
    for w in g.vertices:
        for v in t_sets[w]:
            k = k_table[(w, v)]
            if k:
                alpha[(w, v)] = alpha.get((w, v), 0) + k
                beta[(w, v)] = beta.get((w, v), 0) - k
    beta = {key: val for key, val in beta.items() if val != 0}

    ident = _identity(g.vertices)
    assert matmul(g.vertices, alpha, beta) == ident, "alpha * beta is not the identity"
    assert matmul(g.vertices, beta, alpha) == ident, "beta * alpha is not the identity"
    got_m = matvec(g.vertices, alpha, coords)
    assert got_m == m, "alpha does not move n to m"
    assert all(val >= 1 for val in m.values()), "normalized class is not everywhere positive"
    for image in _truncated_generator_images(g, alpha):
        inside, _ = monoid_contains(g, image)
        assert inside, f"alpha image {image} left the monoid"

    return UnitNormalization(m, alpha, beta, k_table, sources, t_sets)


def _truncated_generator_images(g: MultGraph, mat) -> list[dict[str, int]]:
    """Images under mat of the basis vectors and of the single- and
    double-subtraction generators."""
    family: list[dict[str, int]] = []
    for v in g.vertices:
        family.append({v: 1})
    for v in g.vertices:
        outs = g.successors(v)
        for w in outs:
            family.append({v: 1, w: -1})
        for i, w in enumerate(outs):
            for u in outs[i:]:
                vec = {v: 1}
                vec[w] = vec.get(w, 0) - 1
                vec[u] = vec.get(u, 0) - 1
                family.append(vec)
    return [matvec(g.vertices, mat, vec) for vec in family]


def corner_graph(g: MultGraph, n: K0Vector) -> MultGraph:
    """The graph presenting the corner cut by a class normalizing to m: the
    amplified graph plus, at each vertex v with m_v >= 2, a finite head of
    m_v - 1 multiplicity-one edges."""
    norm = unit_normalize(g, n)
    names = list(g.vertices)
    edges: dict[tuple[str, str], "int | object"] = dict(g.edges)
    for v in g.vertices:
        length = norm.m[v] - 1
        if length < 1:
            continue
        head = [f"w{i}^{v}" for i in range(1, length + 1)]
        names.extend(head)
        for a, b in zip(head, head[1:]):
            edges[(a, b)] = 1
        edges[(head[-1], v)] = 1
    return MultGraph(tuple(names), edges)
