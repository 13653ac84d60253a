"""Normalization of diagrams toward the proper separated form.

Three steps: telescope a diagram with a recognized constant-degree quotient
tail into separated form (separate), check the two-alternative defect
condition that properification needs (check_property_6prime), and remove the
zero-defect vertices fed only by the chain, rerouting their weight through it
(properify).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import PreconditionError
from .ideals import SeparatedStructure, detect_mk_tail, recognize_separated
from .model import BratteliDiagram, Level, MultMatrix, materialize
from .telescope import EVENS, IDENTITY, Subsequence, telescope


def separate(
    d: BratteliDiagram,
    s: Mapping[int, frozenset],
    k: int,
    depth: int,
) -> tuple[BratteliDiagram, SeparatedStructure]:
    """Telescope d so each level splits as (ideal part in s) plus one chain
    vertex of degree k.

    Requires detect_mk_tail(d, s, depth) to succeed with this k.  The level
    selection starts after the last edge from s into the chain (error
    "claim-2 not stabilized at depth" if those never stop) and then greedily
    picks levels so the chain vertex reaches s between consecutive picks
    (error "claim-1 violated at depth" if it stops reaching s).
    """
    found = detect_mk_tail(d, s, depth)
    if found is None or found[1] != k:
        raise PreconditionError(
            f"no constant-degree-{k} complement tail within depth {depth}"
            + (f" (found degree {found[1]} from level {found[0]})" if found else "")
        )
    m = found[0]
    dd = materialize(d, depth)
    xs = {}
    for n in range(m, depth + 1):
        outside = [lab for lab in dd.level(n).labels if lab not in s.get(n, frozenset())]
        xs[n] = outside[0]

    last_violation = None
    for n in range(m, depth):
        mat = dd.matrix(n)
        if any(src in s.get(n, frozenset()) and dst == xs[n + 1] for (src, dst) in mat.entries):
            last_violation = n
    if last_violation is not None and last_violation >= depth - 1:
        raise PreconditionError(f"claim-2 not stabilized at depth {depth}: edges from the ideal part into the chain persist")
    m1 = m if last_violation is None else last_violation + 1

    for n in range(m1, depth):
        if dd.matrix(n).mult(xs[n], xs[n + 1]) != 1:
            raise PreconditionError(f"quotient chain broken between levels {n} and {n + 1}")

    chosen = [m1]
    while True:
        nxt = _first_hit(dd, s, xs, chosen[-1], depth)
        if nxt is None:
            break
        chosen.append(nxt)
    if len(chosen) < 2:
        raise PreconditionError(f"claim-1 violated at depth {depth}: the chain never reaches the ideal part after level {m1}")

    if chosen == list(range(1, depth + 1)):
        out = telescope(d, IDENTITY)
    else:
        out = telescope(dd, Subsequence.explicit(chosen))
    rec = recognize_separated(out, min(depth, len(chosen)))
    assert rec is not None and rec[0].k == k, "separation postcondition failed"
    return out, rec[0]


def _first_hit(dd, s, xs, frm, depth):
    """Smallest level l > frm reachable from the chain vertex at level frm
    inside the ideal part."""
    frontier = {xs[frm]}
    for l in range(frm + 1, depth + 1):
        mat = dd.matrix(l - 1)
        frontier = {dst for (src, dst) in mat.entries if src in frontier}
        if frontier & s.get(l, frozenset()):
            return l
    return None


def check_property_6prime(
    d: BratteliDiagram, ss: SeparatedStructure, depth: int
) -> tuple[bool, tuple[tuple[int, str], ...]]:
    """Check, for every non-chain vertex v at levels 2..depth, that either
    the defect is strictly positive or the degree is carried entirely by the
    chain: d(v) = |y_{n-1} -> v| * k.  Returns (ok, offenders)."""
    dd = materialize(d, depth)
    offenders = []
    for n in range(2, depth + 1):
        mat = dd.matrix(n - 1)
        prev = dd.level(n - 1)
        y_prev = ss.y_label(n - 1)
        for lab in ss.h_labels(dd, n):
            deg = dd.level(n).degree(lab)
            inc = sum(mult * prev.degree(src) for (src, dst), mult in mat.entries.items() if dst == lab)
            if deg > inc:
                continue
            if deg == mat.mult(y_prev, lab) * ss.k:
                continue
            offenders.append((n, lab))
    return not offenders, tuple(offenders)


@dataclass(frozen=True)
class ProperificationTrace:
    """Everything needed to replay the properification: which vertices were
    removed at each even level, the through-paths counted for rerouting, the
    added multiplicities, the intermediate diagram, and the telescopes that
    witness equivalence of input and output."""

    window: int
    removed: Mapping[int, tuple[str, ...]]
    path_counts: Mapping[int, Mapping[tuple[str, str], int]]
    reroutes: Mapping[int, Mapping[str, int]]
    intermediate: BratteliDiagram
    witness_subsequences: tuple[str, str]
    output_subsequence: str

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "removed": {str(n): list(labs) for n, labs in sorted(self.removed.items())},
            "path_counts": {
                str(n): [{"via": v, "dst": w, "count": c} for (v, w), c in sorted(p.items())]
                for n, p in sorted(self.path_counts.items())
            },
            "reroutes": {
                str(n): [{"dst": w, "mult": c} for w, c in sorted(r.items())]
                for n, r in sorted(self.reroutes.items())
            },
            "witness_subsequences": list(self.witness_subsequences),
            "output_subsequence": self.output_subsequence,
        }


def properify(
    d: BratteliDiagram, ss: SeparatedStructure, depth: int
) -> tuple[BratteliDiagram, ProperificationTrace]:
    """Make a separated diagram proper, preserving equivalence.

    On a window of 2*depth levels: collect at each level the set A_n of
    non-chain vertices whose degree is carried entirely by the chain, delete
    the even-level ones, reroute each deleted vertex's through-paths as new
    chain-to-next-level edges (multiplicity |y_(n-1) -> v| * |v -> w|), and
    telescope the result at the even levels.  The output has `depth` levels,
    is separated with the same k, and is proper.
    """
    window = 2 * depth
    ok, offenders = check_property_6prime(d, ss, window)
    if not ok:
        raise PreconditionError(f"two-alternative defect condition fails at {offenders[:4]}")
    dd = materialize(d, window)

    a_sets: dict[int, tuple[str, ...]] = {}
    for n in range(2, window + 1):
        mat = dd.matrix(n - 1)
        y_prev = ss.y_label(n - 1)
        a_sets[n] = tuple(
            lab
            for lab in ss.h_labels(dd, n)
            if dd.level(n).degree(lab) == mat.mult(y_prev, lab) * ss.k
        )

    if d.tail is not None:
        _check_tail_stability(d, ss, a_sets, window)

    if all(not labs for labs in a_sets.values()):
        out = telescope(d, EVENS)
        trace = ProperificationTrace(
            window=window,
            removed={n: () for n in range(2, window + 1, 2)},
            path_counts={n: {} for n in range(2, window + 1, 2)},
            reroutes={n: {} for n in range(2, window + 1, 2)},
            intermediate=d,
            witness_subsequences=("1:2", "1:2"),
            output_subsequence="2:2",
        )
        rec = recognize_separated(out, depth)
        assert rec is not None and rec[1] and rec[0].k == ss.k, "properify postcondition failed"
        return out, trace

    removed = {n: a_sets[n] for n in range(2, window + 1, 2)}
    path_counts: dict[int, dict[tuple[str, str], int]] = {}
    reroutes: dict[int, dict[str, int]] = {}

    levels = []
    for n in range(1, window + 1):
        gone = set(removed.get(n, ()))
        levels.append(Level(n, tuple((lab, deg) for lab, deg in dd.level(n).vertices if lab not in gone)))

    matrices = []
    for n in range(1, window):
        gone_src = set(removed.get(n, ()))
        gone_dst = set(removed.get(n + 1, ()))
        entries = {
            (src, dst): mult
            for (src, dst), mult in dd.matrix(n).entries.items()
            if src not in gone_src and dst not in gone_dst
        }
        if n % 2 == 0 and removed.get(n):
            y_here = ss.y_label(n)
            y_prev = ss.y_label(n - 1)
            counts: dict[tuple[str, str], int] = {}
            added: dict[str, int] = {}
            for v in removed[n]:
                into_v = dd.matrix(n - 1).mult(y_prev, v)
                for (src, dst), mult in dd.matrix(n).entries.items():
                    if src == v and dst != ss.y_label(n + 1):
                        counts[(v, dst)] = into_v * mult
                        added[dst] = added.get(dst, 0) + into_v * mult
            path_counts[n] = counts
            reroutes[n] = added
            for dst, mult in added.items():
                entries[(y_here, dst)] = entries.get((y_here, dst), 0) + mult
        elif n % 2 == 0:
            path_counts[n] = {}
            reroutes[n] = {}
        matrices.append(MultMatrix(n, entries))

    intermediate = BratteliDiagram(tuple(levels), tuple(matrices))
    _assert_incoming_sums_preserved(dd, intermediate, window)

    out = telescope(intermediate, EVENS)
    trace = ProperificationTrace(
        window=window,
        removed=removed,
        path_counts=path_counts,
        reroutes={n: dict(sorted(r.items())) for n, r in reroutes.items()},
        intermediate=intermediate,
        witness_subsequences=("1:2", "1:2"),
        output_subsequence="2:2",
    )
    rec = recognize_separated(out, depth)
    assert rec is not None and rec[1] and rec[0].k == ss.k, "properify postcondition failed"
    return out, trace


def _check_tail_stability(d, ss, a_sets, window):
    """Inside the templated tail the removable set must repeat slot by slot;
    otherwise the finite window does not represent the infinite construction."""
    t = d.tail
    p = t.period
    by_slot_parity: dict[tuple[int, int], set] = {}
    for n in range(max(2, t.start_level + p), window + 1):
        key = ((n - t.start_level) % p, n % 2)
        prev = by_slot_parity.setdefault(key, set(a_sets[n]))
        if prev != set(a_sets[n]):
            raise PreconditionError("A-membership unstable in tail window")


def _assert_incoming_sums_preserved(original, pruned, window):
    """The rerouted diagram must give every surviving vertex exactly the
    incoming degree sum it had before; this is what keeps it a valid diagram
    with the same degrees."""
    for n in range(2, window + 1):
        lvl = pruned.level(n)
        mat_new = pruned.matrix(n - 1)
        prev_new = pruned.level(n - 1)
        mat_old = original.matrix(n - 1)
        prev_old = original.level(n - 1)
        for lab in lvl.labels:
            new_sum = sum(m * prev_new.degree(s) for (s, t2), m in mat_new.entries.items() if t2 == lab)
            old_sum = sum(m * prev_old.degree(s) for (s, t2), m in mat_old.entries.items() if t2 == lab)
            assert new_sum == old_sum, f"incoming sum changed at level {n} vertex {lab!r}: {new_sum} != {old_sum}"
