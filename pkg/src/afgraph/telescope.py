"""Telescoping of diagrams along level subsequences, and finite-depth
equivalence witnessing.

A telescope keeps the chosen levels and replaces each matrix by the product
of the skipped ones, so the new multiplicity from a to b counts the paths
from a to b in the original diagram.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import DepthError, PreconditionError
from .model import (
    BratteliDiagram,
    Level,
    MultMatrix,
    TailStep,
    TailTemplate,
    materialize,
    validate_diagram,
)


@dataclass(frozen=True)
class Subsequence:
    """A strictly increasing choice of levels: either an explicit list or an
    arithmetic rule start, start+step, start+2*step, ..."""

    levels: tuple[int, ...] | None = None
    start: int | None = None
    step: int | None = None

    def __post_init__(self):
        explicit = self.levels is not None
        arithmetic = self.start is not None or self.step is not None
        if explicit == arithmetic:
            raise ValueError("give either explicit levels or an arithmetic rule, not both")
        if explicit:
            if not self.levels or self.levels[0] < 1:
                raise ValueError("explicit subsequence must be nonempty with first index >= 1")
            if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
                raise ValueError("subsequence must be strictly increasing")
        else:
            if self.start is None or self.step is None or self.start < 1 or self.step < 1:
                raise ValueError("arithmetic rule needs start >= 1 and step >= 1")

    @classmethod
    def explicit(cls, levels) -> "Subsequence":
        return cls(levels=tuple(levels))

    @classmethod
    def arithmetic(cls, start: int, step: int) -> "Subsequence":
        return cls(start=start, step=step)

    @classmethod
    def parse(cls, text: str) -> "Subsequence":
        """Parse "1,3,5" as explicit levels or "start:step" as arithmetic."""
        text = text.strip()
        if ":" in text:
            start, step = text.split(":", 1)
            return cls.arithmetic(int(start), int(step))
        return cls.explicit(int(part) for part in text.split(","))

    @property
    def is_arithmetic(self) -> bool:
        return self.levels is None

    @property
    def is_identity(self) -> bool:
        return self.is_arithmetic and self.start == 1 and self.step == 1

    def prefix(self, count: int) -> tuple[int, ...]:
        """The first `count` selected levels."""
        if self.levels is not None:
            if count > len(self.levels):
                raise DepthError(f"subsequence has {len(self.levels)} levels, requested {count}")
            return self.levels[:count]
        return tuple(self.start + i * self.step for i in range(count))

    def __str__(self) -> str:
        if self.levels is not None:
            return ",".join(str(l) for l in self.levels)
        return f"{self.start}:{self.step}"


IDENTITY = Subsequence.arithmetic(1, 1)
ODDS = Subsequence.arithmetic(1, 2)
EVENS = Subsequence.arithmetic(2, 2)


def compose_entries(first: dict, second: dict) -> dict:
    """Entrywise product of two consecutive step matrices: the (a, c) entry
    counts two-step paths a -> b -> c."""
    out: dict[tuple[str, str], int] = {}
    by_src: dict[str, list[tuple[str, int]]] = {}
    for (b, c), m in second.items():
        by_src.setdefault(b, []).append((c, m))
    for (a, b), m1 in first.items():
        for c, m2 in by_src.get(b, ()):
            out[(a, c)] = out.get((a, c), 0) + m1 * m2
    return out


def compose_window(d: BratteliDiagram, lo: int, hi: int) -> dict:
    """Product of the matrices of a materialized diagram from level lo up to
    level hi; entries count the paths lo -> hi."""
    if hi == lo:
        return {(lab, lab): 1 for lab in d.level(lo).labels}
    acc = dict(d.matrix(lo).entries)
    for n in range(lo + 1, hi):
        acc = compose_entries(acc, d.matrix(n).entries)
    return acc


def telescope(d: BratteliDiagram, s: Subsequence, depth: int | None = None) -> BratteliDiagram:
    """Telescope d to the levels selected by s.

    With depth given, the output is materialized to exactly that many levels.
    Without it, an arithmetic rule whose step is a multiple of the tail
    period yields an output that keeps a (recomposed) tail; any other
    selection must stay within the explicit levels.  Explicit selections and
    misaligned rules drop the tail (the output is simply finite).
    """
    if depth is not None and depth < 1:
        raise PreconditionError(f"depth must be >= 1, got {depth}")
    if s.is_identity and depth is None:
        return d

    if s.levels is not None:
        chosen = s.levels if depth is None else s.prefix(depth)
        return _telescope_explicit(d, chosen)

    if depth is not None:
        return _telescope_explicit(d, s.prefix(depth))

    if d.tail is None:
        chosen = [l for l in itertools.takewhile(lambda l: l <= d.prefix_depth, _arithmetic_iter(s))]
        if not chosen:
            raise DepthError(f"subsequence starts at {s.start}, diagram has {d.prefix_depth} levels")
        return _telescope_explicit(d, tuple(chosen))

    if s.step % d.tail.period == 0:
        return _telescope_aligned(d, s)
    raise PreconditionError(
        f"arithmetic step {s.step} is not a multiple of the tail period {d.tail.period}; pass depth to materialize"
    )


def _arithmetic_iter(s: Subsequence):
    l = s.start
    while True:
        yield l
        l += s.step


def _telescope_explicit(d: BratteliDiagram, chosen: tuple[int, ...]) -> BratteliDiagram:
    dd = materialize(d, chosen[-1])
    levels = tuple(Level(i + 1, dd.level(l).vertices) for i, l in enumerate(chosen))
    matrices = tuple(
        MultMatrix(i + 1, compose_window(dd, a, b)) for i, (a, b) in enumerate(zip(chosen, chosen[1:]))
    )
    return _checked(BratteliDiagram(levels, matrices))


def _telescope_aligned(d: BratteliDiagram, s: Subsequence) -> BratteliDiagram:
    """Arithmetic telescope whose step is a multiple of the tail period: the
    output carries a period-1 tail composed over one window."""
    t = d.tail
    # First selected level whose whole following window lies in the tail.
    j = 0
    while s.start + j * s.step < t.start_level - 1:
        j += 1
    last_prefix_level = s.start + j * s.step

    dd = materialize(d, last_prefix_level)
    chosen = tuple(s.start + i * s.step for i in range(j + 1))
    head = _telescope_explicit(dd, chosen)

    # Compose one window of template steps, accumulating defects along it:
    # entering a level adds its slot defects on top of the pushed-through ones.
    acc_entries: dict[tuple[str, str], int] | None = None
    acc_defects: dict[str, int] = {}
    for lvl in range(last_prefix_level + 1, last_prefix_level + s.step + 1):
        step = t.step_for(lvl)
        pushed: dict[str, int] = {}
        for (src, dst), mult in step.entries.items():
            pushed[dst] = pushed.get(dst, 0) + mult * acc_defects.get(src, 0)
        acc_defects = {lab: pushed.get(lab, 0) + t.defects.get(lab, 0) for lab in step.targets}
        acc_entries = dict(step.entries) if acc_entries is None else compose_entries(acc_entries, step.entries)

    final_slot = t.step_for(last_prefix_level + s.step)
    tail = TailTemplate(
        start_level=len(chosen) + 1,
        period=1,
        steps=(TailStep(targets=final_slot.targets, entries=acc_entries),),
        defects={lab: dfc for lab, dfc in sorted(acc_defects.items()) if dfc != 0},
    )
    return _checked(BratteliDiagram(head.levels, head.matrices, tail))


def _checked(d: BratteliDiagram) -> BratteliDiagram:
    report = validate_diagram(d)
    assert report.ok, f"telescoping produced an invalid diagram: {report.summary()}"
    return d


def prefix_isomorphic(d1: BratteliDiagram, d2: BratteliDiagram, depth: int) -> list[dict[str, str]] | None:
    """Search for per-level label bijections matching degrees and matrices
    exactly through the given depth.

    The search is exhaustive over degree-preserving bijections level by
    level (levels are small).  Returns the bijections, or None if there is
    no match at this depth.
    """
    m1 = materialize(d1, depth)
    m2 = materialize(d2, depth)
    for a, b in zip(m1.levels, m2.levels):
        if sorted(deg for _, deg in a.vertices) != sorted(deg for _, deg in b.vertices):
            return None

    def candidates(n: int):
        a, b = m1.levels[n], m2.levels[n]
        groups: dict[int, tuple[list[str], list[str]]] = {}
        for lab, deg in a.vertices:
            groups.setdefault(deg, ([], []))[0].append(lab)
        for lab, deg in b.vertices:
            groups[deg][1].append(lab)
        degs = sorted(groups)
        pools = [itertools.permutations(groups[deg][1]) for deg in degs]
        for choice in itertools.product(*pools):
            sigma: dict[str, str] = {}
            for deg, perm in zip(degs, choice):
                sigma.update(zip(groups[deg][0], perm))
            yield sigma

    def matrices_match(n: int, prev: dict[str, str], cur: dict[str, str]) -> bool:
        ma, mb = m1.matrices[n - 1], m2.matrices[n - 1]
        for a in m1.levels[n - 1].labels:
            for b in m1.levels[n].labels:
                if ma.mult(a, b) != mb.mult(prev[a], cur[b]):
                    return False
        return True

    sigmas: list[dict[str, str]] = []

    def extend(n: int) -> bool:
        for sigma in candidates(n):
            if n > 0 and not matrices_match(n, sigmas[n - 1], sigma):
                continue
            sigmas.append(sigma)
            if n + 1 == len(m1.levels) or extend(n + 1):
                return True
            sigmas.pop()
        return False

    return sigmas if extend(0) else None


def check_equivalence_witness(
    d1: BratteliDiagram,
    d2: BratteliDiagram,
    s1: Subsequence,
    s2: Subsequence,
    depth: int,
) -> tuple[bool, dict]:
    """Verify a supplied equivalence witness: telescope both diagrams and
    compare the results through `depth` levels.

    True only certifies agreement at this depth; False means no bijection
    exists at this depth for these subsequences, not inequivalence.
    """
    t1 = telescope(d1, s1)
    t2 = telescope(d2, s2)
    bijections = prefix_isomorphic(t1, t2, depth)
    report = {
        "equivalent": bijections is not None,
        "depth": depth,
        "subsequences": [str(s1), str(s2)],
        "bijections": bijections,
    }
    return bijections is not None, report
