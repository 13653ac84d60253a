"""Bounded-depth classification of a diagram and automatic dispatch to the
applicable realization.

The classifier is one-sided on purpose: it certifies the constructive cases
and reports everything else as Unknown or out of scope; it never asserts
non-realizability.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidDiagramError, PreconditionError
from .ideals import SeparatedStructure, UnitalityResult, is_unital, recognize_separated
from .model import BratteliDiagram, incoming_sum, materialize, validate_diagram
from .realize import RealizationCertificate, RealizedGraph, realize_separated, realize_strict, verify_realization
from .separation import check_property_6prime, properify

VERDICT_SEPARATED = "RealizableViaSeparatedForm"
VERDICT_STRICT = "RealizableViaStrictForm"
VERDICT_UNITAL = "UnitalOutOfScope"
VERDICT_UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ClassificationReport:
    depth: int
    unital: UnitalityResult
    separated: SeparatedStructure | None
    proper: bool | None
    p6prime: bool | None
    p6prime_offenders: tuple[tuple[int, str], ...]
    strict_form: bool
    strict_offender: str | None
    verdict: str
    evidence: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "verdict": self.verdict,
            "unital": self.unital.status,
            "separated": self.separated.to_dict() if self.separated else None,
            "proper": self.proper,
            "p6prime": self.p6prime,
            "p6prime_offenders": [[n, lab] for n, lab in self.p6prime_offenders],
            "strict_form": self.strict_form,
            "strict_offender": self.strict_offender,
            "evidence": list(self.evidence),
        }


def classify(d: BratteliDiagram, depth: int) -> ClassificationReport:
    """Check the diagram against the constructive realizability cases through
    `depth` levels and report the evidence chain.

    Verdicts: strict form everywhere -> realizable by adding sources;
    separated with the two-alternative defect condition -> realizable after
    properification; a unitality witness -> out of constructive scope (the
    unital case needs classification machinery, not a diagram construction);
    anything else -> Unknown.
    """
    report = validate_diagram(d)
    if not report.ok:
        raise InvalidDiagramError(report)

    evidence: list[str] = []
    strict_form, strict_offender = _strict_form(d, depth)
    evidence.append(
        "strict form holds through depth" if strict_form else f"strict form fails: {strict_offender}"
    )

    rec = recognize_separated(d, depth)
    separated = rec[0] if rec else None
    proper = rec[1] if rec else None
    p6 = None
    offenders: tuple[tuple[int, str], ...] = ()
    if separated is not None:
        evidence.append(f"separated split found with k={separated.k}, proper={proper}")
        p6, offenders = check_property_6prime(d, separated, depth)
        evidence.append(
            "two-alternative defect condition holds" if p6 else f"two-alternative defect condition fails at {offenders[:3]}"
        )
    else:
        evidence.append("no separated split at this depth")

    unital = is_unital(d, depth)
    evidence.append(f"unitality: {unital.status}")

    if strict_form:
        verdict = VERDICT_STRICT
    elif separated is not None and p6:
        verdict = VERDICT_SEPARATED
    elif unital.witnessed:
        verdict = VERDICT_UNITAL
    else:
        verdict = VERDICT_UNKNOWN

    return ClassificationReport(
        depth=depth,
        unital=unital,
        separated=separated,
        proper=proper,
        p6prime=p6,
        p6prime_offenders=offenders,
        strict_form=strict_form,
        strict_offender=strict_offender,
        verdict=verdict,
        evidence=tuple(evidence),
    )


def _strict_form(d: BratteliDiagram, depth: int) -> tuple[bool, str | None]:
    dd = materialize(d, depth)
    for n in range(1, depth + 1):
        lvl = dd.level(n)
        for lab in lvl.labels:
            deg = lvl.degree(lab)
            if deg < 2:
                return False, f"vertex {lab!r} at level {n} has degree {deg}"
            if deg <= incoming_sum(dd, n, lab):
                return False, f"vertex {lab!r} at level {n} has defect 0"
    return True, None


def realize_auto(
    d: BratteliDiagram, depth: int
) -> tuple[RealizedGraph, RealizationCertificate, BratteliDiagram]:
    """Classify, dispatch to the applicable construction, and verify.

    Returns the realized graph, a passing certificate, and the diagram the
    graph was actually built from (the properified form when the input was
    separated but not proper).  Raises when the verdict is Unknown or
    out of scope.
    """
    report = classify(d, depth)
    if report.verdict == VERDICT_STRICT:
        graph = realize_strict(d)
        built_from = d
        cert_depth = depth
    elif report.verdict == VERDICT_SEPARATED:
        if report.proper:
            graph = realize_separated(d, report.separated)
            built_from = d
            cert_depth = depth
        else:
            built_from, _trace = properify(d, report.separated, depth)
            rec = recognize_separated(built_from, depth)
            graph = realize_separated(built_from, rec[0])
            cert_depth = depth
    else:
        raise PreconditionError(f"not realizable by the constructive cases: verdict {report.verdict}")

    cert = verify_realization(graph, built_from, cert_depth)
    assert cert.passed, f"realization certificate failed: {cert.first_failure}"
    return graph, cert, built_from
