"""Toolkit for deciding when a leveled AF-algebra diagram presents a graph
C*-algebra, and for constructing and verifying the witnessing graph."""

from .errors import AfGraphError, DepthError, InvalidDiagramError, PreconditionError, SchemaError
from .model import (
    INFINITE,
    BratteliDiagram,
    Level,
    MultGraph,
    MultMatrix,
    TailStep,
    TailTemplate,
    ValidationReport,
    defect,
    diagram_to_graph,
    is_acyclic,
    is_amplified,
    materialize,
    validate_diagram,
)
from .telescope import EVENS, IDENTITY, ODDS, Subsequence, check_equivalence_witness, prefix_isomorphic, telescope
from .ideals import (
    SeparatedStructure,
    UnitalityResult,
    detect_mk_tail,
    enumerate_saturated_hereditary,
    is_unital,
    recognize_separated,
    row_set,
    saturated_hereditary_closure,
)
from .separation import ProperificationTrace, check_property_6prime, properify, separate
from .realize import (
    MaterializedRealization,
    RealizationCertificate,
    RealizedGraph,
    realize_separated,
    realize_strict,
    reconstruct_diagram,
    verify_realization,
)
from .ktheory import (
    MonoidCertificate,
    UnitNormalization,
    corner_graph,
    monoid_contains,
    source_positive,
    unit_normalize,
)
from .decide import ClassificationReport, classify, realize_auto
from .fixtures import fixture, random_diagram
from .dot import export_dot

__all__ = [name for name in dir() if not name.startswith("_")]
