from .flattening import (
    BoundCheck,
    FlattenedCode,
    TypicalityReport,
    channel_state,
    flatten_code,
    gentle_measurement,
    input_purification,
    pure_trace_distance,
    verify_typ_bounds,
)
from .typical_subspace import TypicalDecomposition, typical_projector
from .types import TypeVector, enumerate_types, select_type, strings_of_type, type_class_dim
