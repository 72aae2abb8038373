from .capacity import (
    CapacityResult,
    maximize_coherent_information,
    multicopy_lower_bound,
    params_from_state,
    state_from_params,
)
from .experiment import (
    RECORD_COLUMNS,
    CodeExperimentConfig,
    CodeExperimentRecord,
    SubspaceMode,
    code_instance,
    run_code_experiment,
    select_subspace,
    summarize,
)
