from .seeded_source import SeededSource, as_generator
from .unitaries import (
    TwirlProjection,
    haar_isometry,
    haar_matrix,
    haar_twirl_mc,
    haar_unitary,
    random_density,
    random_state_vector,
    twirl_schur_project,
    weyl_twirl,
    weyl_twirl_two_copy,
    weyl_unitaries,
)
