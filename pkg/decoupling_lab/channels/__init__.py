from .builtin import (
    BUILTINS,
    amplitude_damping,
    builtin,
    dephasing,
    depolarizing,
    erasure,
    identity,
    random_channel,
)
from .channel import (
    Channel,
    StinespringIsometry,
    apply_channel,
    channel_from_choi,
    choi,
    coherent_information,
    complementary,
    output_entropies,
    stinespring,
    tensor_power,
)
from .channel_io import channel_from_dict, channel_to_dict, load_channel, save_channel
