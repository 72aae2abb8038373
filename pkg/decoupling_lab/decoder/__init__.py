from .uhlmann_decoder import DecoderResult, build_decoder, entanglement_fidelity
