"""Delay-aware OMP channel estimation with windowed delay-Doppler dictionaries."""

from .model import (
    DDGridSpec,
    FrameSpec,
    PathSet,
    build_window,
    channel_matrix,
    component_matrix,
    cyclic_extension,
    doppler_matrix,
    permutation_power,
)
from .dictionary import WindowedDictionary, build_dictionary, column_index, correlate
from .solver import (
    RankDeficientError,
    SparseEstimate,
    StoppingRule,
    da_omp,
    least_squares,
    omp_baseline,
    reconstruct_channel,
)
from .channel import (
    ChannelDrawConfig,
    NoiseConfig,
    PilotSequence,
    draw_channel,
    gen_pilot,
    propagate,
    receiver_front_end,
)

__version__ = "0.1.0"
