"""Baseband simulation of PPM visible-light links with ambient-noise cancellation.

The receive chain listens to the channel while the transmitter is silent,
fits a Yule-Walker linear predictor to the interference autocorrelation,
subtracts the one-step prediction from the data-phase signal and decides
each PPM frame by mask correlation.
"""

__version__ = "0.1.0"

from .ppm import (  # noqa: E402
    PpmConfig,
    SampleBuffer,
    SymbolSequence,
    bits_to_symbols,
    build_masks,
    modulate,
    symbols_to_bits,
)
from .channel import (  # noqa: E402
    AutoRegressive,
    ChannelModel,
    Composite,
    DcAmbient,
    HarmonicHum,
    NoiseSpec,
    RngSeed,
    WhiteOnly,
    acquire_noise_only,
    acquire_obstructed,
    generate_interference,
    transmit_through,
)
from .estimation import (  # noqa: E402
    AcfEstimate,
    PredictorModel,
    estimate_acf,
    estimate_noise_power,
    interference_acf,
    solve_yule_walker,
)
from .cancellation import CancellerState, cancel, prediction_gain, prime  # noqa: E402
from .detection import DecisionRecord, SerReport, compute_ser, detect_frame, detect_stream  # noqa: E402
