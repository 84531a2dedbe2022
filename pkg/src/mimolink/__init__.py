"""mimolink: coded MIMO-OFDM link simulation and EESM BER prediction.

The package simulates a 2x2 coded MIMO-OFDM link (Alamouti or golden-code
space-time block codes over a tapped-delay-line channel) with an iterative
MMSE/PIC soft receiver, and predicts coded BER from per-subcarrier SINR via
an exponential effective-SINR mapping (EESM) calibrated against AWGN
reference curves.

Typical entry points:

- :func:`load_config` / :class:`SimConfig` — parse a key=value config file.
- :class:`LinkChain` — transmit/receive chain for one configuration.
- :func:`simulate_sweep` — Monte-Carlo BER over an SNR sweep.
- :func:`generate_awgn_lut`, :func:`calibrate_lambda`, :func:`predict_ber`
  — the EESM prediction pipeline.
- ``python -m mimolink.cli`` or the ``mimolink`` console script — the
  ``simulate | lutgen | calibrate | validate`` command-line interface.
"""

from .channel import (
    EquivalentChannel,
    FrequencyChannel,
    NoiseModel,
    PowerProfile,
    apply_channel,
    channel_realization,
    equivalent_grid,
)
from .config import SimConfig, load_config, parse_config
from .convcode import CodecConfig, SisoResult, conv_encode, siso_decode
from .detector import (
    ReceiverOptions,
    ReceiverResult,
    SinrGrid,
    feedback_sinr,
    mmse_detect,
    pic_detect,
    run_iterations,
    sinr_analytic,
)
from .eesm import (
    AwgnLut,
    CalibrationRecord,
    EesmModel,
    calibrate_lambda,
    effective_sinr,
    generate_awgn_lut,
    load_lut,
    load_model,
    lut_lookup,
    pair_mean_sinr,
    predict_ber,
    save_lut,
    save_model,
)
from .exceptions import ConfigurationError, DimensionError, FramingError, MimolinkError
from .linkchain import LinkChain, efficiency_id, spectral_efficiency
from .modulation import Constellation, qam_constellation, qam_map, soft_map
from .sim import (
    PointSummary,
    RealizationResult,
    run_point,
    simulate_sweep,
)
from .stcode import (
    ALAMOUTI,
    GOLDEN,
    DispersionSet,
    StScheme,
    build_f,
    dispersion_set,
    scheme_by_name,
    st_encode,
)

__version__ = "0.1.0"

__all__ = [
    "ALAMOUTI",
    "AwgnLut",
    "CalibrationRecord",
    "CodecConfig",
    "ConfigurationError",
    "Constellation",
    "DimensionError",
    "DispersionSet",
    "EesmModel",
    "EquivalentChannel",
    "FramingError",
    "FrequencyChannel",
    "GOLDEN",
    "LinkChain",
    "MimolinkError",
    "NoiseModel",
    "PointSummary",
    "PowerProfile",
    "RealizationResult",
    "ReceiverOptions",
    "ReceiverResult",
    "SimConfig",
    "SinrGrid",
    "SisoResult",
    "StScheme",
    "apply_channel",
    "build_f",
    "calibrate_lambda",
    "channel_realization",
    "conv_encode",
    "dispersion_set",
    "effective_sinr",
    "efficiency_id",
    "equivalent_grid",
    "feedback_sinr",
    "generate_awgn_lut",
    "load_config",
    "load_lut",
    "load_model",
    "lut_lookup",
    "mmse_detect",
    "pair_mean_sinr",
    "parse_config",
    "pic_detect",
    "predict_ber",
    "qam_constellation",
    "qam_map",
    "run_iterations",
    "run_point",
    "save_lut",
    "save_model",
    "scheme_by_name",
    "simulate_sweep",
    "sinr_analytic",
    "siso_decode",
    "soft_map",
    "spectral_efficiency",
    "st_encode",
    "__version__",
]
