"""Run configuration: flat key=value files, validation, hashing.

A config file looks like::

    # eta-4 transmit-diversity run
    scheme = alamouti
    constellation = 64
    code_rate = 2/3
    channel = tu6
    snr_db = 12,13,14,15,16,17,18
    seed = 7

Unknown keys are rejected (typos should fail loudly).  The
(scheme, constellation, code_rate) triple must be one of the four
supported operating modes unless ``allow_any_mcs = 1``:

    scheme    constellation  code_rate  efficiency
    alamouti  64             2/3        4 b/s/Hz
    golden    16             1/2        4 b/s/Hz
    alamouti  256            3/4        6 b/s/Hz
    golden    64             1/2        6 b/s/Hz

``guard_interval`` is accepted for config compatibility but has no
effect: the simulation works per subcarrier in the frequency domain,
where a sufficient guard is implied.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields, replace

from . import convcode, modulation, stcode
from .detector import ReceiverOptions
from .exceptions import ConfigurationError
from .linkchain import LinkChain

__all__ = ["SUPPORTED_MODES", "SimConfig", "parse_config", "load_config"]

# the four (scheme, constellation, code_rate) rows with a defined
# spectral-efficiency class
SUPPORTED_MODES = (
    ("alamouti", 64, "2/3"),
    ("golden", 16, "1/2"),
    ("alamouti", 256, "3/4"),
    ("golden", 64, "1/2"),
)

MAX_SUBCARRIERS = 8192

# keys that describe file plumbing rather than the experiment itself;
# excluded from the config hash
_IO_KEYS = ("out_dir", "lut_file", "model_file", "records_file")


@dataclass(frozen=True)
class SimConfig:
    """Validated run configuration (see module docstring for the file format)."""

    scheme: str
    constellation: int
    code_rate: str
    snr_db: tuple
    channel: str = "tu6"
    n_subcarriers: int = 128
    bandwidth_hz: float = 7.61e6
    power_db: tuple = (0.0, 0.0)
    seed: int = 0
    n_packets: int = 1
    l_max: int = 4
    min_bit_errors: int = 100
    max_bits: int = 20_000_000
    sinr_source: str = "analytic"
    soft_mapper: str = "soft"
    feedback_llrs: str = "posterior"
    demapper_priors: bool = False
    interleaver_seed: int = 0
    guard_interval: int = 0  # accepted, inert (frequency-domain model)
    allow_any_mcs: bool = False
    out_dir: str = "out"
    lut_file: str = ""
    model_file: str = ""
    records_file: str = ""

    def __post_init__(self):
        if self.scheme not in ("alamouti", "golden"):
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        if self.constellation not in (16, 64, 256):
            raise ConfigurationError(
                f"constellation must be 16, 64 or 256, got {self.constellation}"
            )
        if self.code_rate not in ("1/2", "2/3", "3/4"):
            raise ConfigurationError(f"unknown code rate {self.code_rate!r}")
        mode = (self.scheme, self.constellation, self.code_rate)
        if mode not in SUPPORTED_MODES and not self.allow_any_mcs:
            rows = ", ".join("/".join(map(str, m)) for m in SUPPORTED_MODES)
            raise ConfigurationError(
                f"{'/'.join(map(str, mode))} is not a supported operating mode "
                f"(expected one of: {rows}); set allow_any_mcs = 1 to override"
            )
        if self.channel not in ("tu6", "flat", "awgn"):
            raise ConfigurationError(f"unknown channel model {self.channel!r}")
        if not (1 <= self.n_subcarriers <= MAX_SUBCARRIERS):
            raise ConfigurationError(
                f"n_subcarriers must lie in [1, {MAX_SUBCARRIERS}]"
            )
        if self.bandwidth_hz <= 0:
            raise ConfigurationError("bandwidth_hz must be positive")
        if len(self.power_db) != 2:
            raise ConfigurationError("power_db needs one value per transmit antenna")
        if not all(v == v and abs(v) != float("inf") for v in self.power_db):
            raise ConfigurationError("power_db values must be finite")
        if len(self.snr_db) == 0:
            raise ConfigurationError("snr_db sweep must not be empty")
        if any(b <= a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ConfigurationError("snr_db sweep must be strictly increasing")
        if not (0 <= self.seed < 2 ** 64):
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        if self.n_packets < 1 or self.l_max < 1:
            raise ConfigurationError("n_packets and l_max must be at least 1")
        if self.min_bit_errors < 1:
            raise ConfigurationError("min_bit_errors must be at least 1")
        if self.max_bits < 1:
            raise ConfigurationError("max_bits must be at least 1")
        if self.sinr_source not in ("analytic", "feedback"):
            raise ConfigurationError("sinr_source must be 'analytic' or 'feedback'")
        if self.soft_mapper not in ("soft", "hard"):
            raise ConfigurationError("soft_mapper must be 'soft' or 'hard'")
        if self.feedback_llrs not in ("posterior", "extrinsic"):
            raise ConfigurationError(
                "feedback_llrs must be 'posterior' or 'extrinsic'"
            )

    # ------------------------------------------------------------------
    def build_chain(self) -> LinkChain:
        return LinkChain(
            scheme=stcode.scheme_by_name(self.scheme),
            constellation=modulation.qam_constellation(self.constellation),
            codec=convcode.CodecConfig(rate=self.code_rate),
            n_subcarriers=self.n_subcarriers,
            interleaver_seed=self.interleaver_seed,
        )

    def receiver_options(self) -> ReceiverOptions:
        return ReceiverOptions(
            l_max=self.l_max,
            hard_feedback=self.soft_mapper == "hard",
            feedback_llrs=self.feedback_llrs,
            demapper_priors=self.demapper_priors,
        )

    def config_hash(self) -> str:
        """12-hex-digit digest of every semantic (non-path) field."""
        parts = []
        for f in sorted(fields(self), key=lambda f: f.name):
            if f.name in _IO_KEYS:
                continue
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(repr(float(v)) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            parts.append(f"{f.name}={value}")
        digest = hashlib.sha256("\n".join(parts).encode()).hexdigest()
        return digest[:12]


_BOOL_KEYS = {"demapper_priors", "allow_any_mcs"}
_INT_KEYS = {
    "constellation",
    "n_subcarriers",
    "seed",
    "n_packets",
    "l_max",
    "min_bit_errors",
    "max_bits",
    "interleaver_seed",
    "guard_interval",
}
_FLOAT_KEYS = {"bandwidth_hz"}
_TUPLE_KEYS = {"power_db", "snr_db"}


def parse_config(text: str, overrides: dict = None) -> SimConfig:
    """Parse key=value config text into a validated SimConfig."""
    known = {f.name for f in fields(SimConfig)}
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ConfigurationError(f"line {lineno}: expected key = value")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in kv:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        kv[key] = value
    if overrides:
        for key in overrides:
            if key not in known:
                raise ConfigurationError(f"override: unknown key {key!r}")
        kv.update({k: str(v) for k, v in overrides.items()})
    converted = {}
    for key, value in kv.items():
        try:
            if key in _BOOL_KEYS:
                if value not in ("0", "1"):
                    raise ValueError("expected 0 or 1")
                converted[key] = value == "1"
            elif key in _INT_KEYS:
                converted[key] = int(value)
            elif key in _FLOAT_KEYS:
                converted[key] = float(value)
            elif key in _TUPLE_KEYS:
                converted[key] = tuple(float(v) for v in value.split(",") if v.strip())
            else:
                converted[key] = value
        except ValueError as exc:
            raise ConfigurationError(f"key {key!r}: bad value {value!r} ({exc})")
    missing = {"scheme", "constellation", "code_rate", "snr_db"} - set(converted)
    if missing:
        raise ConfigurationError(f"missing required keys: {', '.join(sorted(missing))}")
    return SimConfig(**converted)


def load_config(path, overrides: dict = None) -> SimConfig:
    with open(path) as fh:
        return parse_config(fh.read(), overrides)
