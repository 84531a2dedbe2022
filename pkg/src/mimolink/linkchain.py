"""Bit-level transmit chain and its frame bookkeeping.

One packet covers every subcarrier once: ``N`` subcarriers each carry
one space-time codeword of ``Q`` complex symbols, so a packet holds
``N * Q * B`` coded bits (B bits per symbol).  The transmit order is

    info bits -> terminated convolutional code -> puncturing
              -> seeded block interleaver -> Gray QAM
              -> per-subcarrier symbol groups (subcarrier-major)

and the receive side walks the same path backwards with LLRs.  Symbol
``q`` of subcarrier ``n`` is frame symbol ``n * Q + q``; its real axis
carries the first ``B/2`` of the symbol's bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import convcode, modulation
from .exceptions import ConfigurationError
from .stcode import StScheme, to_real_stack

__all__ = ["LinkChain", "spectral_efficiency", "efficiency_id"]


def spectral_efficiency(
    scheme: StScheme, constellation: modulation.Constellation, codec: convcode.CodecConfig
) -> Fraction:
    """Information bits per channel use: (Q/T) * bits_per_symbol * R_c."""
    return scheme.rate * constellation.bits_per_symbol * codec.rate_fraction


def efficiency_id(eta: Fraction) -> str:
    """Canonical mode label for a spectral efficiency, e.g. ``eta4``.

    BER-prediction artifacts (reference curves, calibrated compression
    parameters) are keyed by this label: modes with equal efficiency
    share one parameter set even when scheme, constellation, and code
    rate all differ.
    """
    eta = Fraction(eta)
    if eta.denominator == 1:
        return f"eta{eta.numerator}"
    return f"eta{eta.numerator}_{eta.denominator}"


@dataclass(frozen=True)
class LinkChain:
    """Static frame structure shared by transmitter and receiver."""

    scheme: StScheme
    constellation: modulation.Constellation
    codec: convcode.CodecConfig
    n_subcarriers: int
    interleaver_seed: int | None = 0
    coded_bits: int = field(init=False)
    steps: int = field(init=False)
    n_info_bits: int = field(init=False)

    def __post_init__(self):
        if self.n_subcarriers < 1:
            raise ConfigurationError("need at least one subcarrier")
        coded = (
            self.n_subcarriers
            * self.scheme.q_symbols
            * self.constellation.bits_per_symbol
        )
        steps = convcode.steps_for_coded_length(coded, self.codec)
        object.__setattr__(self, "coded_bits", coded)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "n_info_bits", steps - convcode.N_TAIL)

    @property
    def spectral_efficiency(self) -> Fraction:
        return spectral_efficiency(self.scheme, self.constellation, self.codec)

    @property
    def mode_id(self) -> str:
        """Efficiency-class label used to key BER-prediction artifacts."""
        return efficiency_id(self.spectral_efficiency)

    # ------------------------------------------------------------------
    # transmit direction
    def encode_frame(self, info_bits: np.ndarray) -> np.ndarray:
        """Info bits -> interleaved coded bits (channel order)."""
        info_bits = np.asarray(info_bits, dtype=np.uint8)
        if info_bits.shape != (self.n_info_bits,):
            raise ConfigurationError(
                f"expected {self.n_info_bits} info bits, got {info_bits.shape}"
            )
        coded = convcode.conv_encode(info_bits, self.codec)
        return modulation.interleave(coded, self.interleaver_seed)

    def map_frame(self, coded_bits: np.ndarray) -> np.ndarray:
        """Channel-order coded bits -> symbol grid, shape (N, Q) complex."""
        syms = modulation.qam_map(coded_bits, self.constellation)
        return syms.reshape(self.n_subcarriers, self.scheme.q_symbols)

    def transmit_symbols(self, info_bits: np.ndarray) -> np.ndarray:
        """Info bits -> stacked real symbol grid, shape (N, 2Q)."""
        return to_real_stack(self.map_frame(self.encode_frame(info_bits)))

    # ------------------------------------------------------------------
    # receive direction
    def decoder_input(self, frame_llrs: np.ndarray) -> np.ndarray:
        """Channel-order coded LLRs -> mother-rate LLRs for the decoder."""
        deint = modulation.deinterleave(frame_llrs, self.interleaver_seed)
        return convcode.depuncture(deint, self.codec, self.steps)

    def feedback_symbols(self, posterior_mother_llrs: np.ndarray, hard: bool = False) -> np.ndarray:
        """Decoder coded-bit LLRs -> regenerated symbol grid (N, 2Q) real."""
        kept = convcode.puncture(posterior_mother_llrs, self.codec)
        chan = modulation.interleave(kept, self.interleaver_seed)
        syms = modulation.soft_map(chan, self.constellation, hard=hard)
        return to_real_stack(syms.reshape(self.n_subcarriers, self.scheme.q_symbols))
