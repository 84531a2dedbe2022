"""Rate-compatible punctured convolutional code with an exact SISO decoder.

The mother code is the 64-state (133, 171) octal, constraint length 7
convolutional code used by DVB-T, always terminated with six zero flush
bits so the trellis starts and ends in state zero.  Higher rates come
from periodic puncturing of the two mother streams X (generator 133) and
Y (generator 171):

    rate 1/2   X: 1        Y: 1
    rate 2/3   X: 1 1      Y: 1 0
    rate 3/4   X: 1 1 0    Y: 1 0 1

The decoder is a full log-domain BCJR (forward-backward) over the
terminated trellis.  It returns exact posterior log-likelihood ratios --
no max-log approximation -- so its output matches brute-force MAP
marginalization over all codewords to floating-point accuracy.

LLR convention everywhere: positive means bit 0 is more likely.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numba import njit

from .exceptions import ConfigurationError, FramingError

__all__ = [
    "CodecConfig",
    "SisoResult",
    "conv_encode",
    "encode_mother",
    "puncture",
    "depuncture",
    "steps_for_coded_length",
    "siso_decode",
]

N_TAIL = 6

_PUNCTURE_MASKS = {
    "1/2": ((1,), (1,)),
    "2/3": ((1, 1), (1, 0)),
    "3/4": ((1, 1, 0), (1, 0, 1)),
}


@dataclass(frozen=True)
class CodecConfig:
    """Code rate selection for the (133, 171) mother code."""

    rate: str = "1/2"
    generators: tuple = (0o133, 0o171)

    def __post_init__(self):
        if self.rate not in _PUNCTURE_MASKS:
            raise ConfigurationError(
                f"unsupported code rate {self.rate!r}; expected one of "
                f"{sorted(_PUNCTURE_MASKS)}"
            )
        if len(self.generators) != 2:
            raise ConfigurationError("exactly two generator polynomials required")

    @property
    def rate_fraction(self) -> Fraction:
        num, den = self.rate.split("/")
        return Fraction(int(num), int(den))

    @property
    def mask(self) -> np.ndarray:
        """Puncturing mask, shape (2, period); row 0 = X, row 1 = Y."""
        return np.asarray(_PUNCTURE_MASKS[self.rate], dtype=np.uint8)

    @property
    def period(self) -> int:
        return self.mask.shape[1]


@lru_cache(maxsize=None)
def _trellis(generators: tuple):
    """Transition tables of the 64-state trellis.

    The shift register is (current bit, previous 6 bits), MSB = current
    bit, so the generator taps read MSB-first over the register.

    Returns
    -------
    next_state, out0, out1 : ndarray (64, 2)
        Indexed by (state, input bit).
    prev_state, prev_bit : ndarray (64, 2)
        The two (predecessor, input) pairs feeding each state.
    """
    g0, g1 = generators
    n_states = 64
    next_state = np.empty((n_states, 2), dtype=np.int64)
    out0 = np.empty((n_states, 2), dtype=np.int64)
    out1 = np.empty((n_states, 2), dtype=np.int64)
    for s in range(n_states):
        for b in (0, 1):
            reg = (b << 6) | s
            out0[s, b] = bin(reg & g0).count("1") & 1
            out1[s, b] = bin(reg & g1).count("1") & 1
            next_state[s, b] = reg >> 1
    prev_state = np.empty((n_states, 2), dtype=np.int64)
    prev_bit = np.empty((n_states, 2), dtype=np.int64)
    fill = np.zeros(n_states, dtype=np.int64)
    for s in range(n_states):
        for b in (0, 1):
            ns = next_state[s, b]
            prev_state[ns, fill[ns]] = s
            prev_bit[ns, fill[ns]] = b
            fill[ns] += 1
    assert (fill == 2).all()
    for arr in (next_state, out0, out1, prev_state, prev_bit):
        arr.setflags(write=False)
    return next_state, out0, out1, prev_state, prev_bit


_POPCOUNT = np.array([bin(v).count("1") & 1 for v in range(128)], dtype=np.uint8)


def encode_mother(bits: np.ndarray, cfg: CodecConfig) -> np.ndarray:
    """Terminated mother-rate encoding (no puncturing).

    Parameters
    ----------
    bits : ndarray of {0, 1}, the information bits (tail not included)

    Returns
    -------
    ndarray, shape (2 * (len(bits) + 6),), uint8
        Interleaved output pairs (X_k, Y_k) per trellis step.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 1:
        raise FramingError("bit frame must be 1-D")
    if bits.size and bits.max() > 1:
        raise FramingError("bits must be 0/1")
    g0, g1 = cfg.generators
    padded = np.concatenate([np.zeros(N_TAIL, np.uint8), bits, np.zeros(N_TAIL, np.uint8)])
    # register value per step: window (b_{k-6} .. b_k) dotted with 1..64
    windows = np.lib.stride_tricks.sliding_window_view(padded, 7)
    regs = windows @ (1 << np.arange(7))
    x = _POPCOUNT[regs & g0]
    y = _POPCOUNT[regs & g1]
    out = np.empty(2 * regs.size, dtype=np.uint8)
    out[0::2] = x
    out[1::2] = y
    return out


def _kept_positions(cfg: CodecConfig, steps: int) -> np.ndarray:
    if steps % cfg.period:
        raise FramingError(
            f"{steps} trellis steps are not a multiple of the rate-{cfg.rate} "
            f"puncturing period {cfg.period}"
        )
    mask = cfg.mask
    keep = np.empty(2 * steps, dtype=bool)
    keep[0::2] = np.tile(mask[0], steps // cfg.period).astype(bool)
    keep[1::2] = np.tile(mask[1], steps // cfg.period).astype(bool)
    return np.flatnonzero(keep)


def puncture(mother: np.ndarray, cfg: CodecConfig) -> np.ndarray:
    """Drop masked positions from a mother-rate stream (bits or LLRs).

    Accepts the flat ``(2 * steps,)`` pair stream or its ``(steps, 2)``
    reshape; either way positions are counted in (X1, Y1, X2, Y2, ...)
    order.
    """
    mother = np.asarray(mother).reshape(-1)
    if mother.size % 2:
        raise FramingError("mother stream must hold (X, Y) pairs")
    return mother[_kept_positions(cfg, mother.size // 2)]


def depuncture(llrs: np.ndarray, cfg: CodecConfig, steps: int) -> np.ndarray:
    """Re-insert zero LLRs (erasures) at the punctured positions."""
    llrs = np.asarray(llrs, dtype=float)
    kept = _kept_positions(cfg, steps)
    if llrs.size != kept.size:
        raise FramingError(
            f"expected {kept.size} surviving values for {steps} steps at "
            f"rate {cfg.rate}, got {llrs.size}"
        )
    out = np.zeros(2 * steps)
    out[kept] = llrs
    return out


def steps_for_coded_length(coded_len: int, cfg: CodecConfig) -> int:
    """Trellis steps (info + tail) producing exactly ``coded_len`` bits."""
    frac = cfg.rate_fraction
    steps = coded_len * frac.numerator
    if steps % frac.denominator:
        raise FramingError(
            f"{coded_len} coded bits are incompatible with rate {cfg.rate}"
        )
    steps //= frac.denominator
    if steps % cfg.period:
        raise FramingError(
            f"{coded_len} coded bits give {steps} steps, not a multiple of "
            f"the puncturing period {cfg.period}"
        )
    if steps <= N_TAIL:
        raise FramingError("frame too short to carry any information bits")
    return int(steps)


def conv_encode(bits: np.ndarray, cfg: CodecConfig) -> np.ndarray:
    """Encode, terminate and puncture one information frame."""
    return puncture(encode_mother(bits, cfg), cfg)


@njit(cache=True)
def _bcjr_kernel(llr_pairs, tail_start, next_state, out0, out1, prev_state, prev_bit):
    steps = llr_pairs.shape[0]
    n_states = next_state.shape[0]
    neg = -1.0e300

    gamma = np.empty((steps, n_states, 2))
    for t in range(steps):
        l0 = llr_pairs[t, 0]
        l1 = llr_pairs[t, 1]
        for s in range(n_states):
            for b in range(2):
                gamma[t, s, b] = 0.5 * (
                    (1.0 - 2.0 * out0[s, b]) * l0 + (1.0 - 2.0 * out1[s, b]) * l1
                )

    alpha = np.full((steps + 1, n_states), neg)
    alpha[0, 0] = 0.0
    for t in range(steps):
        for s2 in range(n_states):
            acc = neg
            for k in range(2):
                b = prev_bit[s2, k]
                if t >= tail_start and b == 1:
                    continue
                sp = prev_state[s2, k]
                m = alpha[t, sp] + gamma[t, sp, b]
                if m > acc:
                    acc, m = m, acc
                d = m - acc
                if d > -745.0:
                    acc = acc + np.log1p(np.exp(d))
            alpha[t + 1, s2] = acc

    beta = np.full((steps + 1, n_states), neg)
    beta[steps, 0] = 0.0
    for t in range(steps - 1, -1, -1):
        for s in range(n_states):
            acc = neg
            for b in range(2):
                if t >= tail_start and b == 1:
                    continue
                m = beta[t + 1, next_state[s, b]] + gamma[t, s, b]
                if m > acc:
                    acc, m = m, acc
                d = m - acc
                if d > -745.0:
                    acc = acc + np.log1p(np.exp(d))
            beta[t, s] = acc

    post = np.empty((steps, 2))
    info_llr = np.empty(steps)
    for t in range(steps):
        mmax = neg
        for s in range(n_states):
            for b in range(2):
                if t >= tail_start and b == 1:
                    continue
                m = alpha[t, s] + gamma[t, s, b] + beta[t + 1, next_state[s, b]]
                if m > mmax:
                    mmax = m
        p0_c0 = 0.0
        p1_c0 = 0.0
        p0_c1 = 0.0
        p1_c1 = 0.0
        p0_in = 0.0
        p1_in = 0.0
        for s in range(n_states):
            for b in range(2):
                if t >= tail_start and b == 1:
                    continue
                p = np.exp(alpha[t, s] + gamma[t, s, b] + beta[t + 1, next_state[s, b]] - mmax)
                if out0[s, b] == 0:
                    p0_c0 += p
                else:
                    p1_c0 += p
                if out1[s, b] == 0:
                    p0_c1 += p
                else:
                    p1_c1 += p
                if b == 0:
                    p0_in += p
                else:
                    p1_in += p
        post[t, 0] = np.log(p0_c0) - np.log(p1_c0)
        post[t, 1] = np.log(p0_c1) - np.log(p1_c1)
        info_llr[t] = np.log(p0_in) - np.log(p1_in)
    return post, info_llr


@dataclass(frozen=True)
class SisoResult:
    """Soft decoder output.

    ``extrinsic`` and ``posterior`` are mother-rate coded-bit LLRs
    (length 2 * steps); ``info_llrs`` and ``info_bits`` cover the
    information positions only (tail excluded).
    """

    extrinsic: np.ndarray
    posterior: np.ndarray
    info_llrs: np.ndarray
    info_bits: np.ndarray


def siso_decode(llrs: np.ndarray, cfg: CodecConfig) -> SisoResult:
    """Exact log-BCJR over the terminated trellis.

    Parameters
    ----------
    llrs : ndarray, shape (2 * steps,)
        Mother-rate channel LLRs (zeros at punctured positions), pairs
        (X_k, Y_k) per step.  The final six steps are treated as the
        zero tail.

    Returns
    -------
    SisoResult
    """
    llrs = np.asarray(llrs, dtype=float)
    if llrs.ndim != 1 or llrs.size % 2:
        raise FramingError("decoder input must hold (X, Y) LLR pairs")
    steps = llrs.size // 2
    if steps <= N_TAIL:
        raise FramingError("frame too short to carry any information bits")
    next_state, out0, out1, prev_state, prev_bit = _trellis(tuple(cfg.generators))
    post, info_llr = _bcjr_kernel(
        llrs.reshape(steps, 2),
        steps - N_TAIL,
        next_state,
        out0,
        out1,
        prev_state,
        prev_bit,
    )
    posterior = post.reshape(-1)
    n_info = steps - N_TAIL
    info_llrs = info_llr[:n_info]
    return SisoResult(
        extrinsic=posterior - llrs,
        posterior=posterior,
        info_llrs=info_llrs,
        info_bits=(info_llrs < 0).astype(np.uint8),
    )
