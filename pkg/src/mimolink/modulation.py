"""Gray-labeled square QAM, soft demapping and soft symbol regeneration.

Square 2^B-QAM with unit average energy.  A symbol's B bits split into
two groups: the first B/2 bits select the real (in-phase) amplitude and
the last B/2 bits the imaginary one.  Each axis uses the binary
reflected Gray labeling; for 16-QAM the axis table reads

    00 -> -3,  01 -> -1,  11 -> +1,  10 -> +3     (times 1/sqrt(10))

and 64/256-QAM use the analogous 3/4-bit reflected-Gray tables with
scales 1/sqrt(42) and 1/sqrt(170).

Demapping is per axis under the scalar Gaussian model

    s_hat = s + nu,     Var(nu) = sigma_eff^2 = 1 / (2 * sinr)

(the per-axis symbol variance is 1/2, so ``sinr`` is the post-detection
SINR of that real dimension).  LLRs use the max-log approximation and
the convention LLR > 0 <=> bit 0, clamped to +/-50.  The soft mapper
inverts the process, turning coded-bit LLRs into expected symbol values
for interference reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, DimensionError

__all__ = [
    "Constellation",
    "qam_constellation",
    "qam_map",
    "axis_llrs",
    "soft_map",
    "interleave",
    "deinterleave",
    "LLR_CLAMP",
]

LLR_CLAMP = 50.0

_SUPPORTED_ORDERS = (16, 64, 256)


def _axis_tables(bits_per_axis: int):
    """Amplitudes and Gray labels of one real axis.

    Returns
    -------
    amps : ndarray, shape (2**bits_per_axis,)
        Level amplitudes in increasing order, unit-energy scaled so that
        a full symbol (two axes) has mean energy one.
    labels : ndarray
        Gray label of each level, ``labels[k] = k ^ (k >> 1)``.
    amp_by_label : ndarray
        Inverse lookup: amplitude of a given label value.
    """
    m = 1 << bits_per_axis
    levels = np.arange(m)
    scale = 1.0 / np.sqrt(2.0 * (m * m - 1) / 3.0)
    amps = (2 * levels - (m - 1)) * scale
    labels = levels ^ (levels >> 1)
    amp_by_label = np.empty(m)
    amp_by_label[labels] = amps
    return amps, labels, amp_by_label


@dataclass(frozen=True)
class Constellation:
    """Unit-energy Gray-mapped square QAM of order 16, 64 or 256."""

    order: int
    bits_per_symbol: int = field(init=False)
    bits_per_axis: int = field(init=False)

    def __post_init__(self):
        if self.order not in _SUPPORTED_ORDERS:
            raise ConfigurationError(
                f"unsupported constellation order {self.order}; "
                f"expected one of {_SUPPORTED_ORDERS}"
            )
        b = int(np.log2(self.order))
        object.__setattr__(self, "bits_per_symbol", b)
        object.__setattr__(self, "bits_per_axis", b // 2)

    @property
    def axis_amplitudes(self) -> np.ndarray:
        return _axis_tables(self.bits_per_axis)[0]

    @property
    def axis_labels(self) -> np.ndarray:
        return _axis_tables(self.bits_per_axis)[1]

    def points(self) -> np.ndarray:
        """All constellation points indexed by the B-bit label."""
        _, _, amp_by_label = _axis_tables(self.bits_per_axis)
        m = 1 << self.bits_per_axis
        re = np.repeat(amp_by_label, m)
        im = np.tile(amp_by_label, m)
        return re + 1j * im


def qam_constellation(order: int) -> Constellation:
    return Constellation(order=order)


def _bits_to_labels(bits: np.ndarray, width: int) -> np.ndarray:
    weights = 1 << np.arange(width - 1, -1, -1)
    return bits.reshape(-1, width) @ weights


def qam_map(bits: np.ndarray, c: Constellation) -> np.ndarray:
    """Map a bit frame to complex symbols (first B/2 bits -> real axis)."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.ndim != 1 or bits.size % c.bits_per_symbol:
        raise DimensionError(
            f"bit frame length must be a multiple of {c.bits_per_symbol}"
        )
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise DimensionError("bits must be 0/1")
    _, _, amp_by_label = _axis_tables(c.bits_per_axis)
    pairs = bits.reshape(-1, c.bits_per_symbol)
    re_labels = _bits_to_labels(pairs[:, : c.bits_per_axis], c.bits_per_axis)
    im_labels = _bits_to_labels(pairs[:, c.bits_per_axis :], c.bits_per_axis)
    return amp_by_label[re_labels] + 1j * amp_by_label[im_labels]


def axis_llrs(
    estimates: np.ndarray,
    sinr: np.ndarray,
    bits_per_axis: int,
    prior_llrs: np.ndarray | None = None,
) -> np.ndarray:
    """Max-log bit LLRs of one real axis.

    Parameters
    ----------
    estimates : ndarray, shape (M,)
        Unbiased per-axis symbol estimates.
    sinr : ndarray, shape (M,) or scalar
        Post-detection SINR (linear) of each estimate; must be positive.
    bits_per_axis : int
    prior_llrs : ndarray, shape (M, bits_per_axis), optional
        A-priori LLRs used for turbo demapping; the returned LLRs are
        then extrinsic with respect to them.

    Returns
    -------
    ndarray, shape (M, bits_per_axis)
        Clamped to +/-LLR_CLAMP; positive favors bit 0.
    """
    estimates = np.atleast_1d(np.asarray(estimates, dtype=float))
    sinr = np.broadcast_to(np.asarray(sinr, dtype=float), estimates.shape)
    if np.any(sinr <= 0) or not np.all(np.isfinite(sinr)):
        raise ValueError("sinr must be positive and finite")
    amps, labels, _ = _axis_tables(bits_per_axis)
    # (ŝ - a)^2 / (2 sigma^2) with sigma^2 = 1/(2 sinr)
    metric = (estimates[:, None] - amps[None, :]) ** 2 * sinr[:, None]
    if prior_llrs is not None:
        prior_llrs = np.asarray(prior_llrs, dtype=float)
        if prior_llrs.shape != estimates.shape + (bits_per_axis,):
            raise DimensionError("prior_llrs must be (M, bits_per_axis)")
        # metric grows by L_b for every labeled 1 (P(1) = e^-L * P(0))
        for b in range(bits_per_axis):
            bit_is_one = (labels >> (bits_per_axis - 1 - b)) & 1
            metric = metric + np.where(bit_is_one, prior_llrs[:, b : b + 1], 0.0)
    out = np.empty((estimates.size, bits_per_axis))
    for b in range(bits_per_axis):
        bit_is_one = ((labels >> (bits_per_axis - 1 - b)) & 1).astype(bool)
        m1 = metric[:, bit_is_one].min(axis=1)
        m0 = metric[:, ~bit_is_one].min(axis=1)
        out[:, b] = m1 - m0
    if prior_llrs is not None:
        # remove each bit's own prior to keep the output extrinsic
        out = out - prior_llrs
    return np.clip(out, -LLR_CLAMP, LLR_CLAMP)


def _bit_probabilities(llrs: np.ndarray):
    """Stable P(bit = 0) and P(bit = 1) from LLRs of any magnitude."""
    x = np.asarray(llrs, dtype=float)
    p0 = np.empty_like(x)
    pos = x >= 0
    p0[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    p0[~pos] = e / (1.0 + e)
    return p0, 1.0 - p0


def soft_map(llrs: np.ndarray, c: Constellation, hard: bool = False) -> np.ndarray:
    """Expected symbol values given coded-bit LLRs.

    Per axis the expectation is sum_a a * P(a | LLRs) with independent
    bit probabilities P(0) = 1 / (1 + exp(-LLR)).  With ``hard=True``
    the bits are sliced instead and mapped to the nearest exact point.

    Parameters
    ----------
    llrs : ndarray, shape (M * B,)
    c : Constellation

    Returns
    -------
    ndarray, shape (M,), complex
    """
    llrs = np.asarray(llrs, dtype=float)
    if llrs.ndim != 1 or llrs.size % c.bits_per_symbol:
        raise DimensionError(
            f"LLR frame length must be a multiple of {c.bits_per_symbol}"
        )
    if hard:
        return qam_map((llrs < 0).astype(np.uint8), c)
    amps, labels, _ = _axis_tables(c.bits_per_axis)
    m = c.bits_per_axis
    groups = llrs.reshape(-1, c.bits_per_symbol)
    out = np.empty(groups.shape[0], dtype=complex)
    label_bits = np.array(
        [[(lab >> (m - 1 - b)) & 1 for b in range(m)] for lab in labels]
    )  # (levels, m)
    for axis, sl in ((0, slice(0, m)), (1, slice(m, 2 * m))):
        p0, p1 = _bit_probabilities(groups[:, sl])  # (M, m)
        # per level: product over axis bits of P(bit = label bit)
        probs = np.ones((groups.shape[0], amps.size))
        for b in range(m):
            probs *= np.where(label_bits[None, :, b] == 1, p1[:, b : b + 1], p0[:, b : b + 1])
        vals = probs @ amps
        if axis == 0:
            out.real = vals
        else:
            out.imag = vals
    return out


def interleave(seq: np.ndarray, seed: int | None) -> np.ndarray:
    """Apply the seed-deterministic frame permutation (identity if None)."""
    seq = np.asarray(seq)
    if seed is None:
        return seq.copy()
    perm = np.random.default_rng(seed).permutation(seq.size)
    return seq[perm]


def deinterleave(seq: np.ndarray, seed: int | None) -> np.ndarray:
    """Inverse of :func:`interleave` for the same seed."""
    seq = np.asarray(seq)
    if seed is None:
        return seq.copy()
    perm = np.random.default_rng(seed).permutation(seq.size)
    out = np.empty_like(seq)
    out[perm] = seq
    return out
