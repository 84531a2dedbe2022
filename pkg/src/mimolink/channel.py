"""Frequency-domain MIMO channel model and real-valued equivalent system.

Per subcarrier n the link is modeled directly in the frequency domain:

    y[n] = G[n] . B . F . s[n] + w[n] = G_eq[n] . s[n] + w[n]

with everything stacked into real vectors (see :mod:`mimolink.stcode` for
the stacking convention).  ``G[n]`` realizes the per-antenna complex
channel gains as 2x2 rotation blocks, ``B`` is the diagonal per-antenna
amplitude matrix and ``F`` the space-time encoding matrix.

The multipath profile is the COST 207 Typical Urban six-tap channel
(TU-6), with independent Rayleigh taps per (rx, tx) antenna pair and the
total power normalized to one.  A "flat" single-tap Rayleigh profile and
a deterministic all-ones "awgn" channel are also provided.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, DimensionError
from .stcode import DispersionSet, build_f

__all__ = [
    "TU6_DELAYS_US",
    "TU6_POWERS_DB",
    "PowerProfile",
    "NoiseModel",
    "FrequencyChannel",
    "EquivalentChannel",
    "tapped_delay_line",
    "tu6_realization",
    "flat_realization",
    "unit_realization",
    "channel_realization",
    "build_g",
    "build_b",
    "assemble_equivalent",
    "equivalent_grid",
    "apply_channel",
]

# COST 207 Typical Urban, 6 taps (delay in microseconds, mean power in dB).
TU6_DELAYS_US = (0.0, 0.2, 0.5, 1.6, 2.3, 5.0)
TU6_POWERS_DB = (-3.0, 0.0, -2.0, -6.0, -8.0, -10.0)


@dataclass(frozen=True)
class PowerProfile:
    """Per-transmit-antenna power offsets in dB.

    ``-inf`` mutes an antenna entirely; that degenerate case is allowed
    here for diagnostics even though run configs require finite values.
    """

    p_db: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.p_db)
        if not vals:
            raise ConfigurationError("power profile must not be empty")
        if any(np.isnan(v) or v == np.inf for v in vals):
            raise ConfigurationError("power offsets must be real or -inf")
        object.__setattr__(self, "p_db", vals)

    @property
    def n_antennas(self) -> int:
        return len(self.p_db)

    @property
    def amplitudes(self) -> np.ndarray:
        """Linear amplitude sqrt(10^(P/10)) per antenna."""
        return np.sqrt(10.0 ** (np.asarray(self.p_db) / 10.0))


@dataclass(frozen=True)
class NoiseModel:
    """Complex AWGN with one-sided power ``n0`` per receive dimension.

    Each real component has variance ``n0 / 2``.  ``n0 = 0`` is permitted
    as the exact noise-free limit; detector stages that invert the noise
    covariance require a strictly positive value.
    """

    n0: float

    def __post_init__(self):
        if not (self.n0 >= 0.0):
            raise ConfigurationError(f"n0 must be non-negative, got {self.n0}")

    @property
    def sigma2_real(self) -> float:
        return self.n0 / 2.0


@dataclass(frozen=True)
class FrequencyChannel:
    """Per-subcarrier complex gains of one channel realization.

    Attributes
    ----------
    coeffs : ndarray, shape (M_R, M_T, N), complex
        ``coeffs[j, i, n]`` is the gain from tx antenna i to rx antenna j
        at subcarrier n.
    """

    coeffs: np.ndarray
    m_r: int = field(init=False)
    m_t: int = field(init=False)
    n_subcarriers: int = field(init=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 3:
            raise DimensionError("coeffs must be (M_R, M_T, N)")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "m_r", c.shape[0])
        object.__setattr__(self, "m_t", c.shape[1])
        object.__setattr__(self, "n_subcarriers", c.shape[2])
        c.setflags(write=False)


def tapped_delay_line(
    rng: np.random.Generator,
    delays_s,
    powers_db,
    n_subcarriers: int,
    bandwidth_hz: float,
    m_r: int,
    m_t: int,
) -> FrequencyChannel:
    """Draw one wide-sense-stationary Rayleigh tapped-delay-line realization.

    Tap powers are normalized to unit total so E|H[n]|^2 = 1 at every
    subcarrier.  Taps are i.i.d. across (rx, tx) pairs; the channel is
    sampled at subcarrier centers f_n = n * bandwidth / N.

    Returns
    -------
    FrequencyChannel
    """
    delays = np.asarray(delays_s, dtype=float)
    powers = 10.0 ** (np.asarray(powers_db, dtype=float) / 10.0)
    if delays.shape != powers.shape or delays.ndim != 1:
        raise DimensionError("delays and powers must be 1-D and equally long")
    if n_subcarriers < 1 or bandwidth_hz <= 0:
        raise ConfigurationError("need n_subcarriers >= 1 and bandwidth > 0")
    powers = powers / powers.sum()

    k = delays.size
    taps = (
        rng.standard_normal((m_r, m_t, k)) + 1j * rng.standard_normal((m_r, m_t, k))
    ) * np.sqrt(powers / 2.0)
    freqs = np.arange(n_subcarriers) * (bandwidth_hz / n_subcarriers)
    # (K, N) steering of each tap across the subcarrier grid
    phase = np.exp(-2j * np.pi * np.outer(delays, freqs))
    coeffs = np.einsum("jik,kn->jin", taps, phase)
    return FrequencyChannel(coeffs=coeffs)


def tu6_realization(
    rng: np.random.Generator,
    n_subcarriers: int,
    bandwidth_hz: float,
    m_r: int = 2,
    m_t: int = 2,
) -> FrequencyChannel:
    """COST 207 TU-6 realization across the subcarrier grid."""
    return tapped_delay_line(
        rng,
        np.asarray(TU6_DELAYS_US) * 1e-6,
        TU6_POWERS_DB,
        n_subcarriers,
        bandwidth_hz,
        m_r,
        m_t,
    )


def flat_realization(
    rng: np.random.Generator, n_subcarriers: int, m_r: int = 2, m_t: int = 2
) -> FrequencyChannel:
    """Frequency-flat Rayleigh realization (single tap at delay zero)."""
    h = (rng.standard_normal((m_r, m_t, 1)) + 1j * rng.standard_normal((m_r, m_t, 1))) / np.sqrt(2.0)
    return FrequencyChannel(coeffs=np.broadcast_to(h, (m_r, m_t, n_subcarriers)).copy())


def unit_realization(n_subcarriers: int, m_r: int = 2, m_t: int = 2) -> FrequencyChannel:
    """Deterministic all-ones channel (pure-AWGN reference link)."""
    return FrequencyChannel(coeffs=np.ones((m_r, m_t, n_subcarriers), dtype=complex))


def channel_realization(
    model: str,
    rng: np.random.Generator,
    n_subcarriers: int,
    bandwidth_hz: float,
    m_r: int = 2,
    m_t: int = 2,
) -> FrequencyChannel:
    """Dispatch on the config channel name ("tu6" | "flat" | "awgn")."""
    if model == "tu6":
        return tu6_realization(rng, n_subcarriers, bandwidth_hz, m_r, m_t)
    if model == "flat":
        return flat_realization(rng, n_subcarriers, m_r, m_t)
    if model == "awgn":
        return unit_realization(n_subcarriers, m_r, m_t)
    raise ConfigurationError(f"unknown channel model {model!r}")


def _rot2(h: complex) -> np.ndarray:
    return np.array([[h.real, -h.imag], [h.imag, h.real]])


def build_g(h: np.ndarray, t_slots: int) -> np.ndarray:
    """Real channel matrix acting on stacked per-antenna slot sequences.

    Block (j, i) of shape (2T, 2T) applies the complex gain ``h[j, i]``
    to each of the T stacked (Re, Im) pairs of tx antenna i.

    Parameters
    ----------
    h : ndarray, shape (M_R, M_T), complex
    t_slots : int

    Returns
    -------
    ndarray, shape (2 * M_R * T, 2 * M_T * T), float
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2:
        raise DimensionError("h must be a 2-D matrix")
    m_r, m_t = h.shape
    eye = np.eye(t_slots)
    blocks = [[np.kron(eye, _rot2(h[j, i])) for i in range(m_t)] for j in range(m_r)]
    return np.block(blocks)


def build_b(profile: PowerProfile, t_slots: int) -> np.ndarray:
    """Diagonal amplitude matrix: sqrt(10^(P_i/10)) over antenna i's 2T rows."""
    amps = profile.amplitudes
    return np.diag(np.repeat(amps, 2 * t_slots))


@dataclass(frozen=True)
class EquivalentChannel:
    """One subcarrier's assembled real system y = g_eq . s + w."""

    g: np.ndarray
    b: np.ndarray
    f: np.ndarray
    g_eq: np.ndarray
    subcarrier: int = 0

    @property
    def n_real_symbols(self) -> int:
        return self.g_eq.shape[1]


def assemble_equivalent(
    g: np.ndarray, b: np.ndarray, f: np.ndarray, subcarrier: int = 0
) -> EquivalentChannel:
    """Multiply out G . B . F with shape checking."""
    g = np.asarray(g, dtype=float)
    b = np.asarray(b, dtype=float)
    f = np.asarray(f, dtype=float)
    if g.shape[1] != b.shape[0] or b.shape[1] != f.shape[0]:
        raise DimensionError(
            f"inner dimensions do not chain: G {g.shape}, B {b.shape}, F {f.shape}"
        )
    return EquivalentChannel(g=g, b=b, f=f, g_eq=g @ b @ f, subcarrier=subcarrier)


def equivalent_grid(
    freq_channel: FrequencyChannel, profile: PowerProfile, ds: DispersionSet
) -> np.ndarray:
    """Stacked equivalent matrices for every subcarrier.

    Returns
    -------
    ndarray, shape (N, 2 * M_R * T, 2Q), float
    """
    if profile.n_antennas != freq_channel.m_t:
        raise DimensionError(
            f"power profile has {profile.n_antennas} antennas, channel has {freq_channel.m_t}"
        )
    if freq_channel.m_t != ds.scheme.m_t:
        raise DimensionError("channel tx antenna count does not match the scheme")
    t = ds.scheme.t_slots
    bf = build_b(profile, t) @ build_f(ds)
    n = freq_channel.n_subcarriers
    m_r, m_t = freq_channel.m_r, freq_channel.m_t
    # assemble all G[n] at once: blocks of kron(I_T, rot2(h))
    g_all = np.zeros((n, 2 * m_r * t, 2 * m_t * t))
    h = freq_channel.coeffs
    for j in range(m_r):
        for i in range(m_t):
            re = h[j, i].real
            im = h[j, i].imag
            for slot in range(t):
                r0, c0 = 2 * t * j + 2 * slot, 2 * t * i + 2 * slot
                g_all[:, r0, c0] = re
                g_all[:, r0, c0 + 1] = -im
                g_all[:, r0 + 1, c0] = im
                g_all[:, r0 + 1, c0 + 1] = re
    return g_all @ bf


def apply_channel(
    g_eq: np.ndarray,
    s_real: np.ndarray,
    noise: NoiseModel,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Propagate stacked real symbols and add white Gaussian noise.

    Parameters
    ----------
    g_eq : ndarray (..., 2 M_R T, 2Q)
    s_real : ndarray (..., 2Q)
    noise : NoiseModel
    rng : numpy Generator, required unless ``noise.n0 == 0``

    Returns
    -------
    ndarray (..., 2 M_R T)
    """
    y = np.einsum("...rc,...c->...r", g_eq, s_real)
    if noise.n0 > 0.0:
        if rng is None:
            raise ConfigurationError("rng required for a noisy channel")
        y = y + rng.normal(0.0, np.sqrt(noise.sigma2_real), size=y.shape)
    return y
