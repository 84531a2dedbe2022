"""Iterative MMSE / parallel-interference-cancellation receiver.

Per subcarrier the real system is y = G_eq s + w with per-component
noise variance sigma2 = N0/2.  Iteration 1 applies the regularized MMSE
filter

    s_hat = G_eq^T (G_eq G_eq^T + sigma2 I)^(-1) y

whose per-symbol quality follows analytically from the filtered system:
with A = (G_eq G_eq^T + sigma2 I)^(-1) and g_p the p-th column,

    useful signal coefficient   i0      = g_p^T A g_p
    cross-symbol interference   E|I1|^2 = 1/2 sum_{q != p} (g_p^T A g_q)^2
    filtered noise              E|I2|^2 = sigma2 * || A g_p ||^2
    SINR_p = (1/2) i0^2 / (E|I1|^2 + E|I2|^2)

(symbol components carry variance 1/2 per real dimension).  For
orthogonal codes such as Alamouti the cross terms vanish identically.

Later iterations subtract the regenerated interference of all other
symbols (soft PIC) and reduce to a per-symbol matched filter

    s_hat_p = g_p^T (y - G_eq,(p) s_tilde_(p)) / (g_p^T g_p),

with the per-symbol SINR re-estimated from the observable feedback
error:  SINR_p = 1 / (2 * mean |s_hat_p - s_tilde_p|^2), capped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import modulation
from .exceptions import DimensionError
from .linkchain import LinkChain

__all__ = [
    "SINR_MAX_DEFAULT",
    "SINR_FLOOR",
    "SinrGrid",
    "InterferenceDecomposition",
    "ReceiverOptions",
    "ReceiverResult",
    "mmse_detect",
    "sinr_analytic",
    "pic_detect",
    "feedback_sinr",
    "run_iterations",
]

SINR_MAX_DEFAULT = 1e6
SINR_FLOOR = 1e-12


@dataclass(frozen=True)
class SinrGrid:
    """Per-(subcarrier, real symbol) SINR of one receiver iteration."""

    values: np.ndarray  # (N, 2Q), linear scale
    iteration: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise DimensionError("SINR grid must be (subcarriers, real symbols)")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError("SINR grid entries must be positive and finite")
        object.__setattr__(self, "values", v)
        v.setflags(write=False)


@dataclass(frozen=True)
class InterferenceDecomposition:
    """First-iteration output statistics per (subcarrier, real symbol)."""

    i0: np.ndarray        # useful-signal coefficient g_p^T A g_p
    i1_power: np.ndarray  # cross-symbol interference power
    i2_power: np.ndarray  # filtered noise power


def _check_system(y: np.ndarray, g_eq: np.ndarray):
    if g_eq.ndim != 3 or y.ndim != 2:
        raise DimensionError("expected y (N, 2 M_R T) and g_eq (N, 2 M_R T, 2Q)")
    if y.shape != g_eq.shape[:2]:
        raise DimensionError(f"y {y.shape} does not match g_eq {g_eq.shape}")


def _mmse_filter(g_eq: np.ndarray, sigma2: float) -> np.ndarray:
    """W = A G_eq with A = (G_eq G_eq^T + sigma2 I)^(-1), batched."""
    if not (sigma2 > 0):
        raise ValueError("sigma2 must be positive (noise-free systems are singular)")
    n_rx = g_eq.shape[1]
    gram = g_eq @ np.swapaxes(g_eq, 1, 2) + sigma2 * np.eye(n_rx)
    return np.linalg.solve(gram, g_eq)


def mmse_detect(y: np.ndarray, g_eq: np.ndarray, sigma2: float) -> np.ndarray:
    """Regularized MMSE estimates, shape (N, 2Q).

    Note the estimates are biased by the coefficient i0 < 1; divide by
    :class:`InterferenceDecomposition` ``i0`` before demapping.
    """
    y = np.asarray(y, dtype=float)
    g_eq = np.asarray(g_eq, dtype=float)
    _check_system(y, g_eq)
    w = _mmse_filter(g_eq, sigma2)
    return np.einsum("nrp,nr->np", w, y)


def sinr_analytic(
    g_eq: np.ndarray, sigma2: float, sinr_max: float = SINR_MAX_DEFAULT
) -> tuple[np.ndarray, InterferenceDecomposition]:
    """First-iteration per-symbol SINR from the channel alone.

    Returns
    -------
    sinr : ndarray (N, 2Q), capped at ``sinr_max``, floored at SINR_FLOOR
    decomp : InterferenceDecomposition
    """
    g_eq = np.asarray(g_eq, dtype=float)
    if g_eq.ndim != 3:
        raise DimensionError("g_eq must be (N, 2 M_R T, 2Q)")
    w = _mmse_filter(g_eq, sigma2)
    m = np.einsum("nrp,nrq->npq", g_eq, w)  # g_p^T A g_q
    i0 = np.einsum("npp->np", m)
    i1 = 0.5 * ((m ** 2).sum(axis=2) - i0 ** 2)
    i2 = sigma2 * (w ** 2).sum(axis=1)
    sinr = 0.5 * i0 ** 2 / np.maximum(i1 + i2, 1e-300)
    sinr = np.clip(sinr, SINR_FLOOR, sinr_max)
    return sinr, InterferenceDecomposition(i0=i0, i1_power=i1, i2_power=i2)


def pic_detect(y: np.ndarray, g_eq: np.ndarray, s_tilde: np.ndarray) -> np.ndarray:
    """Soft parallel interference cancellation + per-symbol matched filter.

    Parameters
    ----------
    y : ndarray (N, 2 M_R T)
    g_eq : ndarray (N, 2 M_R T, 2Q)
    s_tilde : ndarray (N, 2Q)
        Regenerated symbols fed back from the decoder; entry p is NOT
        used when estimating symbol p (only the others are subtracted).

    Returns
    -------
    ndarray (N, 2Q); columns with zero norm yield 0.
    """
    y = np.asarray(y, dtype=float)
    g_eq = np.asarray(g_eq, dtype=float)
    s_tilde = np.asarray(s_tilde, dtype=float)
    _check_system(y, g_eq)
    if s_tilde.shape != (g_eq.shape[0], g_eq.shape[2]):
        raise DimensionError("s_tilde must be (N, 2Q)")
    residual = y - np.einsum("nrp,np->nr", g_eq, s_tilde)
    col_energy = (g_eq ** 2).sum(axis=1)
    corr = np.einsum("nrp,nr->np", g_eq, residual)
    safe = col_energy > 0
    out = np.where(safe, s_tilde + corr / np.where(safe, col_energy, 1.0), 0.0)
    return out


def feedback_sinr(
    s_hat: np.ndarray,
    s_tilde: np.ndarray,
    pooled: bool = False,
    sinr_max: float = SINR_MAX_DEFAULT,
):
    """SINR estimate from the decoder-feedback error 1 / (2 E|e|^2).

    With ``pooled=True`` the expectation runs over every entry passed in
    (one window) and a scalar returns; otherwise each entry is its own
    single-sample window.  Values are capped at ``sinr_max`` and floored
    at SINR_FLOOR.
    """
    err2 = (np.asarray(s_hat, float) - np.asarray(s_tilde, float)) ** 2
    if pooled:
        err2 = err2.mean()
    with np.errstate(divide="ignore"):
        sinr = 1.0 / (2.0 * err2)
    return np.clip(sinr, SINR_FLOOR, sinr_max)


@dataclass(frozen=True)
class ReceiverOptions:
    """Knobs of the iterative loop (defaults follow the reference chain)."""

    l_max: int = 4
    sinr_max: float = SINR_MAX_DEFAULT
    hard_feedback: bool = False
    feedback_llrs: str = "posterior"  # or "extrinsic"
    demapper_priors: bool = False

    def __post_init__(self):
        if self.l_max < 1:
            raise ValueError("need at least one iteration")
        if self.feedback_llrs not in ("posterior", "extrinsic"):
            raise ValueError("feedback_llrs must be 'posterior' or 'extrinsic'")


@dataclass
class ReceiverResult:
    """Everything the iterative receiver produced for one packet."""

    info_bits: np.ndarray
    info_bits_per_iteration: list
    sinr_grids: list
    decomposition: InterferenceDecomposition
    info_llrs: np.ndarray = field(default=None, repr=False)


def _demap_grid(chain: LinkChain, est: np.ndarray, sinr: np.ndarray, priors=None):
    """Per-axis LLRs of the whole grid, returned in channel bit order."""
    bpa = chain.constellation.bits_per_axis
    re_est, im_est = est[:, 0::2].reshape(-1), est[:, 1::2].reshape(-1)
    re_sinr, im_sinr = sinr[:, 0::2].reshape(-1), sinr[:, 1::2].reshape(-1)
    if priors is None:
        re_prior = im_prior = None
    else:
        grouped = priors.reshape(-1, chain.constellation.bits_per_symbol)
        re_prior, im_prior = grouped[:, :bpa], grouped[:, bpa:]
    re = modulation.axis_llrs(re_est, re_sinr, bpa, prior_llrs=re_prior)
    im = modulation.axis_llrs(im_est, im_sinr, bpa, prior_llrs=im_prior)
    return np.concatenate([re, im], axis=1).reshape(-1)


def run_iterations(
    y: np.ndarray,
    g_eq: np.ndarray,
    sigma2: float,
    chain: LinkChain,
    opts: ReceiverOptions = ReceiverOptions(),
) -> ReceiverResult:
    """Decode one packet with the full MMSE -> (PIC -> decode)* loop.

    Iteration 1: MMSE detection, analytic SINR, demap, BCJR decode.
    Iterations 2..l_max: regenerate symbols from the decoder's coded-bit
    LLRs, cancel, matched-filter, re-estimate SINR from the feedback
    error, demap, decode again.

    Returns
    -------
    ReceiverResult
        With one SinrGrid per iteration and hard info bits per iteration.
    """
    from . import convcode  # local import to keep module load light

    y = np.asarray(y, dtype=float)
    g_eq = np.asarray(g_eq, dtype=float)
    _check_system(y, g_eq)
    if g_eq.shape[0] != chain.n_subcarriers:
        raise DimensionError(
            f"chain expects {chain.n_subcarriers} subcarriers, got {g_eq.shape[0]}"
        )
    if g_eq.shape[2] != 2 * chain.scheme.q_symbols:
        raise DimensionError("g_eq symbol dimension does not match the scheme")

    sinr, decomp = sinr_analytic(g_eq, sigma2, opts.sinr_max)
    s_hat = mmse_detect(y, g_eq, sigma2)
    safe = np.abs(decomp.i0) > 1e-300
    est = np.where(safe, s_hat / np.where(safe, decomp.i0, 1.0), 0.0)
    sinr = np.where(safe, sinr, SINR_FLOOR)

    grids = []
    bits_per_iter = []
    priors = None
    s_tilde = None
    siso = None
    for iteration in range(1, opts.l_max + 1):
        if iteration > 1:
            fb = (
                siso.posterior if opts.feedback_llrs == "posterior" else siso.extrinsic
            )
            s_tilde = chain.feedback_symbols(fb, hard=opts.hard_feedback)
            s_hat = pic_detect(y, g_eq, s_tilde)
            sinr = feedback_sinr(s_hat, s_tilde, sinr_max=opts.sinr_max)
            dead = (g_eq ** 2).sum(axis=1) <= 0.0  # muted dimensions
            sinr = np.where(dead, SINR_FLOOR, sinr)
            est = s_hat
            if opts.demapper_priors:
                kept = convcode.puncture(siso.extrinsic, chain.codec)
                priors = modulation.interleave(kept, chain.interleaver_seed)
        grids.append(SinrGrid(values=sinr, iteration=iteration))
        frame_llrs = _demap_grid(chain, est, sinr, priors)
        siso = convcode.siso_decode(chain.decoder_input(frame_llrs), chain.codec)
        bits_per_iter.append(siso.info_bits)
    return ReceiverResult(
        info_bits=bits_per_iter[-1],
        info_bits_per_iteration=bits_per_iter,
        sinr_grids=grids,
        decomposition=decomp,
        info_llrs=siso.info_llrs,
    )
