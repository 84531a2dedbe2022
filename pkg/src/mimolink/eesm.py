"""Effective-SINR BER prediction.

The post-decoder BER of the fading link is predicted in three steps:

1. compress the per-(subcarrier, symbol) SINR grid of a packet into one
   scalar with the exponential effective-SINR map

       SINR_eff = -lam * ln( mean_{n,q} exp(-SINR_q[n] / lam) )

2. look that scalar up in a reference curve ber = xi(snr) measured once
   on a non-fading unit channel (same coding and mapping, Alamouti
   transmit diversity);
3. the single parameter ``lam`` is calibrated per efficiency class by
   least squares between predicted and simulated log10 BER.

Modes with equal spectral efficiency share one (curve, lam) pair; the
prediction is insensitive to the transmit power split and to the
space-time scheme, which is the point of the method.

All SINR arithmetic is linear; dB appears only at file and query
boundaries.  Curve files are CSV (``snr_db,ber,censored`` plus ``# key=value``
header lines); model files are plain ``key=value`` text.  Both round-trip
bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import channel, convcode, detector, modulation, stcode
from .exceptions import ConfigurationError, DimensionError
from .linkchain import LinkChain, efficiency_id

__all__ = [
    "LAMBDA_SEARCH_RANGE",
    "pair_mean_sinr",
    "effective_sinr",
    "isotonic_non_increasing",
    "AwgnLut",
    "generate_awgn_lut",
    "save_lut",
    "load_lut",
    "lut_lookup",
    "CalibrationRecord",
    "EesmModel",
    "calibrate_lambda",
    "save_model",
    "load_model",
    "predict_ber",
]

LAMBDA_SEARCH_RANGE = (1e-2, 1e4)


# ---------------------------------------------------------------------------
# compression


def pair_mean_sinr(grid: np.ndarray) -> np.ndarray:
    """Reduce a per-real-dimension grid (N, 2Q) to per-symbol (N, Q).

    The real and imaginary halves of one QAM symbol see identical
    statistics in expectation, so their linear SINRs are averaged.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 2 or grid.shape[1] % 2:
        raise DimensionError("SINR grid must be (subcarriers, 2Q)")
    return 0.5 * (grid[:, 0::2] + grid[:, 1::2])


def effective_sinr(grid, lam: float) -> float:
    """Exponential effective SINR of a packet's SINR values.

    Parameters
    ----------
    grid : SinrGrid, (N, 2Q) array, or 1-D array
        Linear SINRs.  Two-dimensional input is taken per real dimension
        and pair-averaged to per-symbol values first; 1-D input is used
        as-is.
    lam : float
        Compression parameter, > 0.

    Returns
    -------
    float, linear scale.  Equals the common value exactly for a constant
    grid; tends to the arithmetic mean as lam -> inf and to the minimum
    as lam -> 0.
    """
    if not (lam > 0):
        raise ValueError("compression parameter must be positive")
    values = getattr(grid, "values", grid)
    values = np.asarray(values, dtype=float)
    if values.ndim == 2:
        values = pair_mean_sinr(values)
    values = values.reshape(-1)
    if values.size == 0:
        raise DimensionError("empty SINR grid")
    if not np.all(values > 0) or not np.all(np.isfinite(values)):
        raise ValueError("SINRs must be positive and finite")
    # anchor at the minimum: exact for constant grids, no overflow ever
    lo = values.min()
    return lo - lam * math.log(np.exp(-(values - lo) / lam).mean())


# ---------------------------------------------------------------------------
# reference curve


def isotonic_non_increasing(y: np.ndarray, weights=None) -> np.ndarray:
    """Weighted least-squares fit of a non-increasing sequence (PAVA)."""
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    if y.shape != w.shape or y.ndim != 1:
        raise DimensionError("values and weights must be equal-length 1-D")
    # pool adjacent violators on the negated (non-decreasing) problem
    vals, wts, sizes = [], [], []
    for yi, wi in zip(-y, w):
        vals.append(yi)
        wts.append(wi)
        sizes.append(1)
        while len(vals) > 1 and vals[-2] > vals[-1]:
            v2, w2, s2 = vals.pop(), wts.pop(), sizes.pop()
            v1, w1, s1 = vals.pop(), wts.pop(), sizes.pop()
            vals.append((v1 * w1 + v2 * w2) / (w1 + w2))
            wts.append(w1 + w2)
            sizes.append(s1 + s2)
    out = np.repeat(vals, sizes)
    return -out


@dataclass(frozen=True)
class AwgnLut:
    """Reference curve ber = xi(post-detection SNR) on the unit channel.

    ``censored`` marks points where the error budget ran out with zero
    errors; their ``ber`` is the 1/bits upper bound.  ``raw_ber`` (runtime
    only, not saved) holds the pre-smoothing Monte Carlo estimates.
    """

    mcs_id: str
    snr_db: np.ndarray
    ber: np.ndarray
    censored: np.ndarray
    metadata: dict = field(default_factory=dict)
    raw_ber: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        snr = np.asarray(self.snr_db, dtype=float)
        ber = np.asarray(self.ber, dtype=float)
        cen = np.asarray(self.censored, dtype=bool)
        if not (snr.ndim == 1 and snr.shape == ber.shape == cen.shape):
            raise DimensionError("curve columns must be equal-length 1-D")
        if snr.size == 0:
            raise ConfigurationError("empty reference curve")
        if np.any(np.diff(snr) <= 0):
            raise ConfigurationError("snr_db must be strictly increasing")
        if np.any(ber <= 0) or not np.all(np.isfinite(ber)):
            raise ConfigurationError("ber values must be positive")
        if np.any(np.diff(ber) > 0):
            raise ConfigurationError("ber must be non-increasing in snr_db")
        for a in (snr, ber, cen):
            a.setflags(write=False)
        object.__setattr__(self, "snr_db", snr)
        object.__setattr__(self, "ber", ber)
        object.__setattr__(self, "censored", cen)


def _awgn_system(order: int, code_rate: str, n_subcarriers: int):
    """Transmit chain + equivalent channel of the non-fading reference.

    Alamouti over the all-ones channel at equal powers: detection is
    exactly interference-free, so the post-detection SINR per real
    dimension is col_energy / N0 uniformly -- the curve's x axis.
    """
    chain = LinkChain(
        scheme=stcode.ALAMOUTI,
        constellation=modulation.qam_constellation(order),
        codec=convcode.CodecConfig(rate=code_rate),
        n_subcarriers=n_subcarriers,
    )
    fc = channel.unit_realization(n_subcarriers, 2, 2)
    ds = stcode.dispersion_set(stcode.ALAMOUTI)
    g_eq = channel.equivalent_grid(fc, channel.PowerProfile(p_db=(0.0, 0.0)), ds)
    col_energy = float((g_eq[0, :, 0] ** 2).sum())
    return chain, g_eq, col_energy


def generate_awgn_lut(
    order: int,
    code_rate: str,
    snr_grid_db,
    min_errors: int = 100,
    rng: np.random.Generator = None,
    n_subcarriers: int = 128,
    max_bits: int = 2_000_000,
    l_max: int = 1,
) -> AwgnLut:
    """Monte Carlo the reference curve, one point per grid SNR.

    Each point runs full coded packets over the unit channel until
    ``min_errors`` bit errors accumulate or ``max_bits`` info bits have
    been spent; the result is smoothed to non-increasing (weighted by
    bit count).  Error-free points are recorded as censored 1/bits
    upper bounds.
    """
    snr_grid_db = np.asarray(snr_grid_db, dtype=float)
    if snr_grid_db.ndim != 1 or np.any(np.diff(snr_grid_db) <= 0):
        raise ConfigurationError("snr grid must be 1-D strictly increasing")
    if min_errors < 100:
        raise ConfigurationError("min_errors must be at least 100")
    if rng is None:
        rng = np.random.default_rng()
    chain, g_eq, col_energy = _awgn_system(order, code_rate, n_subcarriers)
    opts = detector.ReceiverOptions(l_max=l_max)
    raw = np.empty(snr_grid_db.size)
    bits_used = np.empty(snr_grid_db.size)
    censored = np.zeros(snr_grid_db.size, dtype=bool)
    total_packets = 0
    for i, snr_db in enumerate(snr_grid_db):
        n0 = col_energy / 10.0 ** (snr_db / 10.0)
        noise = channel.NoiseModel(n0=n0)
        errors = 0
        bits = 0
        while errors < min_errors and bits < max_bits:
            info = rng.integers(0, 2, chain.n_info_bits, dtype=np.uint8)
            y = channel.apply_channel(g_eq, chain.transmit_symbols(info), noise, rng)
            res = detector.run_iterations(y, g_eq, n0 / 2.0, chain, opts)
            errors += int((res.info_bits != info).sum())
            bits += chain.n_info_bits
            total_packets += 1
        if errors == 0:
            raw[i] = 1.0 / bits
            censored[i] = True
        else:
            raw[i] = errors / bits
        bits_used[i] = bits
    smooth = 10.0 ** isotonic_non_increasing(np.log10(raw), weights=bits_used)
    eta = efficiency_id(chain.spectral_efficiency)
    meta = {
        "scheme": "alamouti",
        "constellation": str(order),
        "code_rate": code_rate,
        "n_subcarriers": str(n_subcarriers),
        "min_errors": str(min_errors),
        "max_bits": str(max_bits),
        "l_max": str(l_max),
        "packets": str(total_packets),
    }
    return AwgnLut(
        mcs_id=eta,
        snr_db=snr_grid_db,
        ber=smooth,
        censored=censored,
        metadata=meta,
        raw_ber=raw,
    )


def _fmt(x: float) -> str:
    """Shortest decimal that round-trips the float64 bit pattern."""
    return repr(float(x))


def save_lut(lut: AwgnLut, path):
    lines = [f"# mcs_id={lut.mcs_id}"]
    for k in sorted(lut.metadata):
        lines.append(f"# {k}={lut.metadata[k]}")
    lines.append("snr_db,ber,censored")
    for s, b, c in zip(lut.snr_db, lut.ber, lut.censored):
        lines.append(f"{_fmt(s)},{_fmt(b)},{int(c)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_lut(path) -> AwgnLut:
    meta = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value
                continue
            if line.startswith("snr_db"):
                continue
            s, b, c = line.split(",")
            rows.append((float(s), float(b), bool(int(c))))
    if not rows:
        raise ConfigurationError(f"no curve points in {path}")
    mcs_id = meta.pop("mcs_id", "")
    snr, ber, cen = (np.array(col) for col in zip(*rows))
    return AwgnLut(
        mcs_id=mcs_id, snr_db=snr, ber=ber, censored=cen.astype(bool), metadata=meta
    )


def lut_lookup(lut: AwgnLut, sinr_eff_db):
    """BER at the queried effective SINR (dB).

    log10(ber) is interpolated linearly in snr_db between bracketing
    points and clamped to the end values outside the stored range;
    queries landing exactly on a stored point return the stored ber.
    """
    q = np.asarray(sinr_eff_db, dtype=float)
    out = 10.0 ** np.interp(q, lut.snr_db, np.log10(lut.ber))
    idx = np.searchsorted(lut.snr_db, q)
    idx = np.minimum(idx, lut.snr_db.size - 1)
    exact = lut.snr_db[idx] == q
    out = np.where(exact, lut.ber[idx], out)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# calibration


@dataclass(frozen=True)
class CalibrationRecord:
    """One (channel realization, operating point) measurement."""

    realization_id: int
    snr_db: float
    sinr_grid: np.ndarray  # (N, 2Q) linear, per real dimension
    ber_sim: float
    n_bits: int
    n_packets: int = 1

    def __post_init__(self):
        if not (0.0 < self.ber_sim <= 0.5):
            raise ConfigurationError("simulated BER must lie in (0, 0.5]")
        if self.n_bits <= 0:
            raise ConfigurationError("bit count must be positive")
        grid = np.asarray(self.sinr_grid, dtype=float)
        object.__setattr__(self, "sinr_grid", grid)
        grid.setflags(write=False)


@dataclass(frozen=True)
class EesmModel:
    """Calibrated compression parameter for one efficiency class."""

    mcs_id: str
    lam: float
    residual: float  # RMS of log10(ber) mismatch at the optimum
    snr_range_db: tuple
    n_records: int = 0
    ill_conditioned: bool = False
    single_profile: bool = False  # records came from one power profile only

    def __post_init__(self):
        if not (self.lam > 0):
            raise ConfigurationError("lambda must be positive")


def _calibration_objective(lam, records, lut):
    total = 0.0
    for rec in records:
        eff = effective_sinr(rec.sinr_grid, lam)
        pred = lut_lookup(lut, 10.0 * math.log10(eff))
        total += (math.log10(rec.ber_sim) - math.log10(pred)) ** 2
    return total


def calibrate_lambda(records, lut: AwgnLut) -> EesmModel:
    """Least-squares fit of the compression parameter.

    Minimizes the summed squared log10-BER mismatch over the records by
    golden-section search on log(lam) across LAMBDA_SEARCH_RANGE.

    Requires at least 10 records whose simulated BERs span two decades.
    Records with (near-)flat SINR grids make the objective independent
    of lam; the returned model is then flagged ill-conditioned.
    """
    records = list(records)
    if len(records) < 10:
        raise ConfigurationError("calibration needs at least 10 records")
    logs = np.log10([rec.ber_sim for rec in records])
    if logs.max() - logs.min() < 2.0:
        raise ConfigurationError(
            "calibration records must span at least two decades of BER"
        )
    lo, hi = (math.log(v) for v in LAMBDA_SEARCH_RANGE)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = _calibration_objective(math.exp(c), records, lut)
    fd = _calibration_objective(math.exp(d), records, lut)
    probe_spread = abs(fc - fd)
    while b - a > 1e-10:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _calibration_objective(math.exp(c), records, lut)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _calibration_objective(math.exp(d), records, lut)
        probe_spread = max(probe_spread, abs(fc - fd))
    lam = math.exp(0.5 * (a + b))
    best = _calibration_objective(lam, records, lut)
    f_lo = _calibration_objective(LAMBDA_SEARCH_RANGE[0], records, lut)
    f_hi = _calibration_objective(LAMBDA_SEARCH_RANGE[1], records, lut)
    flat_objective = (
        max(f_lo, f_hi, best) - min(f_lo, f_hi, best) <= 1e-12 * max(1.0, best)
        and probe_spread <= 1e-12 * max(1.0, best)
    )
    flat_grids = all(
        np.ptp(pair_mean_sinr(rec.sinr_grid)) <= 1e-9 * rec.sinr_grid.max()
        for rec in records
    )
    snrs = [rec.snr_db for rec in records]
    return EesmModel(
        mcs_id=lut.mcs_id,
        lam=lam,
        residual=math.sqrt(best / len(records)),
        snr_range_db=(min(snrs), max(snrs)),
        n_records=len(records),
        ill_conditioned=bool(flat_objective or flat_grids),
    )


def save_model(model: EesmModel, path):
    lines = [
        f"mcs_id={model.mcs_id}",
        f"lambda={_fmt(model.lam)}",
        f"residual={_fmt(model.residual)}",
        f"snr_range_db={_fmt(model.snr_range_db[0])},{_fmt(model.snr_range_db[1])}",
        f"n_records={model.n_records}",
        f"ill_conditioned={int(model.ill_conditioned)}",
        f"single_profile={int(model.single_profile)}",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> EesmModel:
    kv = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            kv[key.strip()] = value.strip()
    try:
        lo, hi = kv["snr_range_db"].split(",")
        return EesmModel(
            mcs_id=kv["mcs_id"],
            lam=float(kv["lambda"]),
            residual=float(kv["residual"]),
            snr_range_db=(float(lo), float(hi)),
            n_records=int(kv.get("n_records", 0)),
            ill_conditioned=bool(int(kv.get("ill_conditioned", 0))),
            single_profile=bool(int(kv.get("single_profile", 0))),
        )
    except KeyError as missing:
        raise ConfigurationError(f"model file {path} lacks key {missing}") from None


# ---------------------------------------------------------------------------
# prediction


def predict_ber(grid, model: EesmModel, lut: AwgnLut) -> float:
    """Post-decoder BER predicted from one packet's SINR grid."""
    if model.mcs_id != lut.mcs_id:
        raise ConfigurationError(
            f"model is for {model.mcs_id!r} but curve is for {lut.mcs_id!r}"
        )
    eff = effective_sinr(grid, model.lam)
    return float(lut_lookup(lut, 10.0 * math.log10(eff)))
