"""Monte Carlo sweeps, persistence, and the four command entry points.

Seeding: every random stream is an independent child of the master seed
via ``SeedSequence(seed, spawn_key=...)`` keyed by (domain, point,
realization, stage, packet).  The receiver consumes no randomness, so
changing iteration counts or SINR sources never perturbs channel or
noise draws, and reruns are byte-identical.

Per SNR point the sweep draws fresh channel realizations (``n_packets``
coded packets each) until ``min_bit_errors`` errors accumulate or
``max_bits`` information bits are spent; points that exhaust the budget
first are flagged low-confidence.

Files written (all CSV: comma-separated, LF endings, floats at 9
significant digits, config hash on every row):

- ``results.csv``     one row per SNR point (simulated + predicted BER)
- ``records.csv``     one row per calibration-eligible realization
- ``grids.csv``       the SINR grid of each record, long format
- ``comparison.csv``  validate output across power profiles
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass

import numpy as np

from . import channel, detector, eesm, stcode
from .config import SimConfig
from .exceptions import ConfigurationError

__all__ = [
    "PointSummary",
    "RealizationResult",
    "run_point",
    "simulate_sweep",
    "write_results",
    "write_records",
    "load_records",
    "cmd_simulate",
    "cmd_lutgen",
    "cmd_calibrate",
    "cmd_validate",
]

# spawn-key domains keeping simulate and validate streams disjoint
_DOMAIN_SIMULATE = 0
_DOMAIN_VALIDATE = 10

# realizations become calibration records only with this many bit errors;
# fewer make the realization's BER estimate meaningless for curve fitting
MIN_RECORD_ERRORS = 5

_STAGE_CHANNEL = 0
_STAGE_BITS = 1
_STAGE_NOISE = 2


def _fmt(x) -> str:
    return f"{x:.9g}"


def _stream(seed: int, *key) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


@dataclass
class RealizationResult:
    """Per-channel-realization tally plus the packet-mean SINR grid."""

    realization_id: int
    snr_db: float
    bit_errors: int
    bits: int
    packets: int
    sinr_grid: np.ndarray

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits

    @property
    def calibration_eligible(self) -> bool:
        return self.bit_errors >= MIN_RECORD_ERRORS and self.ber <= 0.5


@dataclass
class PointSummary:
    """One SNR point of a sweep."""

    snr_db: float
    bit_errors: int
    bits: int
    packets: int
    low_confidence: bool
    ber_pred: float = None
    sinr_eff_db: float = None

    @property
    def ber_sim(self) -> float:
        return self.bit_errors / self.bits


def run_point(
    cfg: SimConfig, snr_db: float, point_idx: int, domain: int = _DOMAIN_SIMULATE,
    power_db=None,
) -> tuple:
    """Monte Carlo one SNR point; returns (PointSummary, realizations)."""
    chain = cfg.build_chain()
    ds = stcode.dispersion_set(chain.scheme)
    opts = cfg.receiver_options()
    profile = channel.PowerProfile(p_db=tuple(power_db or cfg.power_db))
    n0 = 10.0 ** (-snr_db / 10.0)
    noise = channel.NoiseModel(n0=n0)
    grid_pick = 0 if cfg.sinr_source == "analytic" else -1

    errors = 0
    bits = 0
    packets = 0
    realizations = []
    r = 0
    while errors < cfg.min_bit_errors and bits < cfg.max_bits:
        ch_rng = _stream(cfg.seed, domain, point_idx, r, _STAGE_CHANNEL)
        fc = channel.channel_realization(
            cfg.channel, ch_rng, cfg.n_subcarriers, cfg.bandwidth_hz, 2, 2
        )
        g_eq = channel.equivalent_grid(fc, profile, ds)
        r_errors = 0
        r_bits = 0
        grid_acc = np.zeros((cfg.n_subcarriers, 2 * chain.scheme.q_symbols))
        for k in range(cfg.n_packets):
            bits_rng = _stream(cfg.seed, domain, point_idx, r, _STAGE_BITS, k)
            noise_rng = _stream(cfg.seed, domain, point_idx, r, _STAGE_NOISE, k)
            info = bits_rng.integers(0, 2, chain.n_info_bits, dtype=np.uint8)
            y = channel.apply_channel(
                g_eq, chain.transmit_symbols(info), noise, noise_rng
            )
            res = detector.run_iterations(y, g_eq, n0 / 2.0, chain, opts)
            r_errors += int((res.info_bits != info).sum())
            r_bits += chain.n_info_bits
            grid_acc += res.sinr_grids[grid_pick].values
        realizations.append(
            RealizationResult(
                realization_id=r,
                snr_db=snr_db,
                bit_errors=r_errors,
                bits=r_bits,
                packets=cfg.n_packets,
                sinr_grid=grid_acc / cfg.n_packets,
            )
        )
        errors += r_errors
        bits += r_bits
        packets += cfg.n_packets
        r += 1
    summary = PointSummary(
        snr_db=snr_db,
        bit_errors=errors,
        bits=bits,
        packets=packets,
        low_confidence=errors < cfg.min_bit_errors,
    )
    return summary, realizations


def _attach_predictions(summary, realizations, model, lut):
    """Bit-weighted mean predicted BER and effective SINR over realizations."""
    preds = []
    effs = []
    weights = []
    for real in realizations:
        eff = eesm.effective_sinr(real.sinr_grid, model.lam)
        effs.append(eff)
        preds.append(eesm.lut_lookup(lut, 10.0 * math.log10(eff)))
        weights.append(real.bits)
    w = np.asarray(weights, dtype=float)
    w /= w.sum()
    summary.ber_pred = float(np.dot(w, preds))
    summary.sinr_eff_db = 10.0 * math.log10(float(np.dot(w, effs)))
    return summary


def simulate_sweep(cfg: SimConfig, model=None, lut=None, domain=_DOMAIN_SIMULATE,
                   power_db=None):
    """All SNR points of the sweep; returns (summaries, realizations-per-point)."""
    summaries = []
    per_point = []
    for i, snr_db in enumerate(cfg.snr_db):
        summary, realizations = run_point(
            cfg, snr_db, i, domain=domain, power_db=power_db
        )
        if model is not None and lut is not None:
            _attach_predictions(summary, realizations, model, lut)
        summaries.append(summary)
        per_point.append(realizations)
    return summaries, per_point


# ---------------------------------------------------------------------------
# persistence


def _write_lines(path, lines):
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_results(path, summaries, config_hash: str):
    lines = [
        "snr_db,ber_sim,ber_pred,sinr_eff_db,packets,bit_errors,bits,"
        "low_confidence,config_hash"
    ]
    for s in summaries:
        pred = "" if s.ber_pred is None else _fmt(s.ber_pred)
        eff = "" if s.sinr_eff_db is None else _fmt(s.sinr_eff_db)
        lines.append(
            f"{_fmt(s.snr_db)},{_fmt(s.ber_sim)},{pred},{eff},{s.packets},"
            f"{s.bit_errors},{s.bits},{int(s.low_confidence)},{config_hash}"
        )
    _write_lines(path, lines)


def write_records(records_path, grids_path, per_point, power_db, config_hash: str):
    """Persist calibration-eligible realizations and their SINR grids."""
    rec_lines = [
        "record_id,realization_id,snr_db,ber_sim,bit_errors,bits,packets,"
        "power_db,config_hash"
    ]
    grid_lines = ["record_id,subcarrier,p,sinr"]
    power = ":".join(_fmt(p) for p in power_db)
    record_id = 0
    for realizations in per_point:
        for real in realizations:
            if not real.calibration_eligible:
                continue
            rec_lines.append(
                f"{record_id},{real.realization_id},{_fmt(real.snr_db)},"
                f"{_fmt(real.ber)},{real.bit_errors},{real.bits},{real.packets},"
                f"{power},{config_hash}"
            )
            grid = real.sinr_grid
            for n in range(grid.shape[0]):
                for p in range(grid.shape[1]):
                    grid_lines.append(f"{record_id},{n},{p},{_fmt(grid[n, p])}")
            record_id += 1
    _write_lines(records_path, rec_lines)
    _write_lines(grids_path, grid_lines)


def load_records(records_path, grids_path):
    """Rebuild CalibrationRecords; returns (records, config_hash, profiles)."""
    rows = []
    hashes = set()
    profiles = set()
    with open(records_path) as fh:
        header = fh.readline().strip().split(",")
        idx = {name: i for i, name in enumerate(header)}
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) < len(header):
                continue
            rows.append(parts)
            hashes.add(parts[idx["config_hash"]])
            profiles.add(parts[idx["power_db"]])
    if not rows:
        raise ConfigurationError(f"no calibration records in {records_path}")
    if len(hashes) > 1:
        raise ConfigurationError(
            f"{records_path} mixes records from different configs: {sorted(hashes)}"
        )
    cells = {}
    with open(grids_path) as fh:
        fh.readline()
        for line in fh:
            rid, n, p, v = line.strip().split(",")
            cells.setdefault(int(rid), []).append((int(n), int(p), float(v)))
    records = []
    for parts in rows:
        rid = int(parts[idx["record_id"]])
        if rid not in cells:
            raise ConfigurationError(f"record {rid} has no grid in {grids_path}")
        entries = cells[rid]
        n_max = max(e[0] for e in entries) + 1
        p_max = max(e[1] for e in entries) + 1
        grid = np.empty((n_max, p_max))
        for n, p, v in entries:
            grid[n, p] = v
        records.append(
            eesm.CalibrationRecord(
                realization_id=int(parts[idx["realization_id"]]),
                snr_db=float(parts[idx["snr_db"]]),
                sinr_grid=grid,
                ber_sim=float(parts[idx["ber_sim"]]),
                n_bits=int(parts[idx["bits"]]),
                n_packets=int(parts[idx["packets"]]),
            )
        )
    return records, hashes.pop(), sorted(profiles)


# ---------------------------------------------------------------------------
# command entry points


def _out(cfg, name):
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def cmd_simulate(cfg: SimConfig) -> dict:
    """Sweep, write results/records/grids; returns output paths."""
    model = lut = None
    if cfg.model_file and cfg.lut_file:
        model = eesm.load_model(cfg.model_file)
        lut = eesm.load_lut(cfg.lut_file)
        _check_mode(cfg, lut, model)
    summaries, per_point = simulate_sweep(cfg, model=model, lut=lut)
    paths = {
        "results": _out(cfg, "results.csv"),
        "records": _out(cfg, "records.csv"),
        "grids": _out(cfg, "grids.csv"),
    }
    chash = cfg.config_hash()
    write_results(paths["results"], summaries, chash)
    write_records(paths["records"], paths["grids"], per_point, cfg.power_db, chash)
    return paths


def cmd_lutgen(cfg: SimConfig) -> str:
    """Generate and write the AWGN reference curve for the config's mode.

    The curve is measured with the Alamouti chain (interference-free on
    the unit channel), so the config must name the alamouti realization
    of the target efficiency class; detection runs one iteration.
    """
    if cfg.scheme != "alamouti":
        raise ConfigurationError(
            "reference curves are generated with the alamouti scheme; "
            "use its (constellation, code_rate) row for this efficiency"
        )
    rng = _stream(cfg.seed, 2)  # lutgen domain
    lut = eesm.generate_awgn_lut(
        cfg.constellation,
        cfg.code_rate,
        np.asarray(cfg.snr_db, dtype=float),
        min_errors=cfg.min_bit_errors,
        rng=rng,
        n_subcarriers=cfg.n_subcarriers,
        max_bits=cfg.max_bits,
        l_max=1,
    )
    lut.metadata["config_hash"] = cfg.config_hash()
    path = _out(cfg, f"lut_{lut.mcs_id}.csv")
    eesm.save_lut(lut, path)
    return path


def cmd_calibrate(cfg: SimConfig) -> str:
    """Fit the compression parameter from recorded runs; write the model."""
    if not cfg.lut_file or not cfg.records_file:
        raise ConfigurationError("calibrate needs lut_file and records_file")
    lut = eesm.load_lut(cfg.lut_file)
    grids_path = cfg.records_file.replace("records.csv", "grids.csv")
    records, records_hash, profiles = load_records(cfg.records_file, grids_path)
    if records_hash != cfg.config_hash():
        raise ConfigurationError(
            f"records were produced under config {records_hash}, "
            f"not this config ({cfg.config_hash()})"
        )
    mode = cfg.build_chain().mode_id
    if lut.mcs_id != mode:
        raise ConfigurationError(
            f"curve is for {lut.mcs_id!r} but the config mode is {mode!r}"
        )
    model = eesm.calibrate_lambda(records, lut)
    if len(profiles) == 1:
        model = dataclasses.replace(model, single_profile=True)
    path = _out(cfg, f"model_{model.mcs_id}.txt")
    eesm.save_model(model, path)
    return path


VALIDATE_P2_DB = (0.0, -3.0, -6.0)


def cmd_validate(cfg: SimConfig) -> str:
    """Fresh sweeps across power profiles, compared against predictions."""
    if not cfg.lut_file or not cfg.model_file:
        raise ConfigurationError("validate needs lut_file and model_file")
    lut = eesm.load_lut(cfg.lut_file)
    model = eesm.load_model(cfg.model_file)
    _check_mode(cfg, lut, model)
    chash = cfg.config_hash()
    lines = [
        "snr_db,power_db,ber_sim,ber_pred,sinr_eff_db,bit_errors,bits,"
        "abs_log10_gap,low_confidence,config_hash"
    ]
    for prof_idx, p2 in enumerate(VALIDATE_P2_DB):
        power = (0.0, p2)
        power_str = ":".join(_fmt(p) for p in power)
        for i, snr_db in enumerate(cfg.snr_db):
            summary, realizations = run_point(
                cfg, snr_db, i, domain=_DOMAIN_VALIDATE + prof_idx, power_db=power
            )
            _attach_predictions(summary, realizations, model, lut)
            if summary.bit_errors > 0:
                gap = _fmt(
                    abs(
                        math.log10(summary.ber_sim)
                        - math.log10(summary.ber_pred)
                    )
                )
            else:
                gap = ""
            lines.append(
                f"{_fmt(snr_db)},{power_str},{_fmt(summary.ber_sim)},"
                f"{_fmt(summary.ber_pred)},{_fmt(summary.sinr_eff_db)},"
                f"{summary.bit_errors},{summary.bits},{gap},"
                f"{int(summary.low_confidence)},{chash}"
            )
    path = _out(cfg, "comparison.csv")
    _write_lines(path, lines)
    return path


def _check_mode(cfg, lut, model):
    mode = cfg.build_chain().mode_id
    for artifact, label in ((lut, "curve"), (model, "model")):
        if artifact.mcs_id != mode:
            raise ConfigurationError(
                f"{label} is for {artifact.mcs_id!r} but the config mode is {mode!r}"
            )
