"""Predicting coded BER without decoding: the full pipeline, desk scale.

The expensive way to get a BER curve is Monte Carlo: push millions of
bits through the chain at every operating point.  The cheap way needs
three ingredients, built here end to end on a small 32-subcarrier link:

1. a reference curve ber = xi(snr) measured once on a non-fading
   channel (the ``lutgen`` step);
2. recorded fading runs -- per-realization SINR grids with their
   simulated BER (the ``simulate`` step);
3. one compression parameter lambda fitted so that the effective SINR
   of each grid, looked up in the reference curve, reproduces the
   recorded BER (the ``calibrate`` step).

After that, predicting a fresh operating point costs one SINR grid and
one table lookup -- no decoding at all.  The script calibrates at equal
transmit powers only, then predicts runs with a -3 dB power split it
has never seen, which is the headline property of the method: lambda
belongs to the modulation-and-coding class, not to the power profile.

Run:  python3 demos/04_ber_prediction.py   (about a minute)
"""

import math

import numpy as np

from mimolink import eesm, sim
from mimolink.config import SimConfig

N_SUB = 32


def main() -> None:
    print(__doc__)

    # 1. reference curve for the eta4 efficiency class, measured with
    #    the transmit-diversity scheme on the unit channel.
    print("[1/3] measuring the non-fading reference curve ...")
    lut = eesm.generate_awgn_lut(
        64, "2/3", np.arange(2.0, 23.0, 2.0), min_errors=100,
        rng=np.random.default_rng(100), n_subcarriers=N_SUB,
        max_bits=120_000, l_max=1,
    )
    shown = ", ".join(
        f"{s:g}dB:{b:.1e}" for s, b in zip(lut.snr_db[::2], lut.ber[::2])
    )
    print(f"      curve ({lut.mcs_id}): {shown}")

    # 2. fading runs at equal transmit powers.
    print("[2/3] recording fading runs (64-QAM 2/3, equal powers) ...")
    cal_cfg = SimConfig(
        scheme="alamouti", constellation=64, code_rate="2/3",
        snr_db=(6.0, 8.0, 10.0, 12.0, 14.0, 16.0), channel="tu6",
        n_subcarriers=N_SUB, seed=5, n_packets=16, l_max=1,
        min_bit_errors=800, max_bits=120_000,
    )
    _, per_point = sim.simulate_sweep(cal_cfg)
    records = [
        eesm.CalibrationRecord(
            realization_id=r.realization_id, snr_db=r.snr_db,
            sinr_grid=r.sinr_grid, ber_sim=r.ber, n_bits=r.bits,
            n_packets=r.packets,
        )
        for realizations in per_point
        for r in realizations
        if r.calibration_eligible
    ]
    bers = [r.ber_sim for r in records]
    print(
        f"      {len(records)} records, BER {min(bers):.1e} .. {max(bers):.1e}"
    )

    # 3. fit the compression parameter.
    print("[3/3] calibrating the compression parameter ...")
    model = eesm.calibrate_lambda(records, lut)
    print(
        f"      lambda = {model.lam:.2f}, "
        f"rms log10 residual = {model.residual:.3f}\n"
    )

    # Predict fresh operating points -- including a transmit-power split
    # the calibration never saw.
    val_cfg = SimConfig(
        scheme="alamouti", constellation=64, code_rate="2/3",
        snr_db=(10.0, 12.0, 14.0), channel="tu6",
        n_subcarriers=N_SUB, seed=4321, n_packets=1, l_max=1,
        min_bit_errors=300, max_bits=80_000,
    )
    for domain, p2 in ((11, 0.0), (12, -3.0)):
        label = "equal powers" if p2 == 0.0 else f"P2 = {p2:g} dB split"
        print(f"fresh runs vs prediction, {label}:")
        print("  SNR    simulated   predicted   |log10 gap|")
        for i, snr_db in enumerate(val_cfg.snr_db):
            summary, reals = sim.run_point(
                val_cfg, snr_db, i, domain=domain, power_db=(0.0, p2)
            )
            weights = np.array([r.bits for r in reals], float)
            weights /= weights.sum()
            preds = [
                eesm.lut_lookup(
                    lut,
                    10.0 * math.log10(eesm.effective_sinr(r.sinr_grid, model.lam)),
                )
                for r in reals
            ]
            pred = float(np.dot(weights, preds))
            gap = abs(math.log10(summary.ber_sim) - math.log10(pred))
            print(
                f"  {snr_db:4.1f}   {summary.ber_sim:.2e}    {pred:.2e}    {gap:.3f}"
            )
        print()

    print(
        "One scalar lambda, fitted at equal powers, lands within a quarter\n"
        "decade of measured BER even under a power split it never saw.\n"
        "The production-scale version of this loop (128 subcarriers, deep\n"
        "error floors, -6 dB splits, and transfer to the full-rate scheme)\n"
        "runs in tests/test_acceptance.py."
    )


if __name__ == "__main__":
    main()
