"""Space-time block codes and why orthogonality matters.

Walks through the two supported 2x2 schemes:

- the transmit-diversity scheme (rate R = 1: Q = 2 symbols over T = 2
  slots), whose equivalent real channel has exactly orthogonal columns,
  so linear MMSE detection leaves zero cross-symbol interference;
- the full-rate scheme (R = 2: Q = 4 symbols over T = 2 slots), which
  buys double throughput at the price of coupled symbols that the
  iterative receiver must disentangle.

Run:  python3 demos/01_space_time_codes.py
"""

import numpy as np

from mimolink import channel, detector, stcode


def describe(scheme: stcode.StScheme, fc: channel.FrequencyChannel) -> None:
    ds = stcode.dispersion_set(scheme)
    profile = channel.PowerProfile(p_db=(0.0, 0.0))
    g_eq = channel.equivalent_grid(fc, profile, ds)

    print(f"--- {scheme.name} ---")
    print(
        f"M_T = {scheme.m_t} antennas, T = {scheme.t_slots} slots, "
        f"Q = {scheme.q_symbols} symbols per codeword "
        f"(ST rate R = {scheme.rate})"
    )
    print(f"equivalent channel G_eq per subcarrier: {g_eq.shape[1:]} (real)")

    # The Gram matrix of G_eq's columns tells the whole story: diagonal
    # means symbols do not interfere after matched filtering.
    gram = g_eq[0].T @ g_eq[0]
    off = gram - np.diag(np.diag(gram))
    print("column Gram matrix of subcarrier 0 (rounded):")
    print(np.array_str(np.round(gram, 3), max_line_width=100))
    print(f"largest off-diagonal magnitude: {np.abs(off).max():.3e}")

    # Same message through the receiver's own first-iteration analysis.
    sinr, decomp = detector.sinr_analytic(g_eq, sigma2=0.05)
    print(
        f"first-iteration analysis over {g_eq.shape[0]} subcarriers: "
        f"max cross-symbol interference power {decomp.i1_power.max():.3e}, "
        f"median per-symbol SINR {10 * np.log10(np.median(sinr)):.2f} dB"
    )
    print()


def main() -> None:
    rng = np.random.default_rng(1)
    fc = channel.tu6_realization(rng, n_subcarriers=64, bandwidth_hz=7.61e6)

    print(__doc__)
    describe(stcode.ALAMOUTI, fc)
    describe(stcode.GOLDEN, fc)

    print(
        "Takeaway: the transmit-diversity scheme's interference is zero to\n"
        "machine precision on every subcarrier, so one linear detection\n"
        "pass is optimal and extra receiver iterations change nothing.\n"
        "The full-rate scheme couples its symbols; its first-pass SINR is\n"
        "interference-limited, which is exactly what the iterative\n"
        "receiver (demo 03) repairs."
    )


if __name__ == "__main__":
    main()
