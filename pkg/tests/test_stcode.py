import numpy as np
import pytest
from numpy.testing import assert_allclose

from mimolink import stcode
from mimolink.exceptions import ConfigurationError, DimensionError


class TestSchemes:
    def test_scheme_lookup(self):
        assert stcode.scheme_by_name("alamouti") is stcode.ALAMOUTI
        assert stcode.scheme_by_name("Golden") is stcode.GOLDEN

    def test_unknown_scheme_rejected(self):
        with pytest.raises(ConfigurationError):
            stcode.scheme_by_name("vblast")

    def test_rates(self):
        assert stcode.ALAMOUTI.rate == 1
        assert stcode.GOLDEN.rate == 2


class TestRealStacking:
    def test_round_trip(self):
        rng = np.random.default_rng(7)
        z = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        assert_allclose(stcode.from_real_stack(stcode.to_real_stack(z)), z)

    def test_ordering(self):
        z = np.array([1 + 2j, 3 - 4j])
        assert_allclose(stcode.to_real_stack(z), [1, 2, 3, -4])

    def test_matrix_stack_row_major(self):
        m = np.array([[1 + 2j, 3 + 4j], [5 + 6j, 7 + 8j]])
        assert_allclose(stcode.stack_matrix(m), [1, 2, 3, 4, 5, 6, 7, 8])
        assert_allclose(stcode.unstack_matrix(stcode.stack_matrix(m), 2), m)

    def test_odd_length_rejected(self):
        with pytest.raises(DimensionError):
            stcode.from_real_stack(np.zeros(3))


class TestAlamouti:
    def test_codeword_matches_direct_construction(self):
        # stack-based encoder against the textbook column layout
        ds = stcode.dispersion_set(stcode.ALAMOUTI)
        rng = np.random.default_rng(1)
        for _ in range(20):
            s = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            x = stcode.st_encode(s, ds)
            ref = np.array(
                [[s[0], -np.conj(s[1])], [s[1], np.conj(s[0])]]
            ) / np.sqrt(2)
            assert_allclose(x, ref, atol=1e-15)

    def test_f_entries(self):
        f = stcode.build_f(stcode.dispersion_set(stcode.ALAMOUTI))
        assert f.shape == (8, 4)
        vals = np.unique(np.round(np.abs(f), 12))
        assert_allclose(vals, [0.0, 1 / np.sqrt(2)])

    def test_zero_input(self):
        ds = stcode.dispersion_set(stcode.ALAMOUTI)
        assert_allclose(stcode.st_encode(np.zeros(2, complex), ds), np.zeros((2, 2)))


class TestGolden:
    def test_codeword_matches_direct_construction(self):
        ds = stcode.dispersion_set(stcode.GOLDEN)
        theta = (1 + np.sqrt(5)) / 2
        thetab = 1 - theta
        alpha = 1 + 1j * thetab
        alphab = 1 + 1j * theta
        rng = np.random.default_rng(2)
        for _ in range(20):
            s = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            x = stcode.st_encode(s, ds)
            ref = np.array(
                [
                    [alpha * (s[0] + s[1] * theta), alpha * (s[2] + s[3] * theta)],
                    [
                        1j * alphab * (s[2] + s[3] * thetab),
                        alphab * (s[0] + s[1] * thetab),
                    ],
                ]
            ) / np.sqrt(10)
            assert_allclose(x, ref, atol=1e-14)

    def test_f_is_invertible(self):
        # four complex symbols <-> eight reals, bijectively
        f = stcode.build_f(stcode.dispersion_set(stcode.GOLDEN))
        assert f.shape == (8, 8)
        assert np.linalg.matrix_rank(f) == 8


@pytest.mark.parametrize("scheme", [stcode.ALAMOUTI, stcode.GOLDEN])
class TestDispersionInvariants:
    def test_f_path_equals_encode_path(self, scheme):
        ds = stcode.dispersion_set(scheme)
        f = stcode.build_f(ds)
        rng = np.random.default_rng(3)
        for _ in range(50):
            s = rng.standard_normal(scheme.q_symbols) + 1j * rng.standard_normal(
                scheme.q_symbols
            )
            assert_allclose(
                f @ stcode.to_real_stack(s),
                stcode.stack_matrix(stcode.st_encode(s, ds)),
                atol=1e-13,
            )

    def test_encode_is_real_linear(self, scheme):
        ds = stcode.dispersion_set(scheme)
        rng = np.random.default_rng(4)
        q = scheme.q_symbols
        for _ in range(20):
            a = rng.standard_normal(q) + 1j * rng.standard_normal(q)
            b = rng.standard_normal(q) + 1j * rng.standard_normal(q)
            lam = rng.standard_normal()
            assert_allclose(
                stcode.st_encode(a + lam * b, ds),
                stcode.st_encode(a, ds) + lam * stcode.st_encode(b, ds),
                atol=1e-13,
            )

    def test_mean_energy_per_antenna_slot(self, scheme):
        # unit-energy symbols must radiate 1/M_T per antenna per slot
        ds = stcode.dispersion_set(scheme)
        rng = np.random.default_rng(5)
        n = 100000
        s = (
            rng.standard_normal((n, scheme.q_symbols))
            + 1j * rng.standard_normal((n, scheme.q_symbols))
        ) / np.sqrt(2)
        x = np.einsum("nq,qmt->nmt", s.real, ds.u) + 1j * np.einsum(
            "nq,qmt->nmt", s.imag, ds.v
        )
        energy = (np.abs(x) ** 2).mean(axis=0)
        assert_allclose(energy, np.full((2, 2), 0.5), rtol=0.02)

    def test_matrices_read_only(self, scheme):
        ds = stcode.dispersion_set(scheme)
        with pytest.raises(ValueError):
            ds.u[0, 0, 0] = 1.0

    def test_wrong_symbol_count_rejected(self, scheme):
        ds = stcode.dispersion_set(scheme)
        with pytest.raises(DimensionError):
            stcode.st_encode(np.zeros(scheme.q_symbols + 1, complex), ds)
