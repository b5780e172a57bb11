import numpy as np
import pytest

from mzphase import states


class TestOptimalState:
    def test_three_photon_pair_amplitudes(self):
        s = states.optimal_state(2)
        expect = np.array([0.5, np.sqrt(0.5), 0.5])
        assert np.abs(s.amps - expect).max() < 1e-12
        assert s.basis == states.JY

    @pytest.mark.parametrize("n", [1, 2, 3, 17, 64, 999])
    def test_normalized(self, n):
        s = states.optimal_state(n)
        assert abs(np.linalg.norm(s.amps) - 1.0) < 1e-12

    @pytest.mark.parametrize("n", [2, 5, 40])
    def test_symmetric_about_center(self, n):
        a = states.optimal_state(n).amps.real
        assert np.abs(a - a[::-1]).max() < 1e-12

    def test_amplitudes_real_positive(self):
        a = states.optimal_state(9).amps
        assert np.abs(a.imag).max() == 0.0
        assert a.real.min() > 0.0

    def test_rejects_zero_photons(self):
        with pytest.raises(ValueError):
            states.optimal_state(0)


class TestBasisVectors:
    def test_one_port(self):
        s = states.one_port_state(2)
        assert np.array_equal(s.amps, [0, 0, 1])
        assert s.basis == states.JZ

    def test_equal_split(self):
        s = states.equal_split_state(2)
        assert np.array_equal(s.amps, [0, 1, 0])

    def test_equal_split_rejects_odd(self):
        with pytest.raises(ValueError, match="even"):
            states.equal_split_state(3)

    def test_yurke_superposition(self):
        s = states.yurke_state(4)
        expect = np.zeros(5)
        expect[2] = expect[3] = np.sqrt(0.5)
        assert np.abs(s.amps - expect).max() < 1e-12

    def test_yurke_rejects_odd_and_tiny(self):
        with pytest.raises(ValueError):
            states.yurke_state(3)
        with pytest.raises(ValueError):
            states.yurke_state(1)


class TestTwoModeState:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="normalized"):
            states.TwoModeState(1, states.JZ, np.array([1.0, 1.0]))

    def test_rejects_bad_basis(self):
        with pytest.raises(ValueError):
            states.TwoModeState(1, "jx", np.array([1.0, 0.0]))

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            states.TwoModeState(3, states.JZ, np.array([1.0, 0.0]))

    def test_amps_read_only(self):
        s = states.one_port_state(2)
        with pytest.raises(ValueError):
            s.amps[0] = 1.0

    def test_mu_values(self):
        s = states.one_port_state(3)
        assert np.array_equal(s.mu_values(), [-1.5, -0.5, 0.5, 1.5])


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(0)
        amps = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        amps /= np.linalg.norm(amps)
        s = states.TwoModeState(5, states.JZ, amps)
        again = states.state_from_dict(states.state_to_dict(s))
        assert again.two_j == 5
        assert again.basis == states.JZ
        assert np.abs(again.amps - amps).max() < 1e-15

    def test_malformed_record(self):
        with pytest.raises(ValueError):
            states.state_from_dict({"two_j": 1, "basis": states.JZ})
        with pytest.raises(ValueError):
            states.state_from_dict({"two_j": 1, "basis": states.JZ, "amps": "xx"})
