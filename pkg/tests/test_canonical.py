import math

import numpy as np
import pytest

from mzphase import canonical, states, su2
from mzphase.circular import (
    TWO_PI,
    evaluate,
    holevo_variance,
    holevo_variance_mod_pi,
    moment,
    validate_distribution,
)


def loglog_slope(rows) -> float:
    ns = np.log([n for n, _ in rows])
    vs = np.log([v for _, v in rows])
    return float(np.polyfit(ns, vs, 1)[0])


class TestCanonicalDistribution:
    def test_single_eigenstate_is_uniform(self):
        amps = np.zeros(9, dtype=complex)
        amps[2] = 1.0
        f = canonical.canonical_distribution(states.TwoModeState(8, states.JY, amps))
        assert abs(f.coeff(0) - 1.0 / TWO_PI) < 1e-15
        others = np.delete(np.abs(f.coeffs), 8)
        assert others.max() < 1e-15

    @pytest.mark.parametrize("n", [1, 2, 3, 10, 41, 100, 200])
    def test_optimal_state_variance_is_analytic_minimum(self, n):
        f = canonical.canonical_distribution(states.optimal_state(n))
        assert abs(holevo_variance(f) - canonical.min_holevo_variance(n)) < 1e-10

    def test_normalized_and_nonnegative(self):
        for state in (states.optimal_state(12), states.one_port_state(7),
                      states.equal_split_state(8), states.yurke_state(6)):
            f = canonical.canonical_distribution(state)
            validate_distribution(f)

    def test_invariant_under_global_phase(self):
        base = states.optimal_state(6)
        rotated = states.TwoModeState(6, states.JY, np.exp(0.7j) * base.amps)
        fa = canonical.canonical_distribution(base)
        fb = canonical.canonical_distribution(rotated)
        assert np.abs(fa.coeffs - fb.coeffs).max() < 1e-14

    def test_accepts_jz_basis_input(self):
        f = canonical.canonical_distribution(states.one_port_state(10))
        v = holevo_variance(f)
        (_, v_sweep), = canonical.canonical_sweep("one-port", [10], "holevo")
        assert v == pytest.approx(v_sweep, rel=1e-12)


class TestMinimumVariance:
    def test_single_photon(self):
        assert canonical.min_holevo_variance(1) == pytest.approx(3.0, abs=1e-12)

    def test_two_photons(self):
        assert canonical.min_holevo_variance(2) == pytest.approx(1.0, abs=1e-12)

    def test_large_photon_asymptotics(self):
        for n in (500, 2000, 8000):
            lead = math.pi ** 2 / (n + 2) ** 2
            assert canonical.min_holevo_variance(n) == pytest.approx(lead, rel=30.0 / n ** 2)


class TestSweep:
    def test_optimal_curve_equals_analytic(self):
        rows = canonical.canonical_sweep("optimal", range(1, 201), "holevo")
        for n, v in rows:
            assert abs(v - canonical.min_holevo_variance(n)) < 1e-12

    def test_moment_path_matches_distribution_path(self):
        for kind, n in (("one-port", 24), ("equal", 24), ("yurke", 24), ("optimal", 25)):
            state = canonical.make_state(kind, n)
            f = canonical.canonical_distribution(state)
            m1 = canonical.canonical_moment(kind, n, 1)
            m2 = canonical.canonical_moment(kind, n, 2)
            assert m1 == pytest.approx(abs(moment(f, 1)), abs=1e-12)
            assert m2 == pytest.approx(abs(moment(f, 2)), abs=1e-12)

    def test_one_port_scaling(self):
        rows = canonical.canonical_sweep("one-port", [64 * 2 ** k for k in range(5)], "holevo")
        assert -1.15 < loglog_slope(rows) < -0.85

    def test_equal_split_mod_pi_scaling(self):
        rows = canonical.canonical_sweep("equal", [400 * 2 ** k for k in range(4)], "modpi")
        assert -0.6 < loglog_slope(rows) < -0.4

    def test_yurke_worse_than_equal_split(self):
        for n in (8, 32, 128):
            (_, v_yurke), = canonical.canonical_sweep("yurke", [n], "modpi")
            (_, v_equal), = canonical.canonical_sweep("equal", [n], "modpi")
            assert v_yurke > v_equal

    def test_optimal_state_beats_all_alternatives(self):
        # each alternative is compared on its own curve: first-moment
        # dispersion where it is finite, mod-pi for the pi-periodic
        # equal-split input
        for n in (4, 8, 16, 32, 64, 128):
            (_, v_opt), = canonical.canonical_sweep("optimal", [n], "holevo")
            (_, v_one), = canonical.canonical_sweep("one-port", [n], "holevo")
            (_, v_yur), = canonical.canonical_sweep("yurke", [n], "holevo")
            (_, v_eq_pi), = canonical.canonical_sweep("equal", [n], "modpi")
            assert v_opt < v_one
            assert v_opt < v_yur
            assert v_opt < v_eq_pi

    def test_unknown_kind_and_measure(self):
        with pytest.raises(ValueError):
            canonical.canonical_sweep("bogus", [2], "holevo")
        with pytest.raises(ValueError):
            canonical.canonical_sweep("optimal", [2], "bogus")
        with pytest.raises(ValueError):
            canonical.canonical_moment("optimal", 2, 0)


class TestTailDominance:
    def test_equal_split_variance_lives_in_the_tails(self):
        n = 80
        f = canonical.canonical_distribution(states.equal_split_state(n))
        grid = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
        weighted = evaluate(f, grid).real * np.sin(grid) ** 2
        total_grid = float(np.sum(weighted) * TWO_PI / grid.size)
        # moment identity: integral sin^2 P = 1/2 - Re<e^{2i phi}>/2
        total_moment = 0.5 - 0.5 * moment(f, 2).real
        assert abs(total_grid - total_moment) < 1e-6
        # windows of width 4 pi / N around the pi-periodic peaks
        w = 4.0 * math.pi / n
        dist_to_peak = np.minimum(np.abs(grid % math.pi), math.pi - np.abs(grid % math.pi))
        central = float(np.sum(weighted[dist_to_peak < w]) * TWO_PI / grid.size)
        assert central < 0.5 * total_grid
