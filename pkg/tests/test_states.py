import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import approx
from gwqnoise import states
from gwqnoise.states import (
    CoherentSqueezed,
    CoherentVacuum,
    Custom,
    DegenerateSpectrumError,
    Intelligent,
    TruncationError,
    TwinFock,
)
from gwqnoise.su2 import Basis, TwoModeState, build_irrep_matrices, moments_of

FIELDS = ("mean_jx", "mean_jy", "mean_jz", "var_jx", "var_jy", "var_jz", "nbar1", "nbar2")


def assert_moments_close(a, b, rel=1e-7, abs_=1e-9):
    for name in FIELDS:
        assert getattr(a, name) == approx(getattr(b, name), rel=rel, abs=abs_), name


class TestCoherent:
    def test_vacuum_moments_zero(self):
        m = states.coherent_vacuum_moments(0)
        assert m.nbar == 0 and m.var_jx == 0 and m.mean_jz == 0

    def test_nbar_four(self):
        m = states.coherent_vacuum_moments(4)
        assert m.var_jx == 1 and m.var_jy == 1 and m.mean_jz == 2

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            states.coherent_vacuum_moments(-1)

    def test_oracle_alpha_1p5(self):
        oracle = moments_of(states.spec_to_state(CoherentVacuum(1.5)))
        assert_moments_close(oracle, states.coherent_vacuum_moments(2.25), rel=1e-8, abs_=1e-10)

    @pytest.mark.parametrize("phase", [0.0, 0.7, 2.0, -2.5])
    def test_phase_independent(self, phase):
        spec = CoherentVacuum(2.0 * np.exp(1j * phase))
        assert_moments_close(moments_of(states.spec_to_state(spec)), states.coherent_vacuum_moments(4.0))

    def test_vacuum_spec_is_vacuum(self):
        state = states.spec_to_state(CoherentVacuum(0))
        assert abs(state.grid()[0, 0]) == approx(1)

    def test_cutoff_meets_tail(self):
        for a in (0.5, 3.0, 30.0):
            n = states.coherent_cutoff(a)
            assert n >= math.ceil(a * a + 10 * a + 20)
            assert states.coherent_tail(a, n) < 1e-12

    def test_insufficient_cap_reported(self):
        with pytest.raises(TruncationError):
            states.spec_to_state(CoherentVacuum(3.0), n_max=(10, 1))


class TestSqueezed:
    def test_zero_squeezing_is_coherent(self):
        assert_moments_close(states.coherent_squeezed_moments(1.7, 0.0),
                             states.coherent_vacuum_moments(1.7**2), rel=1e-15, abs_=0)

    def test_alpha2_r05(self):
        m = states.coherent_squeezed_moments(2.0, 0.5)
        assert m.var_jy == approx((4 * math.exp(-1) + math.sinh(0.5) ** 2) / 4, rel=1e-15)
        oracle = moments_of(states.spec_to_state(CoherentSqueezed(2.0, 0.5)))
        assert_moments_close(oracle, m, rel=1e-8, abs_=1e-10)

    def test_pure_squeezed_vacuum(self):
        m = states.coherent_squeezed_moments(0.0, 1.0)
        s2 = math.sinh(1.0) ** 2
        assert m.mean_jz == approx(-s2 / 2)
        assert m.nbar == approx(s2)
        assert_moments_close(moments_of(states.spec_to_state(CoherentSqueezed(0.0, 1.0))), m)

    def test_spec_round_trip_alpha1_r03(self):
        spec = CoherentSqueezed(1.0, 0.3, 0.0)
        assert_moments_close(moments_of(states.spec_to_state(spec)),
                             states.coherent_squeezed_moments(1.0, 0.3), rel=1e-8, abs_=1e-10)

    def test_rejects_negative_r(self):
        with pytest.raises(ValueError):
            states.coherent_squeezed_moments(1.0, -0.1)
        with pytest.raises(ValueError):
            CoherentSqueezed(1.0, -0.1)

    def test_xi_stored(self):
        assert CoherentSqueezed(1.0, 0.4, 0.3).xi == approx(0.4 * np.exp(0.3j))

    def test_convention_sign(self):
        # the squeezer exp(xi a^2/2 - c.c.) gives <a^2> = +e^{i theta} sinh r cosh r
        r, theta = 0.6, 0.9
        psi = states.squeezed_state_single(r, theta)
        n = np.arange(psi.size)
        a2 = np.sum(psi[:-2].conj() * np.sqrt(n[2:] * n[1:-1]) * psi[2:])
        assert a2 == approx(np.exp(1j * theta) * math.sinh(r) * math.cosh(r), rel=1e-10)

    def test_cutoff_meets_tail(self):
        for r in (0.1, 0.5, 1.2):
            n = states.squeezed_cutoff(r)
            assert states.squeezed_tail(r, n) < 1e-12

    def test_closed_form_needs_matched_phase(self):
        with pytest.raises(ValueError):
            states.analytic_moments(CoherentSqueezed(1.0, 0.3, 0.5))


class TestTwinFock:
    @pytest.mark.parametrize("n,var", [(0, 0.0), (1, 1.0), (3, 6.0)])
    def test_variances(self, n, var):
        state = states.twin_fock_state(n)
        m = moments_of(state.to_fock())
        assert m.var_jx == approx(var)
        assert m.var_jy == approx(var)
        assert m.mean_jz == approx(0)

    def test_basis_vector(self):
        state = states.spec_to_state(TwinFock(2))
        assert state.basis is Basis.IRREP
        np.testing.assert_array_equal(np.abs(state.amplitudes), [0, 0, 1, 0, 0])

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            TwinFock(-1)


class TestIntelligent:
    def test_spin_half(self):
        sol = states.solve_intelligent_state(0.5, 0.6, 0.5)
        assert sol.eigenvalue == approx(0.4j, abs=1e-12)
        evals = np.linalg.eigvals(states.intelligent_operator(0.5, 0.6))
        assert np.min(np.abs(evals - 0.4j)) < 1e-12

    def test_spin_one_zero_eigenvalue(self):
        sol = states.solve_intelligent_state(1, 0.5, 0)
        assert abs(sol.eigenvalue) < 1e-12
        m = moments_of(sol.state)
        assert math.sqrt(m.var_jx * m.var_jy) == approx(abs(m.mean_jz) / 2, rel=1e-8)

    @pytest.mark.parametrize("eta", [0.05, 0.3, 0.7, 0.95])
    def test_spin_two_variance_law(self, eta):
        m = moments_of(states.solve_intelligent_state(2, eta, 0).state)
        assert 4 * m.var_jx == approx(2 * abs(m.mean_jz / eta), rel=1e-8)

    def test_residual_and_phase(self):
        sol = states.solve_intelligent_state(3.5, 0.4, -1.5)
        assert sol.residual() < 1e-9
        lead = sol.amplitudes[0]
        assert lead.real > 0 and abs(lead.imag) < 1e-15

    @pytest.mark.parametrize("j", [1, 4.5, 10])
    @pytest.mark.parametrize("eta", [0.1, 0.5, 0.9])
    def test_spectrum(self, j, eta):
        m0 = j - np.arange(int(2 * j) + 1)
        np.testing.assert_allclose(states.intelligent_spectrum(j, eta), 1j * m0 * math.sqrt(1 - eta**2),
                                   atol=1e-9)
        for m in m0:
            sol = states.solve_intelligent_state(j, eta, m)
            assert sol.residual() < 1e-9
            assert abs(sol.eigenvalue - 1j * m * math.sqrt(1 - eta**2)) < 1e-9

    def test_dense_eig_agrees_where_well_conditioned(self):
        # a generic non-symmetric solver on the raw tridiagonal matrix
        j, eta = 3, 0.9
        dense = np.linalg.eigvals(states.intelligent_operator(j, eta))
        dense = dense[np.argsort(dense.imag)]
        ours = states.intelligent_spectrum(j, eta)[::-1]
        np.testing.assert_allclose(dense, ours, atol=1e-6)

    @pytest.mark.parametrize("eta", [0.1, 0.5, 0.9])
    def test_squeezing_direction(self, eta):
        for m0 in (2, 1, 0, -2):
            m = moments_of(states.solve_intelligent_state(4, eta, m0).state)
            assert m.var_jy < m.var_jx
            assert math.sqrt(m.var_jy / m.var_jx) == approx(eta, rel=1e-7)

    @pytest.mark.parametrize("j", [0.5, 2, 5.5])
    def test_analytic_matches_oracle(self, j):
        for eta in (0.1, 0.5, 0.9):
            for m0 in j - np.arange(int(2 * j) + 1):
                spec = Intelligent(int(2 * j), eta, int(2 * m0))
                oracle = moments_of(states.spec_to_state(spec).to_fock())
                assert_moments_close(oracle, states.analytic_moments(spec))

    def test_eta_zero_rejected(self):
        with pytest.raises(DegenerateSpectrumError):
            states.solve_intelligent_state(2, 0.0, 0)

    def test_eta_one_nonzero_m0_rejected(self):
        with pytest.raises(DegenerateSpectrumError):
            states.solve_intelligent_state(2, 1.0, 1)

    def test_eta_one_m0_zero(self):
        sol = states.solve_intelligent_state(2, 1.0, 0)
        assert sol.residual() < 1e-12

    def test_tiny_eta_warns(self):
        with pytest.warns(UserWarning):
            states.solve_intelligent_state(1, 1e-4, 0)

    def test_invalid_m0(self):
        with pytest.raises(ValueError):
            Intelligent(4, 0.5, 1)
        with pytest.raises(ValueError):
            Intelligent(4, 0.5, 6)
        with pytest.raises(ValueError):
            Intelligent(4, 1.5, 0)

    def test_limit_variance(self):
        assert states.intelligent_limit_variance(3, 1) == 2 * (9 - 1 + 3)
        # the closed form is the eta -> 0 limit of the solved state
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            m = moments_of(states.solve_intelligent_state(3, 1e-3, 1).state)
        assert 4 * m.var_jx == approx(states.intelligent_limit_variance(3, 1), rel=1e-3)


class TestSpecJson:
    @pytest.mark.parametrize("spec", [
        CoherentVacuum(1.5 - 0.5j),
        CoherentSqueezed(2.0, 0.5, 0.25),
        TwinFock(4),
        Intelligent(5, 0.3, -3),
    ])
    def test_round_trip(self, spec):
        d = json.loads(json.dumps(states.spec_to_json(spec)))
        assert d["family"] == spec.family
        assert states.spec_from_json(d) == spec

    def test_field_names(self):
        d = states.spec_to_json(Intelligent(5, 0.3, -3))
        assert set(d) == {"family", "j2", "eta", "m0x2"}
        d = states.spec_to_json(CoherentSqueezed(2.0, 0.5, 0.25))
        assert set(d) == {"family", "alpha_re", "alpha_im", "r", "theta"}

    def test_custom_round_trip(self):
        state = states.random_irrep_state(3, np.random.default_rng(1))
        back = states.spec_from_json(json.loads(json.dumps(states.spec_to_json(Custom(state)))))
        np.testing.assert_array_equal(back.state.amplitudes, state.amplitudes)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            states.spec_from_json({"family": "thermal"})


def test_universality_random_port_one():
    rng = np.random.Generator(np.random.PCG64(11))
    for _ in range(20):
        psi1 = np.concatenate([states.random_amplitudes(12, rng), [0, 0]])
        m = moments_of(TwoModeState.fock_product(psi1, states.vacuum_single(1)))
        ref = states.coherent_vacuum_moments(m.nbar)
        assert m.var_jx == approx(m.var_jy, rel=1e-12)
        assert m.var_jy == approx(ref.var_jy, rel=1e-12)
        assert m.mean_jz == approx(ref.mean_jz, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(a=st.floats(0.0, 3.0), r=st.floats(0.0, 1.2))
def test_squeezed_oracle_property(a, r):
    oracle = moments_of(states.spec_to_state(CoherentSqueezed(a, r)))
    assert_moments_close(oracle, states.coherent_squeezed_moments(a, r))


def test_irrep_matrices_unchanged_by_solver():
    jx, _, _ = build_irrep_matrices(2)
    before = jx.copy()
    states.solve_intelligent_state(2, 0.5, 1)
    np.testing.assert_array_equal(jx, before)
