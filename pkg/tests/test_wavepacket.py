import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morsecontrol import (
    CoefficientSet,
    I2,
    StateGrid,
    WavePacketModel,
    phase_circle_coeffs,
    split_even_odd,
    su2_coefficients,
)
from morsecontrol.errors import DegenerateSplitError, GridError, InvalidParameterError


def test_symmetric_two_level_case():
    cs = su2_coefficients(1.0, 1)
    assert cs.amplitudes == pytest.approx([1 / math.sqrt(2)] * 2, rel=1e-14)


def test_zero_alpha_collapses_to_ground():
    cs = su2_coefficients(0.0, 5)
    expected = np.zeros(6)
    expected[0] = 1.0
    assert np.array_equal(cs.amplitudes, expected)


def test_amplitudes_normalized_and_peaked():
    cs = su2_coefficients(2.0, 23)
    assert np.sum(cs.amplitudes**2) == pytest.approx(1.0, abs=1e-12)
    # brute-force oracle: exact binomial weights over all levels
    pmf = np.array([math.comb(23, m) * 4.0**m / 5.0**23 for m in range(24)])
    assert int(np.argmax(cs.amplitudes**2)) == int(np.argmax(pmf)) == 19
    assert cs.amplitudes**2 == pytest.approx(pmf, rel=1e-10)


def test_negative_alpha_signs():
    cs = su2_coefficients(-2.0, 5)
    assert np.sum(cs.amplitudes**2) == pytest.approx(1.0, abs=1e-12)
    signs = np.sign(cs.amplitudes)
    assert np.array_equal(signs, [1, -1, 1, -1, 1, -1])


def test_split_renormalizes_each_parity():
    cs = split_even_odd(su2_coefficients(2.0, 23))
    assert np.sum(cs.even_amplitudes**2) == pytest.approx(1.0, abs=1e-12)
    assert np.sum(cs.odd_amplitudes**2) == pytest.approx(1.0, abs=1e-12)
    # pre-split parity weights against a direct sum of the binomial weights
    pmf = np.array([math.comb(23, m) * 4.0**m / 5.0**23 for m in range(24)])
    even_weight = float(np.sum(cs.amplitudes[0::2] ** 2))
    assert even_weight == pytest.approx(float(pmf[0::2].sum()), abs=1e-12)


def test_split_two_level_trivial():
    cs = split_even_odd(su2_coefficients(1.0, 1))
    assert cs.even_amplitudes == pytest.approx([1.0])
    assert cs.odd_amplitudes == pytest.approx([1.0])


def test_degenerate_split_rejected():
    with pytest.raises(DegenerateSplitError):
        split_even_odd(su2_coefficients(0.0, 5))


def test_split_requires_normalized_input():
    cs = su2_coefficients(2.0, 5)
    doubled = CoefficientSet(alpha=cs.alpha, n_max=cs.n_max, amplitudes=2.0 * cs.amplitudes)
    with pytest.raises(InvalidParameterError, match="normalized"):
        split_even_odd(doubled)


def test_su2_rejects_degenerate_ladder():
    with pytest.raises(InvalidParameterError):
        su2_coefficients(2.0, 0)


def test_model_rejects_more_levels_than_bound():
    from morsecontrol import MorseParams

    shallow = MorseParams(beta=1.0, mu=8.0, r0=1.0, D=0.5)  # few bound states
    cs = split_even_odd(su2_coefficients(1.0, 100))
    with pytest.raises(InvalidParameterError, match="bound"):
        WavePacketModel(shallow, cs, np.linspace(-0.6, 3.0, 256))


def test_subsidiary_real_at_t0(model):
    for parity in ("even", "odd"):
        state = model.subsidiary(parity, 0.0)
        assert np.abs(state.psi.imag).max() < 1e-14
        assert state.norm() == pytest.approx(1.0, abs=1e-9)


def test_subsidiary_parities_orthogonal(model, times):
    _, t_rev = times
    for t in (0.0, t_rev / 8):
        even = model.subsidiary("even", t)
        odd = model.subsidiary("odd", t)
        overlap = np.trapezoid(np.conj(even.psi) * odd.psi, model.x)
        assert abs(overlap) < 1e-6


def test_single_level_packet_is_stationary(x_grid):
    # one populated level per parity: survival probability is exactly flat
    amps = np.zeros(4)
    amps[2] = 1.0
    cs = CoefficientSet(
        alpha=0.0, n_max=3, amplitudes=amps,
        even_amplitudes=np.array([0.0, 1.0]), odd_amplitudes=np.array([0.0, 1.0]),
    )
    model = WavePacketModel(I2, cs, x_grid)
    base = model.subsidiary("even", 0.0)
    for t in (1e3, 1e5, 3e6):
        evolved = model.subsidiary("even", t)
        survival = abs(np.trapezoid(np.conj(base.psi) * evolved.psi, x_grid))
        assert survival == pytest.approx(1.0, abs=1e-9)


def test_phase_zero_gives_odd_packet(model, times):
    _, t_rev = times
    state = model.phase_locked(0.0, t_rev / 8)
    odd = model.subsidiary("odd", t_rev / 8)
    assert np.abs(state.psi - odd.psi).max() < 1e-12


def test_phase_pi_gives_even_packet(model, times):
    _, t_rev = times
    state = model.phase_locked(math.pi, t_rev / 8)
    even = model.subsidiary("even", t_rev / 8)
    assert np.abs(state.psi - even.psi).max() < 1e-12


def test_phase_reduced_mod_two_pi(model):
    a = model.phase_locked(0.3, 100.0)
    b = model.phase_locked(0.3 + 2.0 * math.pi, 100.0)
    assert b.theta == pytest.approx(0.3, abs=1e-14)
    assert np.abs(a.psi - b.psi).max() < 1e-13


def test_norm_over_phase_time_lattice(model, times):
    _, t_rev = times
    for theta in np.linspace(0.0, 2.0 * math.pi, 5):
        for t in np.linspace(0.0, t_rev, 5):
            assert model.phase_locked(theta, t).norm() == pytest.approx(1.0, abs=1e-6)


def test_density_pairwise_identity(model, times):
    _, t_rev = times
    t = t_rev / 8
    parity_sum = (np.abs(model.subsidiary("even", t).psi) ** 2
                  + np.abs(model.subsidiary("odd", t).psi) ** 2)
    for theta in (0.0, math.pi / 4, math.pi / 2):
        combined = model.density(theta, t) + model.density(theta + math.pi, t)
        assert np.abs(combined - parity_sum).max() < 1e-10


def test_decomposition_sums_to_density(model, times):
    _, t_rev = times
    for theta, t in ((0.3, t_rev / 8), (2.0, t_rev / 16), (5.5, 0.0)):
        even_part, odd_part, cross_part = model.density_decomposition(theta, t)
        assert np.abs(even_part + odd_part + cross_part - model.density(theta, t)).max() < 1e-10


def test_decomposition_coefficients_quarter_turn(model, times):
    _, t_rev = times
    t = t_rev / 8
    even_part, odd_part, cross_part = model.density_decomposition(math.pi / 2, t)
    even = np.abs(model.subsidiary("even", t).psi) ** 2
    odd = np.abs(model.subsidiary("odd", t).psi) ** 2
    assert np.abs(even_part - 0.5 * even).max() < 1e-12
    assert np.abs(odd_part - 0.5 * odd).max() < 1e-12
    assert np.abs(cross_part).max() > 0


def test_cross_part_flips_sign_across_pi(model, times):
    _, t_rev = times
    t = t_rev / 8
    for theta in (0.4, 1.0, 2.5):
        cross = model.density_decomposition(theta, t)[2]
        flipped = model.density_decomposition(theta + math.pi, t)[2]
        assert np.abs(cross + flipped).max() < 1e-12


def test_cross_part_vanishes_at_zero_phase(model, times):
    _, t_rev = times
    cross = model.density_decomposition(0.0, t_rev / 8)[2]
    assert np.abs(cross).max() == 0.0


def test_cross_part_integrates_to_zero(model):
    for theta in np.linspace(0.0, 2.0 * math.pi, 9):
        cross = model.density_decomposition(theta, 0.0)[2]
        assert abs(np.trapezoid(cross, model.x)) < 1e-8


def test_t0_global_phase_structure(model):
    # exp(-i*theta/2)*state(theta, 0) has real part cos(theta/2)*odd packet
    # and imaginary part -sin(theta/2)*even packet, each a real function
    even = model.subsidiary("even", 0.0).psi.real
    odd = model.subsidiary("odd", 0.0).psi.real
    for theta in (0.0, 0.7, math.pi / 2, 2.9, 4.4):
        aligned = model.phase_locked(theta, 0.0).psi * np.exp(-0.5j * theta)
        assert np.abs(aligned.real - math.cos(theta / 2) * odd).max() < 1e-12
        assert np.abs(aligned.imag + math.sin(theta / 2) * even).max() < 1e-12


def test_phase_circle_endpoints():
    assert phase_circle_coeffs(0.0) == pytest.approx((0.0, 1.0, 0.0), abs=1e-15)
    assert phase_circle_coeffs(math.pi) == pytest.approx((1.0, 0.0, 0.0), abs=1e-12)


def test_phase_circle_quarter_values():
    even_c, odd_c, cross_c = phase_circle_coeffs(math.pi / 4)
    assert even_c == pytest.approx(0.1464, abs=1e-4)
    assert odd_c == pytest.approx(0.8536, abs=1e-4)
    assert cross_c == pytest.approx(0.3536, abs=1e-4)


@settings(max_examples=30, deadline=None)
@given(theta=st.floats(-10.0, 10.0), t_frac=st.floats(0.0, 1.0))
def test_norm_is_one_everywhere(model, times, theta, t_frac):
    _, t_rev = times
    state = model.phase_locked(theta, t_frac * t_rev)
    assert state.norm() == pytest.approx(1.0, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(-5.0, 5.0), n_max=st.integers(1, 40))
def test_su2_always_normalized(alpha, n_max):
    cs = su2_coefficients(alpha, n_max)
    assert np.sum(cs.amplitudes**2) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(0.05, 5.0), n_max=st.integers(2, 40))
def test_split_parities_unit_norm(alpha, n_max):
    cs = split_even_odd(su2_coefficients(alpha, n_max))
    assert np.sum(cs.even_amplitudes**2) == pytest.approx(1.0, abs=1e-12)
    assert np.sum(cs.odd_amplitudes**2) == pytest.approx(1.0, abs=1e-12)


def test_state_grid_validation():
    x = np.linspace(0.0, 1.0, 64)
    with pytest.raises(GridError):
        StateGrid(x=x, psi=np.zeros(32, complex), theta=None, t=0.0)
    warped = x**2
    with pytest.raises(GridError):
        StateGrid(x=warped, psi=np.zeros(64, complex), theta=None, t=0.0)


def test_subsidiary_unknown_parity(model):
    with pytest.raises(InvalidParameterError):
        model.subsidiary("mixed", 0.0)
