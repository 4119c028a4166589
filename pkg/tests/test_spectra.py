import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mumkit.exceptions import InfeasibleCompletionError, InfeasibleParametersError, InvalidDimensionError
from mumkit.spectra import (
    Spectrum,
    circular_correlation,
    complete_pair,
    independent_param_count,
    insert_pair,
    purity_of,
    sample_feasible_phases,
    shift_phases,
    spectrum_d3,
    synthesize_spectrum,
    validate_spectrum,
)


def test_d3_mub_endpoint():
    s = synthesize_spectrum(3, 1.0, [0.0])
    np.testing.assert_allclose(s.mu, [2 / 3, -1 / 3, -1 / 3], atol=1e-15)
    np.testing.assert_allclose(spectrum_d3(1.0, 0.0).mu, [2 / 3, -1 / 3, -1 / 3], atol=1e-15)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6, 7, 8])
def test_mub_endpoint_all_d(d):
    s = synthesize_spectrum(d, 1.0, [0.0] * independent_param_count(d))
    expected = np.full(d, -1.0 / d)
    expected[0] = (d - 1.0) / d
    np.testing.assert_allclose(s.mu, expected, atol=1e-14)


@pytest.mark.parametrize("d", [2, 5, 8])
def test_maximally_mixed_endpoint(d):
    phases = np.linspace(0.3, 2.0, independent_param_count(d))
    s = synthesize_spectrum(d, 1.0 / d, phases)
    np.testing.assert_array_equal(s.mu, np.zeros(d))
    assert validate_spectrum(s).passed


def test_d4_example_point_is_infeasible():
    # kappa = 0.5, phase pi/7 puts mu[1] below -1/4 for the + sign and mu[2] for the - sign
    with pytest.raises(InfeasibleParametersError) as info:
        synthesize_spectrum(4, 0.5, [np.pi / 7], even_sign=1)
    assert info.value.index == 1
    assert info.value.value == pytest.approx(-0.269589, abs=1e-6)
    with pytest.raises(InfeasibleParametersError) as info:
        synthesize_spectrum(4, 0.5, [np.pi / 7], even_sign=-1)
    assert info.value.index == 2


def test_d4_feasible_point_passes_all_checks():
    s = synthesize_spectrum(4, 0.4, [np.pi / 7], even_sign=1)
    report = validate_spectrum(s)
    assert report.passed
    assert abs(s.mu.sum()) < 1e-12
    assert sorted(report.cross_residuals) == [1, 2]


def test_d3_closed_form_outside_bound():
    # kappa = 2/3, phi = pi/5: the equalities hold but one entry is below -1/3
    amp = np.sqrt(2 / 3) * np.sqrt(1 / 3)
    raw = amp * np.cos(np.pi / 5 + np.array([0.0, 2 * np.pi / 3, -2 * np.pi / 3]))
    report = validate_spectrum(Spectrum(3, 2 / 3, raw))
    assert report.sum_residual < 1e-15 and report.square_residual < 1e-15
    assert report.max_cross_residual < 1e-15
    assert report.bound_violation == pytest.approx(raw[1] * -1 - 1 / 3)
    with pytest.raises(InfeasibleParametersError) as info:
        spectrum_d3(2 / 3, np.pi / 5)
    assert info.value.index == 1


@pytest.mark.parametrize("phi", [0.0, 0.2, 2 * np.pi / 3 + 0.1, 2 * np.pi - 0.2])
def test_d3_closed_form_matches_synthesis(phi):
    # the d = 3 closed form and the Fourier construction share the same labelling
    kappa = 2 / 3
    a = spectrum_d3(kappa, phi)
    b = synthesize_spectrum(3, kappa, [phi])
    np.testing.assert_allclose(a.mu, b.mu, atol=1e-14)
    assert validate_spectrum(a).passed
    amp = np.sqrt(2 / 3) * np.sqrt(kappa - 1 / 3)
    assert a.mu[0] == pytest.approx(amp * np.cos(phi), abs=1e-15)


def test_d3_degenerate_purity():
    np.testing.assert_allclose(spectrum_d3(1 / 3, 1.234).mu, 0, atol=1e-16)


def test_infeasible_reports_entry():
    # at kappa = 1 only the cyclic shifts are feasible
    with pytest.raises(InfeasibleParametersError) as info:
        synthesize_spectrum(3, 1.0, [0.5])
    err = info.value
    assert err.value < -1 / 3
    assert err.index in (0, 1, 2)
    with pytest.raises(InfeasibleParametersError):
        spectrum_d3(1.0, 0.5)


def test_bad_arguments():
    with pytest.raises(InvalidDimensionError):
        synthesize_spectrum(1, 1.0)
    with pytest.raises(ValueError):
        synthesize_spectrum(5, 0.5, [0.1])
    with pytest.raises(InfeasibleParametersError):
        synthesize_spectrum(3, 1.5, [0.0])
    with pytest.raises(ValueError):
        synthesize_spectrum(4, 0.5, [0.0], even_sign=0)


def test_validate_detects_bad_cross_correlation():
    report = validate_spectrum(Spectrum(3, 1.0, [0.5, -0.5, 0.0]))
    assert not report.passed
    assert report.cross_residuals[1] == pytest.approx(1 / 12)
    assert report.sum_residual == 0


def test_validate_zero_vector():
    report = validate_spectrum(Spectrum(4, 0.25, np.zeros(4)))
    assert report.passed
    assert report.max_cross_residual == 0 and report.square_residual == 0


@pytest.mark.parametrize("d,count", [(2, 0), (3, 1), (4, 1), (5, 2), (6, 2), (7, 3), (8, 3)])
def test_param_count(d, count):
    assert independent_param_count(d) == count


def test_param_count_rejects_small_d():
    with pytest.raises(InvalidDimensionError):
        independent_param_count(1)


def test_purity_of():
    assert purity_of(np.zeros(4)) == pytest.approx(0.25)
    assert purity_of([2 / 3, -1 / 3, -1 / 3]) == pytest.approx(1.0)


def test_purity_round_trip(rng):
    phases, sign = sample_feasible_phases(5, 0.55, rng)
    s = synthesize_spectrum(5, 0.55, phases, sign)
    assert purity_of(s.mu) == pytest.approx(0.55, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(2, 8),
    st.floats(0.0, 1.0),
    st.lists(st.floats(0.0, 2 * np.pi, exclude_max=True), min_size=3, max_size=3),
    st.sampled_from([1, -1]),
)
def test_synthesis_passes_validation(d, t, raw_phases, sign):
    kappa = 1.0 / d + t * (1.0 - 1.0 / d)
    phases = raw_phases[: independent_param_count(d)]
    try:
        s = synthesize_spectrum(d, kappa, phases, sign)
    except InfeasibleParametersError:
        assume(False)
    assert validate_spectrum(s).passed
    for k in range(1, d):
        assert circular_correlation(s.mu, k) == pytest.approx(-(kappa - 1 / d) / (d - 1), abs=1e-10)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6, 7, 8])
def test_sampler_is_feasible_near_pure(d):
    rng = np.random.default_rng(d)
    for kappa in (0.95, 1.0):
        phases, sign = sample_feasible_phases(d, kappa, rng, uniform_tries=20)
        assert validate_spectrum(synthesize_spectrum(d, kappa, phases, sign)).passed


@pytest.mark.parametrize("d", [3, 4, 5, 7])
def test_shift_phases_move_the_peak(d):
    for shift in range(d):
        phases, sign = shift_phases(d, shift)
        mu = synthesize_spectrum(d, 1.0, phases, sign).mu
        assert int(np.argmax(mu)) == shift
        assert mu[shift] == pytest.approx((d - 1) / d)


def test_complete_pair_examples():
    np.testing.assert_allclose(complete_pair([2 / 3], 1.0), (-1 / 3, -1 / 3), atol=1e-7)
    np.testing.assert_allclose(complete_pair([], 1.0), (0.5, -0.5), atol=1e-15)


def test_complete_pair_residuals():
    pair = complete_pair([0.1, -0.2], 0.6, positions=(1, 3))
    mu = insert_pair([0.1, -0.2], pair, (1, 3))
    assert mu[1] == pair[0] and mu[3] == pair[1]
    assert abs(mu.sum()) < 1e-12
    assert abs(mu @ mu - (0.6 - 0.25)) < 1e-12


def test_complete_pair_recovers_dropped_entries(rng):
    phases, sign = sample_feasible_phases(6, 0.6, rng)
    mu = synthesize_spectrum(6, 0.6, phases, sign).mu
    p, m = (int(np.argmax(mu)), int(np.argmin(mu)))
    rest = np.delete(mu, sorted((p, m)))
    got = complete_pair(rest, 0.6)
    np.testing.assert_allclose(got, (mu[p], mu[m]), atol=1e-10)
    np.testing.assert_allclose(insert_pair(rest, got, (p, m)), mu, atol=1e-10)


def test_complete_pair_infeasible():
    with pytest.raises(InfeasibleCompletionError) as info:
        complete_pair([0.9, 0.9], 0.5)
    assert info.value.discriminant < 0


def test_insert_pair_rejects_bad_positions():
    with pytest.raises(ValueError):
        insert_pair([0.1], (0.2, -0.3), (1, 1))
    with pytest.raises(ValueError):
        complete_pair([0.1], 0.6, positions=(0, 3))


def test_json_round_trip():
    s = synthesize_spectrum(4, 0.4, [np.pi / 7])
    obj = s.to_json()
    assert list(obj) == ["d", "kappa", "mu"]
    back = Spectrum.from_json(obj)
    np.testing.assert_array_equal(back.mu, s.mu)
    assert back.kappa == s.kappa


def test_shifted_is_element_diagonal():
    s = synthesize_spectrum(5, 0.5, [0.1, 0.2])
    np.testing.assert_array_equal(s.shifted(2), [s.mu[(2 + j) % 5] for j in range(5)])


@pytest.mark.parametrize("kappa,phi", [(0.6, 0.1), (0.45, 2.2)])
def test_d3_pair_formula(kappa, phi):
    mu = spectrum_d3(kappa, phi).mu
    root = np.sqrt(2 * kappa - 2 / 3 - 3 * mu[0] ** 2)
    pair = sorted(complete_pair([mu[0]], kappa))
    np.testing.assert_allclose(pair, sorted([(-mu[0] + root) / 2, (-mu[0] - root) / 2]), atol=1e-14)
    np.testing.assert_allclose(pair, sorted(mu[1:]), atol=1e-12)
