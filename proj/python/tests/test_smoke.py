import math

import pytest

import atomfringe as af


def test_far_field_visibility_is_concurrence():
    st = af.TwoQubitBlochState(0.6, 1.0, 0.7)
    assert abs(af.visibility_two(st, 1e4) - 0.6 * math.sin(1.0)) < 1e-3
    assert af.concurrence_bloch(st) == pytest.approx(0.6 * math.sin(1.0))


def test_s0_deviation_curve():
    for u in (0.5, 2.0, 7.0):
        dev, _, _ = af.deviation_max(0.0, u)
        assert abs(dev - af.deviation_s0_analytic(u)) < 1e-6


def test_three_atom_visibility_and_bounds():
    w = af.WLikeState(0.7, 0.55, 0.45)
    v = af.visibility_three(w)
    assert abs(v - af.visibility_three_bruteforce(w, 256)) < 1e-6
    for m in (af.Measure.mixedness, af.Measure.geometric, af.Measure.negativity_max, af.Measure.three_pi):
        assert af.bounds_for(m, v).contains(af.measure_value(m, w))
    lim = af.left_limit_at_unit_visibility(af.Measure.three_pi)
    assert lim.upper == pytest.approx(2 / 27 * (4 * math.sqrt(5) + math.sqrt(17) - 9), abs=1e-12)


def test_tomography_round_trips():
    st = af.TwoQubitBlochState(0.8, 2.0, 4.0)
    rows = [(2 * math.pi * k / 8, 0.0, u, af.emission_spectrum_two(st, u, 0.0, 2 * math.pi * k / 8))
            for u in (1.0, math.pi) for k in range(8)]
    rec, _, _ = af.tomography_two(rows)
    assert rec.s == pytest.approx(0.8, abs=1e-9)
    with pytest.raises(af.IllPosed):
        af.tomography_two([r for r in rows if r[2] == 1.0])

    w = af.WLikeState(0.7, 0.55, 0.45, 1.0, -0.4)
    samples = [(a, b, af.farfield_intensity(w, a, b)) for a, b in af.default_torus_design()]
    c, phi2, phi3, _ = af.tomography_three(samples)
    assert c == pytest.approx(list(w.c), abs=1e-8)
    assert math.remainder(phi2 - 1.0, 2 * math.pi) == pytest.approx(0.0, abs=1e-8)
    assert math.remainder(phi3 + 0.4, 2 * math.pi) == pytest.approx(0.0, abs=1e-8)


def test_monte_carlo_visibility():
    st = af.TwoQubitBlochState(0.6, 1.0, 0.7)
    u = 4 * math.pi
    r = af.simulate_fringe_two(st, u, 200000, 5)
    exact = af.visibility_two(st, u, 0.0, af.VisibilityMode.physical)
    assert sum(r["counts"]) == 200000
    assert abs(r["visibility"] - exact) < 4 * r["sigma"]


def test_invalid_state_raises():
    with pytest.raises(af.InvalidState):
        af.TwoQubitBlochState(1.5, 0.0, 0.0)
    with pytest.raises(af.DomainError):
        af.eigenmodes_two(-1.0)
