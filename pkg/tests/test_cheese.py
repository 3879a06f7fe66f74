"""Swiss-cheese construction: geometry, bound certificates, non-compactness."""

import math

import numpy as np
import pytest

import convderiv as cd


def descent_oracle(n):
    """Independent height search: largest 2^-m meeting all three conditions,
    with the per-term condition taken against the conservative minimum of
    the two printed estimate denominators and the exact endpoint distance.
    """
    x = 0.5 - 3.0 * 2.0 ** -(n + 2)
    for m in range(1, 41):
        y = 2.0 ** -m
        r = y * y
        if math.hypot(x, y) + r >= 1.0:
            continue
        if 1.0 / (1.0 - y) ** 2 >= 2.0:
            continue
        inner = 2.0 ** (-2 * (n + 1)) - y * y
        if inner < 0:
            continue
        d1 = math.sqrt(inner) + r
        d2 = math.sqrt(2.0 ** (-2 * (n + 1)) + y * y) - r
        d3 = math.sqrt(2.0 ** (-2 * (n + 2)) + y * y) - r
        den = min(d1, d2, d3)
        if den > 0 and r / den ** 2 < 2.0 ** -(n + 1):
            return y
    return None


def test_first_midpoint_is_one_eighth():
    assert cd.midpoint(1) == 0.125
    lo, hi = cd.landing_interval(1)
    assert (lo, hi) == (0.0, 0.25)


def test_first_height_matches_descent_oracle():
    assert descent_oracle(1) == 2.0 ** -4  # frozen from the oracle
    X = cd.build_cheese(1)
    assert X.disc(1).center == complex(0.125, 0.0625)


def test_all_heights_match_descent_oracle():
    X = cd.build_cheese(12)
    for n in range(1, 13):
        assert X.disc(n).center.imag == descent_oracle(n)


def test_radius_is_height_squared():
    X = cd.build_cheese(12)
    for n in range(1, 13):
        disc = X.disc(n)
        assert disc.radius == disc.center.imag ** 2


def test_geometry_invariants_have_strict_margins():
    X = cd.build_cheese(12)
    assert X.margins.containment > 0
    assert X.margins.disjointness > 0
    assert X.margins.interval_gap > 0


def test_construction_failure_is_reported():
    with pytest.raises(cd.ConstructionFailedError) as err:
        cd.build_cheese(8, precision_floor=6)
    assert err.value.n >= 1


def test_s_dist_examples():
    X = cd.build_cheese(3)
    assert X.s_dist(0.0, 0) == 1.0
    disc = X.disc(2)
    assert X.s_dist(disc.center, 2) == 0.0
    # directly below a centre the distance is height minus radius
    x2, y2 = disc.center.real, disc.center.imag
    assert X.s_dist(x2, 2) == pytest.approx(y2 - y2 ** 2, rel=1e-15)


def test_unit_disc_term_is_at_most_four_on_interval():
    X = cd.build_cheese(4)
    for x in cd.interval_grid(101):
        s0 = X.s_dist(x, 0)
        assert s0 >= 0.5
        assert X.r0 / s0 ** 2 <= 4.0 + 1e-15


def test_landing_term_at_first_centre():
    X = cd.build_cheese(2)
    x1 = X.disc(1).center.real
    y1 = X.disc(1).center.imag
    term = X.disc(1).radius / X.s_dist(x1, 1) ** 2
    assert term == pytest.approx(1.0 / (1.0 - y1) ** 2, rel=1e-12)
    assert term == pytest.approx(256.0 / 225.0, rel=1e-12)  # y1 = 1/16
    assert term < 2.0


def test_bound_sum_errors_on_boundary():
    X = cd.build_cheese(2)
    with pytest.raises(cd.OnBoundaryError):
        X.bound_sum(X.disc(1).center)
    with pytest.raises(cd.OnBoundaryError):
        X.bound_sum(1.0 + 0j)


def test_verification_certifies_bound_below_thirteen_halves():
    X = cd.build_cheese(12)
    verification = cd.verify_cheese(X, grid=1001)
    assert verification.passed
    assert verification.max_certified < 6.5
    assert verification.per_term_margin > -1e-12


def test_per_term_certificates_on_grid():
    X = cd.build_cheese(12)
    xs = cd.interval_grid(2001)
    for n in range(1, 13):
        lo, hi = cd.landing_interval(n)
        outside = (xs < lo) | (xs >= hi)
        disc = X.disc(n)
        s = np.abs(xs[outside] - disc.center) - disc.radius
        assert (disc.radius / s ** 2 < 2.0 ** -(n + 1) + 1e-12).all()


def test_certified_sum_dominates_plain_sum():
    X = cd.build_cheese(8)
    xs = cd.interval_grid(257)
    sums, certified = X.bound_sum_grid(xs)
    assert (certified > sums).all()
    value, cert = X.bound_sum(0.25)
    assert cert == value + 2.0 ** -9


def test_serialisation_round_trip():
    X = cd.build_cheese(6)
    payload = X.to_dict()
    Y = cd.CheeseSet.from_dict(payload)
    assert Y.n_max == 6
    for n in range(1, 7):
        assert Y.disc(n) == X.disc(n)
    with pytest.raises(ValueError):
        cd.CheeseSet.from_dict({"n_max": 2, "discs": payload["discs"]})


# -- probe functions -----------------------------------------------------------

def test_probe_sup_is_one_on_its_circle():
    X = cd.build_cheese(4)
    f1 = cd.pole_probe(X, 1)
    disc = X.disc(1)
    circle = disc.center + disc.radius * np.exp(
        2j * np.pi * np.arange(64) / 64)
    assert np.abs(np.abs(f1(circle)) - 1.0).max() < 1e-12


def test_probe_derivative_unit_at_own_ground_point():
    X = cd.build_cheese(12)
    for n in range(1, 13):
        f = cd.pole_probe(X, n)
        ground = X.disc(n).center.real
        assert abs(f.derivative(ground)) == 1.0


def test_probe_derivative_vanishes_at_fixed_point():
    X = cd.build_cheese(12)
    x = 0.25
    values = [abs(cd.pole_probe(X, n).derivative(x)) for n in range(3, 13)]
    assert values[-1] < 1e-6
    assert values[-1] < values[0]


def test_noncompact_report_unit_diagonal_and_separation():
    X = cd.build_cheese(12)
    report = cd.noncompact_report(X, grid=2001)
    assert report.diag_error <= 1e-12
    assert report.min_separation >= 0.7
    assert report.passed
    # off-diagonal entries obey the per-term dyadic certificates
    for i in range(12):
        for m in range(12):
            if i != m:
                assert report.matrix[i, m] < 2.0 ** -(i + 2)


def test_separation_certificate_floor():
    # |f_j'(x_j)| - |f_i'(x_j)| >= 1 - 2^{-(i+1)} >= 3/4 pins each pair
    X = cd.build_cheese(12)
    report = cd.noncompact_report(X, grid=2001)
    for i in range(12):
        for j in range(12):
            if i < j:
                floor = 1.0 - 2.0 ** -(i + 2)
                assert report.separations[i, j] >= floor - 1e-9


# -- derivative bound check ------------------------------------------------------

def test_bound_check_on_first_probe():
    X = cd.build_cheese(8)
    report = cd.derivative_bound_check(X, cd.pole_probe(X, 1), grid=801)
    assert report.sup_estimate == pytest.approx(1.0, abs=1e-12)
    assert report.ratio <= 6.5
    assert report.passed


def test_bound_check_constant_function():
    X = cd.build_cheese(4)
    f = cd.RationalFunction((), (), constant=3.0)
    report = cd.derivative_bound_check(X, f, grid=201)
    assert report.max_derivative == 0.0
    assert report.ratio == 0.0
    assert report.passed


def test_bound_check_sum_of_probes():
    X = cd.build_cheese(8)
    f = cd.pole_probe(X, 1) + cd.pole_probe(X, 2)
    report = cd.derivative_bound_check(X, f, grid=801)
    assert report.sup_estimate <= 2.0 + 1e-12
    assert report.max_derivative <= 13.0
    assert report.passed


def test_bound_check_rejects_pole_in_region():
    X = cd.build_cheese(4)
    f = cd.RationalFunction((0.25 + 0j,), (1.0,))
    with pytest.raises(cd.PoleInXError):
        cd.derivative_bound_check(X, f, grid=101)


def test_bound_check_allows_pole_outside_disc():
    X = cd.build_cheese(4)
    f = cd.RationalFunction((2.0 + 0j,), (1.0,))
    report = cd.derivative_bound_check(X, f, grid=201)
    assert report.passed
