"""Oscillation conditions, maximal-r solvers, and configuration classification."""

import math

import numpy as np
import pytest

from conftest import ramp
from oscillab.conditions import (
    CLASS_ORDER,
    Classification,
    InfeasibleShiftError,
    balanced_condition,
    bounds_row,
    classify,
    max_r_balanced,
    max_r_nonneg,
    max_r_stable,
    nonneg_condition,
)
from oscillab.lattice import analytic_eigenvalues, dst
from oscillab.schemes import (
    Discretization,
    amplification_array,
    backward_euler,
    crank_nicolson,
    forward_euler,
    scheme_spectrum,
    taylor,
)

FE = forward_euler()
CN = crank_nicolson()
BE = backward_euler()

# Reference maximal-r values for the heat equation (closed forms where exact).
REFERENCE_BOUNDS = [
    (FE, 0.25, 0.5),
    (taylor(3), 0.39902, 0.62819),
    (taylor(5), 0.54515, 0.80426),
    (CN, 0.5, 1.0),
]


def _spectrum_with(scheme, disc, coeffs):
    return scheme_spectrum(scheme, disc).with_modal_coeffs(np.asarray(coeffs, dtype=float))


def test_max_r_nonneg_reference_values():
    for scheme, nn, _ in REFERENCE_BOUNDS:
        assert max_r_nonneg(scheme) == pytest.approx(nn, abs=1e-4)
    assert max_r_nonneg(FE) == pytest.approx(0.25, abs=1e-12)


def test_max_r_balanced_reference_values():
    for scheme, _, bal in REFERENCE_BOUNDS:
        assert max_r_balanced(scheme) == pytest.approx(bal, abs=1e-4)


def test_unbounded_schemes():
    assert max_r_nonneg(BE) == math.inf
    assert max_r_balanced(BE) == math.inf
    assert max_r_stable(BE) == math.inf
    assert max_r_stable(CN) == math.inf
    assert max_r_nonneg(taylor(2)) == math.inf  # even orders stay positive


def test_shifted_closed_forms():
    for sigma in (0.0, 0.1, 0.2, 0.5):
        assert max_r_nonneg(FE, sigma) == pytest.approx(0.25 - sigma / 4.0, abs=1e-6)
        assert max_r_balanced(FE, sigma) == pytest.approx(0.5 - sigma / 2.0, abs=1e-6)
        assert max_r_nonneg(CN, sigma) == pytest.approx(0.5 - sigma / 4.0, abs=1e-6)
        assert max_r_balanced(CN, sigma) == pytest.approx(1.0 - sigma / 2.0, abs=1e-6)
    assert max_r_nonneg(CN, 0.2) == pytest.approx(0.45, abs=1e-9)
    assert max_r_balanced(FE, 0.3) == pytest.approx(0.35, abs=1e-6)


def test_stability_bounds():
    assert max_r_stable(FE) == pytest.approx(0.5, abs=1e-6)
    assert max_r_stable(FE) == pytest.approx(max_r_balanced(FE), abs=1e-6)
    assert max_r_stable(taylor(3)) == pytest.approx(max_r_balanced(taylor(3)), abs=1e-6)


def test_bound_ordering():
    for scheme in (FE, taylor(3), taylor(5), CN, BE):
        nn = max_r_nonneg(scheme)
        bal = max_r_balanced(scheme)
        stable = max_r_stable(scheme)
        slack = 1e-9
        assert nn <= bal + slack
        assert bal <= stable + slack


def test_infeasible_shift():
    with pytest.raises(InfeasibleShiftError):
        max_r_nonneg(FE, 1.5)
    with pytest.raises(InfeasibleShiftError):
        max_r_balanced(FE, 2.5)
    # R(-1.5) = -0.5, so both conditions already fail in the r -> 0 limit.
    row = bounds_row(FE, 1.5)
    assert row.nonneg is None
    assert row.balanced is None
    assert row.stable is not None  # |R(-sigma)| <= 1 still holds at sigma = 1.5


def test_sigma_validation():
    with pytest.raises(ValueError):
        max_r_nonneg(FE, -0.1)


def test_discrete_continuous_agreement():
    lam = analytic_eigenvalues(400).lambdas

    def discrete_bound(scheme, predicate):
        lo, hi = 0.0, 1.0
        while predicate(scheme, hi):
            lo, hi = hi, hi * 2
            if hi > 1e6:
                return math.inf
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if predicate(scheme, mid):
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def nn_ok(scheme, r):
        return bool(np.min(amplification_array(scheme, r * lam)) >= 0.0)

    def bal_ok(scheme, r):
        vals = amplification_array(scheme, r * lam)
        return bool(np.min(vals + vals[::-1]) >= 0.0)

    for scheme in (FE, taylor(3), CN):
        assert discrete_bound(scheme, nn_ok) == pytest.approx(max_r_nonneg(scheme), abs=2e-3)
        assert discrete_bound(scheme, bal_ok) == pytest.approx(max_r_balanced(scheme), abs=2e-3)


def test_bounds_bracket_dense_matrix_spectrum():
    # Independent oracle: eigenvalues of the dense time-step matrix (via
    # numpy) must be nonnegative just below the solved bound and dip negative
    # just above it; same bracketing for the pair sums at the balanced bound.
    from oscillab.schemes import Discretization, time_step_matrix

    k = 120
    eps = 5e-3
    for scheme in (FE, taylor(3), CN):
        nn = max_r_nonneg(scheme)
        lo = np.min(np.linalg.eigvalsh(time_step_matrix(scheme, Discretization.from_r(k, nn * (1 - eps)))))
        hi = np.min(np.linalg.eigvalsh(time_step_matrix(scheme, Discretization.from_r(k, nn * (1 + eps)))))
        assert lo >= -1e-12
        assert hi < 0.0

        bal = max_r_balanced(scheme)
        for factor, expect_ok in ((1 - eps, True), (1 + eps, False)):
            vals = np.sort(
                np.linalg.eigvalsh(time_step_matrix(scheme, Discretization.from_r(k, bal * factor)))
            )
            pair_min = np.min(vals + vals[::-1])
            if expect_ok:
                assert pair_min >= -1e-12
            else:
                assert pair_min < 0.0


def test_nonneg_condition_cases():
    k = 30
    # r = 0.2: even the extreme mode has R >= 1 - 4*0.2 = 0.2 > 0.
    disc = Discretization.from_r(k, 0.2)
    rep = nonneg_condition(_spectrum_with(FE, disc, np.ones(k)))
    assert rep.nonneg_pass

    disc = Discretization.from_r(k, 0.3)
    rep = nonneg_condition(_spectrum_with(FE, disc, np.ones(k)))
    assert not rep.nonneg_pass
    assert not rep.per_mode[-1].nonneg_ok  # most negative mode is excited

    # Zeroing the coefficients on every negative mode restores the pass.
    spec = scheme_spectrum(FE, disc)
    coeffs = np.where(spec.scheme_values < 0.0, 0.0, 1.0)
    rep = nonneg_condition(spec.with_modal_coeffs(coeffs))
    assert rep.nonneg_pass


def test_balanced_condition_boundary_pair_sums():
    k = 20
    disc = Discretization.from_r(k, 0.5)
    rep = balanced_condition(_spectrum_with(FE, disc, ramp(k)))
    # Pair sums are 2 + 0.5*(lambda_j + lambda_pair) = 0 up to roundoff.
    for mode in rep.per_mode:
        assert mode.pair_sum == pytest.approx(0.0, abs=1e-12)
        assert mode.balanced_value_ok


def test_balanced_coefficients_ramp_vs_noise(rng):
    k = 40
    disc = Discretization.from_r(k, 0.4)
    # Monotone ramp against a zero steady state: sine amplitudes decay with j.
    coeffs = dst(ramp(k))
    rep = balanced_condition(_spectrum_with(FE, disc, coeffs))
    assert all(m.balanced_coeff_ok for m in rep.per_mode)

    noisy = dst(np.where(np.arange(k) % 2 == 0, 1.0, -1.0))
    rep = balanced_condition(_spectrum_with(FE, disc, noisy))
    assert not all(m.balanced_coeff_ok for m in rep.per_mode)


def test_condition_requires_populated_spectrum():
    spec = analytic_eigenvalues(5)
    with pytest.raises(ValueError):
        nonneg_condition(spec)
    with pytest.raises(ValueError):
        balanced_condition(spec.with_scheme_values(np.ones(5)))


def test_classification_consistency_with_flags():
    k = 25
    for r in (0.1, 0.3, 0.45):
        disc = Discretization.from_r(k, r)
        rep = classify(FE, disc, dst(ramp(k)))
        if rep.classification is Classification.NON_OSCILLATORY:
            assert rep.nonneg_pass
        elif rep.classification is Classification.FAST_DECAYING:
            assert not rep.nonneg_pass and rep.balanced_pass


def test_classify_reference_cases():
    k = 60
    cases = [
        (FE, 0.2, Classification.NON_OSCILLATORY),
        (FE, 0.3, Classification.FAST_DECAYING),
        (FE, 0.5, Classification.FAST_DECAYING),  # boundary counts as satisfying
        (FE, 0.7, Classification.UNSTABLE),
        (CN, 2.0, Classification.PERSISTENT),
    ]
    for scheme, r, expected in cases:
        disc = Discretization.from_r(k, r)
        rep = classify(scheme, disc, dst(ramp(k)))
        assert rep.classification is expected, (scheme.name, r)


def test_classify_monotone_in_r():
    k = 30
    coeffs = dst(ramp(k))
    for scheme in (FE, CN, taylor(3)):
        worst = -1
        for r in np.linspace(0.05, 3.0, 40):
            rep = classify(scheme, Discretization.from_r(k, float(r)), coeffs)
            rank = CLASS_ORDER.index(rep.classification)
            assert rank >= worst
            worst = max(worst, rank)


def test_classify_negative_shift_is_unstable():
    disc = Discretization(k=10, dx=1.0, dt=0.1, rho=-2.0)
    rep = classify(FE, disc, np.ones(10))
    assert rep.classification is Classification.UNSTABLE


def test_report_serialization():
    k = 7
    disc = Discretization.from_r(k, 0.3)
    rep = classify(FE, disc, dst(ramp(k)))
    d = rep.to_dict()
    assert d["classification"] == rep.classification.value
    assert len(d["per_mode"]) == k
    assert d["meta"]["scheme"] == "forward_euler"
