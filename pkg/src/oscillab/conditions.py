"""Non-negative and balanced eigenvalue conditions, maximal step-size ratios,
and classification of (scheme, r, sigma) configurations.

A mode oscillates when its scheme eigenvalue R(r lambda_j - sigma) is
negative and the mode is actually excited (nonzero sine coefficient of
``u_0 - ubar``).  The non-negative condition forbids that outright.  The
weaker balanced condition only requires each high mode to decay faster than
its mirror-image low-frequency envelope (pair sum of scheme values
nonnegative) while starting no larger (coefficient ordering), which keeps
any oscillation fast-decaying relative to the solution.

Maximal-r solvers treat lambda as continuous on [-4, 0], matching the usual
closed-form bounds; condition checks on an actual grid use the discrete
eigenvalues.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import Spectrum
from .schemes import (
    Discretization,
    RationalScheme,
    amplification_array,
    scheme_spectrum,
)

DEFAULT_TOL = 1e-9
DEFAULT_COEFF_TOL_REL = 1e-12

_THETA_GRID = 1024
_GOLDEN_TOL = 1e-12
_UNBOUNDED_CAP = 2.0**33


class InfeasibleShiftError(ValueError):
    """The reaction shift sigma is so large that no positive r qualifies."""


class Classification(enum.Enum):
    NON_OSCILLATORY = "NonOscillatory"
    FAST_DECAYING = "FastDecayingOscillations"
    PERSISTENT = "PersistentOscillations"
    UNSTABLE = "Unstable"


# Severity order used by the monotonicity property: later is worse.
CLASS_ORDER = (
    Classification.NON_OSCILLATORY,
    Classification.FAST_DECAYING,
    Classification.PERSISTENT,
    Classification.UNSTABLE,
)


@dataclass(frozen=True)
class ModeCondition:
    j: int
    lambda_j: float
    scheme_value: float
    modal_coeff: float
    nonneg_ok: bool
    pair_index: int
    pair_sum: float
    balanced_value_ok: bool
    balanced_coeff_ok: bool


@dataclass(frozen=True)
class ConditionReport:
    per_mode: tuple[ModeCondition, ...]
    nonneg_pass: bool
    balanced_pass: bool
    classification: Classification
    tol: float
    coeff_floor: float
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "classification": self.classification.value,
            "nonneg_pass": self.nonneg_pass,
            "balanced_pass": self.balanced_pass,
            "tol": self.tol,
            "coeff_floor": self.coeff_floor,
            "meta": dict(self.meta),
            "per_mode": [
                {
                    "j": m.j,
                    "lambda": m.lambda_j,
                    "scheme_value": m.scheme_value,
                    "modal_coeff": m.modal_coeff,
                    "nonneg_ok": m.nonneg_ok,
                    "pair_index": m.pair_index,
                    "pair_sum": m.pair_sum,
                    "balanced_value_ok": m.balanced_value_ok,
                    "balanced_coeff_ok": m.balanced_coeff_ok,
                }
                for m in self.per_mode
            ],
        }


def _require_populated(spectrum: Spectrum) -> tuple[np.ndarray, np.ndarray]:
    if spectrum.scheme_values is None:
        raise ValueError("spectrum is missing scheme values")
    if spectrum.modal_coeffs is None:
        raise ValueError("spectrum is missing modal coefficients")
    return spectrum.scheme_values, spectrum.modal_coeffs


def _evaluate(
    spectrum: Spectrum,
    tol: float,
    coeff_tol_rel: float,
    classification_hint: Classification | None = None,
    meta: dict | None = None,
) -> ConditionReport:
    values, coeffs = _require_populated(spectrum)
    k = spectrum.k
    coeff_floor = coeff_tol_rel * float(np.max(np.abs(coeffs))) if k else 0.0

    nonneg = (values >= -tol) | (np.abs(coeffs) <= coeff_floor)

    pair_value_ok = np.empty(k, dtype=bool)
    pair_coeff_ok = np.empty(k, dtype=bool)
    pair_sums = np.empty(k)
    for j in range(1, k + 1):
        jp = k + 1 - j
        s = float(values[j - 1] + values[jp - 1])
        pair_sums[j - 1] = s
        if j == jp:
            pair_value_ok[j - 1] = True
            pair_coeff_ok[j - 1] = True
            continue
        lo, hi = min(j, jp), max(j, jp)
        pair_value_ok[j - 1] = s >= -tol
        pair_coeff_ok[j - 1] = abs(coeffs[lo - 1]) >= abs(coeffs[hi - 1]) - coeff_floor

    nonneg_pass = bool(np.all(nonneg))
    balanced_pass = bool(np.all(pair_value_ok & pair_coeff_ok))
    if classification_hint is not None:
        classification = classification_hint
    elif nonneg_pass:
        classification = Classification.NON_OSCILLATORY
    elif balanced_pass:
        classification = Classification.FAST_DECAYING
    else:
        classification = Classification.PERSISTENT

    per_mode = tuple(
        ModeCondition(
            j=j,
            lambda_j=float(spectrum.lambdas[j - 1]),
            scheme_value=float(values[j - 1]),
            modal_coeff=float(coeffs[j - 1]),
            nonneg_ok=bool(nonneg[j - 1]),
            pair_index=k + 1 - j,
            pair_sum=float(pair_sums[j - 1]),
            balanced_value_ok=bool(pair_value_ok[j - 1]),
            balanced_coeff_ok=bool(pair_coeff_ok[j - 1]),
        )
        for j in range(1, k + 1)
    )
    return ConditionReport(
        per_mode=per_mode,
        nonneg_pass=nonneg_pass,
        balanced_pass=balanced_pass,
        classification=classification,
        tol=tol,
        coeff_floor=coeff_floor,
        meta=meta or {},
    )


def nonneg_condition(
    spectrum: Spectrum,
    tol: float = DEFAULT_TOL,
    coeff_tol_rel: float = DEFAULT_COEFF_TOL_REL,
) -> ConditionReport:
    """Per-mode check that every excited mode has a nonnegative scheme value."""
    return _evaluate(spectrum, tol, coeff_tol_rel)


def balanced_condition(
    spectrum: Spectrum,
    tol: float = DEFAULT_TOL,
    coeff_tol_rel: float = DEFAULT_COEFF_TOL_REL,
) -> ConditionReport:
    """Paired-mode check: pair sums nonnegative, envelope coefficient at least
    as large as its high-frequency partner."""
    return _evaluate(spectrum, tol, coeff_tol_rel)


def _golden_min(f, a: float, b: float, tol: float = _GOLDEN_TOL) -> float:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return min(fc, fd)


def _min_over_theta(f_grid, f_scalar) -> float:
    """Minimize over theta in [0, pi/2]: coarse grid then golden refinement."""
    theta = np.linspace(0.0, np.pi / 2.0, _THETA_GRID)
    vals = f_grid(theta)
    vals = np.where(np.isfinite(vals), vals, -np.inf)
    i = int(np.argmin(vals))
    best = float(vals[i])
    if not math.isfinite(best):
        return best
    lo = theta[max(i - 1, 0)]
    hi = theta[min(i + 1, theta.size - 1)]
    refined = _golden_min(f_scalar, lo, hi)
    if not math.isfinite(refined):
        return -math.inf
    return min(best, refined)


def pair_sum_min(scheme: RationalScheme, r: float, sigma: float) -> float:
    """min over theta of R(-4r sin^2 - sigma) + R(-4r cos^2 - sigma)."""
    if r == 0.0:
        v = amplification_array(scheme, np.array([-sigma]))[0]
        return 2.0 * float(v) if math.isfinite(v) else -math.inf

    def grid(theta):
        s2 = np.sin(theta) ** 2
        return amplification_array(scheme, -4.0 * r * s2 - sigma) + amplification_array(
            scheme, -4.0 * r * (1.0 - s2) - sigma
        )

    def scalar(t):
        s2 = math.sin(t) ** 2
        v = amplification_array(scheme, np.array([-4.0 * r * s2 - sigma, -4.0 * r * (1.0 - s2) - sigma]))
        total = float(v[0] + v[1])
        return total if math.isfinite(total) else -math.inf

    return _min_over_theta(grid, scalar)


def stability_margin_min(scheme: RationalScheme, r: float, sigma: float) -> float:
    """min over theta of 1 - |R(-4r sin^2 - sigma)|; nonnegative means stable."""
    if r == 0.0:
        v = amplification_array(scheme, np.array([-sigma]))[0]
        return 1.0 - abs(float(v)) if math.isfinite(v) else -math.inf

    def grid(theta):
        z = -4.0 * r * np.sin(theta) ** 2 - sigma
        return 1.0 - np.abs(amplification_array(scheme, z))

    def scalar(t):
        z = -4.0 * r * math.sin(t) ** 2 - sigma
        v = amplification_array(scheme, np.array([z]))[0]
        return 1.0 - abs(float(v)) if math.isfinite(v) else -math.inf

    return _min_over_theta(grid, scalar)


def _max_r_by_bisection(feasible, sigma: float, what: str) -> float:
    if not feasible(0.0):
        raise InfeasibleShiftError(
            f"no positive r satisfies the {what} condition at sigma={sigma}"
        )
    hi = 1.0
    lo = 0.0
    while feasible(hi):
        lo = hi
        hi *= 2.0
        if hi > _UNBOUNDED_CAP:
            return math.inf
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def _negative_real_roots(coeffs: tuple[float, ...]) -> list[float]:
    if len(coeffs) < 2:
        return []
    roots = np.roots(list(reversed(coeffs)))
    out = []
    for z in roots:
        if abs(z.imag) <= 1e-8 * max(1.0, abs(z)) and z.real < 0:
            out.append(float(z.real))
    return out


def max_r_nonneg(scheme: RationalScheme, sigma: float = 0.0) -> float:
    """Largest r with R(r lambda - sigma) >= 0 for all lambda in [-4, 0].

    Located from the sign-change point of R nearest the origin on the
    negative axis (a root of p or a pole of q); ``inf`` when R stays positive
    on the whole negative axis.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    pool = _negative_real_roots(scheme.p_coeffs) + _negative_real_roots(scheme.q_coeffs)
    if not pool:
        return math.inf
    zstar = max(pool)
    bound = (abs(zstar) - sigma) / 4.0
    if bound <= 0.0:
        raise InfeasibleShiftError(
            f"no positive r satisfies the non-negative condition at sigma={sigma} "
            f"(sign change of R at z={zstar})"
        )
    return bound


def max_r_balanced(scheme: RationalScheme, sigma: float = 0.0) -> float:
    """Largest r with min over paired arguments of R + R >= 0; ``inf`` when the
    pair sum stays nonnegative for every r."""
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    return _max_r_by_bisection(
        lambda r: pair_sum_min(scheme, r, sigma) >= 0.0, sigma, "balanced"
    )


def max_r_stable(scheme: RationalScheme, sigma: float = 0.0) -> float:
    """Largest r with |R(r lambda - sigma)| <= 1 on lambda in [-4, 0]."""
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    return _max_r_by_bisection(
        lambda r: stability_margin_min(scheme, r, sigma) >= 0.0, sigma, "stability"
    )


def classify(
    scheme: RationalScheme,
    disc: Discretization,
    coeffs: np.ndarray,
    tol: float = DEFAULT_TOL,
    coeff_tol_rel: float = DEFAULT_COEFF_TOL_REL,
) -> ConditionReport:
    """Classify a configuration: Unstable, else NonOscillatory if the
    non-negative condition passes on the grid spectrum, else
    FastDecayingOscillations if the balanced condition passes, else
    PersistentOscillations.  Boundary values of r count as satisfying."""
    coeffs = np.asarray(coeffs, dtype=float)
    meta = {"scheme": scheme.name, "k": disc.k, "r": disc.r, "sigma": disc.sigma}
    if disc.sigma < 0:
        # A growth shift puts R above 1 at the top of the spectrum for any r.
        unstable = True
    else:
        try:
            stable_bound = max_r_stable(scheme, disc.sigma)
        except InfeasibleShiftError:
            stable_bound = 0.0
        unstable = math.isfinite(stable_bound) and disc.r > stable_bound + 1e-8 * max(
            1.0, stable_bound
        )
    spectrum = scheme_spectrum(scheme, disc).with_modal_coeffs(coeffs)
    hint = Classification.UNSTABLE if unstable else None
    return _evaluate(spectrum, tol, coeff_tol_rel, classification_hint=hint, meta=meta)


@dataclass(frozen=True)
class BoundsRow:
    """One row of the bounds table; None marks an infeasible sigma."""

    scheme: str
    sigma: float
    nonneg: float | None
    balanced: float | None
    stable: float | None


def bounds_row(scheme: RationalScheme, sigma: float) -> BoundsRow:
    def attempt(solver):
        try:
            return solver(scheme, sigma)
        except InfeasibleShiftError:
            return None

    return BoundsRow(
        scheme=scheme.name,
        sigma=sigma,
        nonneg=attempt(max_r_nonneg),
        balanced=attempt(max_r_balanced),
        stable=attempt(max_r_stable),
    )
