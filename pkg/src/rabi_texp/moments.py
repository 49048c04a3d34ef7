"""Raw moments mu_m = <psi|H^m|psi> and connected (cumulant-like) moments.

Cancellation control: connected moments for m >= 2 are always formed from
moments of the centered operator H - mu_1.  At strong coupling the energy
scale is ~1e2 and mu_6 ~ 1e12, so the uncentered recursion would lose about
twelve digits; centered moments stay at the fluctuation scale throughout and
the first connected moment is restored afterwards (I_1 is the only one that
is not shift-invariant).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import kernels
from .fock import StateVector, trial_state
from .model import FockConfig, RabiParams, TrialKind, TrialSpec, config_for

MAX_ORDER = 12


@dataclass(frozen=True)
class MomentSet:
    """Raw moments of (H - shift): mu[m-1] = <psi|(H - shift)^m|psi>."""

    mu: np.ndarray
    shift: float = 0.0

    @property
    def order(self) -> int:
        return self.mu.size


@dataclass(frozen=True)
class ConnectedMoments:
    """Connected moments; values[m-1] = I_m.  I_1 is the trial energy and
    I_2 its energy variance."""

    values: np.ndarray

    @property
    def order(self) -> int:
        return self.values.size


def _check_order(n_moments: int) -> None:
    if not 1 <= n_moments <= MAX_ORDER:
        raise ValueError(f"moment order must be in 1..{MAX_ORDER}, got {n_moments}")


def raw_moments(
    state: StateVector,
    hamiltonian: np.ndarray,
    n_moments: int,
    shift: float = 0.0,
) -> MomentSet:
    """Moments from an explicit dense matrix, by repeated mat-vec.

    mu_m is accumulated with the symmetric split <v_j | v_{m-j}>,
    j = floor(m/2), halving the number of applications.
    """
    _check_order(n_moments)
    psi = state.coefficients
    if hamiltonian.shape[0] != psi.size:
        raise ValueError("state and hamiltonian dimensions differ")
    n_apps = (n_moments + 1) // 2
    vs = [psi]
    for _ in range(n_apps):
        v = vs[-1]
        vs.append(hamiltonian @ v - shift * v)
    mu = np.empty(n_moments)
    for m in range(1, n_moments + 1):
        mu[m - 1] = vs[m // 2] @ vs[m - m // 2]
    return MomentSet(mu, shift)


def raw_moments_structured(
    params: RabiParams,
    state: StateVector,
    n_moments: int,
    shift: float = 0.0,
) -> MomentSet:
    """Same contract as :func:`raw_moments`, via the structured kernel."""
    _check_order(n_moments)
    mu = kernels.raw_moments(
        params.omega0, params.omega, params.g, shift, state.coefficients, n_moments
    )
    return MomentSet(mu, shift)


def raw_moments_adaptive(
    params: RabiParams,
    spec: TrialSpec,
    n_moments: int,
    shift: float = 0.0,
    rel_tol: float = 1e-12,
    max_n_max: int = 16384,
) -> tuple[MomentSet, int]:
    """Double n_max until the highest moment is stable to ``rel_tol``.

    Safety net for the static cutoff heuristic; returns the moments and the
    n_max at which they converged.
    """
    n_max = config_for(spec.x).n_max
    prev = None
    while n_max <= max_n_max:
        cfg = FockConfig(n_max)
        ms = raw_moments_structured(params, trial_state(spec, cfg), n_moments, shift)
        top = ms.mu[-1]
        if prev is not None and abs(top - prev) <= rel_tol * max(1.0, abs(prev)):
            return ms, n_max
        prev = top
        n_max *= 2
    raise RuntimeError(f"moments did not stabilize below n_max={max_n_max}")


def connected_from_raw(moments: MomentSet) -> ConnectedMoments:
    """Connected moments via the binomial recursion
    I_m = mu_m - sum_{k=0}^{m-2} C(m-1, k) I_{k+1} mu_{m-k-1}.

    If the input moments are of H - c, only I_1 changes under the shift; the
    returned I_1 is corrected back to the unshifted value I_1 + c.
    """
    mu = moments.mu
    m_tot = mu.size
    out = np.empty(m_tot)
    out[0] = mu[0]
    for m in range(2, m_tot + 1):
        acc = mu[m - 1]
        for k in range(m - 1):
            acc -= comb(m - 1, k) * out[k] * mu[m - k - 2]
        out[m - 1] = acc
    out[0] += moments.shift
    return ConnectedMoments(out)


def trial_connected_moments(
    params: RabiParams,
    spec: TrialSpec,
    n_moments: int,
    config: FockConfig | None = None,
) -> ConnectedMoments:
    """Connected moments of the trial state, computed with centering."""
    _check_order(n_moments)
    cfg = config if config is not None else config_for(spec.x)
    state = trial_state(spec, cfg)
    psi = state.coefficients
    mu1 = float(
        kernels.raw_moments(params.omega0, params.omega, params.g, 0.0, psi, 1)[0]
    )
    centered = kernels.raw_moments(
        params.omega0, params.omega, params.g, mu1, psi, n_moments
    )
    return connected_from_raw(MomentSet(centered, shift=mu1))


def _parity_factors(x: float, positive: bool) -> tuple[float, float, float]:
    """(x/sqrt(1-e^{-4x^2}), x^2 coth^{+-1}(x^2), x^2 tanh^{+-1}(x^2)) with
    their finite x -> 0 limits (sign(x)/2, 1, x^4) resp. (sign(x)/2, x^4, 1)."""
    x2 = x * x
    if abs(x) < 1e-6:
        xf = 0.5 if x >= 0 else -0.5
        coth_term, tanh_term = 1.0, x2 * x2
    else:
        xf = x / np.sqrt(-np.expm1(-4.0 * x2))
        t = np.tanh(x2)
        coth_term, tanh_term = x2 / t, x2 * t
    if positive:
        return xf, coth_term, tanh_term
    return xf, tanh_term, coth_term


def analytic_moments_12(params: RabiParams, spec: TrialSpec) -> tuple[float, float]:
    """Closed-form (mu_1, mu_2) for all three trial families (shift = 0)."""
    om0, om, g = params.omega0, params.omega, params.g
    x, y = spec.x, spec.y
    y2 = y * y
    ny = y2 + 1.0
    atom = 0.5 * om0 * (y2 - 1.0) / ny
    if spec.kind is TrialKind.NONSYM:
        x2 = x * x
        mu1 = om * x2 + 8.0 * g * x * y / ny + atom
        mu2 = (
            0.25 * om0 * om0
            + 4.0 * g * g * (1.0 + 4.0 * x2)
            + om * om * (x2 + x2 * x2)
            + (8.0 * g * om * x * y * (1.0 + 2.0 * x2) + om0 * om * x2 * (y2 - 1.0))
            / ny
        )
        return mu1, mu2
    xf, ca, cb = _parity_factors(x, spec.kind is TrialKind.POS_PARITY)
    x2 = x * x
    mix = y2 * ca + cb
    mu1 = atom + 8.0 * g * y * xf / ny + om * mix / ny
    mu2 = (
        0.25 * om0 * om0
        + om * om * x2 * x2
        + 4.0 * g * g * (1.0 + 2.0 * x2)
        + 8.0 * g * om * y * xf * (1.0 + 2.0 * x2) / ny
        + om0 * om * (y2 * ca - cb) / ny
        + (8.0 * g * g + om * om) * mix / ny
    )
    return mu1, mu2


def analytic_mu1(params: RabiParams, kind: TrialKind, x: float, y: float) -> float:
    """Closed-form trial energy I_1(x, y); the variational surface."""
    return analytic_moments_12(params, TrialSpec(kind, x, y))[0]
