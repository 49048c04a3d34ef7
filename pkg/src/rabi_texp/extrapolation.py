"""Energy extrapolation from connected moments.

Two schemes are implemented on top of the small-t expansion
E(t) = sum_m (-t)^m I_{m+1} / m!, which decays monotonically to the lowest
energy reachable from the trial state:

* CMX: E(t) modeled as a sum of exponentials; closed-form estimate from an
  odd number m = 2k+1 of connected moments,
      E0 = I_1 - X T^{-1} X',  X = (I_2..I_{k+1}),  T_ij = I_{i+j+1}.
* CSM: works with the inverse function t(E) around E = I_1; the estimate is
      E0 = I_1 + (m-2) t^{(m-2)}(I_1) / t^{(m-1)}(I_1)
  with the derivatives obtained by reverting the E(t) series (m even or odd).

Both estimators are evaluated in scaled units I_m -> I_m / s^m with
s = max_m |I_m|^(1/m) (m >= 2), which leaves the results unchanged exactly
but bounds every scaled moment by one.  Using the energy spread sqrt(I_2)
instead would backfire near eigenstates, where I_2 is tiny while I_6 still
carries the full spectral range.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import factorial, sqrt

import numpy as np

from .errors import SingularMomentMatrix, VanishingDenominator, ZeroLinearTerm
from .moments import ConnectedMoments

#: relative energy spread below which the trial is treated as an eigenstate
EIGENSTATE_TOL = 1e-8

#: CMX moment-matrix condition limit
CONDITION_LIMIT = 1e12

#: CSM correction magnitude at which the derivative ratio is meaningless
CORRECTION_LIMIT = 1e6


class Method(str, Enum):
    VARIATIONAL = "var"
    CMX = "cmx"
    CSM = "csm"


@dataclass(frozen=True)
class EnergyEstimate:
    """An energy estimate with its extrapolation pedigree.

    ``condition`` is the scheme's conditioning diagnostic: the (scaled)
    moment-matrix condition number for CMX, |b_{m-1}| for CSM, 0 for the
    variational value.  ``eigenstate`` marks the short-circuit where the
    trial had (numerically) zero energy variance and I_1 was returned.
    """

    value: float
    method: Method
    order: int
    condition: float = 0.0
    eigenstate: bool = False


@dataclass(frozen=True)
class SeriesCoeffs:
    """Coefficients a_1..a_K of a formal power series with zero constant
    term: f(t) = a_1 t + a_2 t^2 + ..."""

    a: np.ndarray

    @property
    def order(self) -> int:
        return self.a.size


def _values(moments: ConnectedMoments | np.ndarray) -> np.ndarray:
    if isinstance(moments, ConnectedMoments):
        return moments.values
    return np.asarray(moments, dtype=float)


def _is_eigenstate(values: np.ndarray) -> bool:
    spread = sqrt(max(values[1], 0.0))
    return spread <= EIGENSTATE_TOL * max(1.0, abs(values[0]))


def _scaled(values: np.ndarray, m: int) -> tuple[float, np.ndarray]:
    """I_m / s^m for m = 1..m, with s the largest |I_m|^(1/m) over m >= 2."""
    orders = np.arange(2.0, m + 1)
    s = float(np.max(np.abs(values[1:m]) ** (1.0 / orders)))
    powers = s ** np.arange(1, m + 1)
    return s, values[:m] / powers


def series_revert(series: SeriesCoeffs, n_terms: int) -> SeriesCoeffs:
    """Invert E = sum a_m t^m into t = sum b_k E^k as formal series.

    Triangular solve: with p_k the coefficients of a(t)^k, matching powers of
    t in t = sum_k b_k a(t)^k gives b_1 a_1 = 1 and, for n >= 2,
    b_n = -(sum_{k<n} b_k [t^n] a^k) / a_1^n.
    """
    a = np.asarray(series.a, dtype=float)
    if n_terms < 1 or n_terms > a.size:
        raise ValueError(f"need 1 <= n_terms <= {a.size}, got {n_terms}")
    # unit-consistent smallness scale: a_j carries j inverse powers of the
    # expansion variable, so |a_j|^(1/j) are commensurable with a_1
    scale = float(np.max(np.abs(a) ** (1.0 / np.arange(1.0, a.size + 1))))
    if a[0] == 0.0 or abs(a[0]) < 1e-14 * scale:
        raise ZeroLinearTerm(f"linear coefficient {a[0]:.3e} too small")
    k_max = n_terms
    # powers[k][n] = [t^n] a(t)^k, n <= k_max
    powers = np.zeros((k_max + 1, k_max + 1))
    powers[1, 1 : min(k_max, a.size) + 1] = a[:k_max]
    for k in range(2, k_max + 1):
        for n in range(k, k_max + 1):
            powers[k, n] = sum(
                a[j - 1] * powers[k - 1, n - j]
                for j in range(1, min(a.size, n - k + 1) + 1)
            )
    b = np.zeros(k_max)
    b[0] = 1.0 / a[0]
    for n in range(2, k_max + 1):
        b[n - 1] = -sum(b[k - 1] * powers[k, n] for k in range(1, n)) / a[0] ** n
    return SeriesCoeffs(b)


def compose(outer: SeriesCoeffs, inner: SeriesCoeffs, n_terms: int) -> SeriesCoeffs:
    """Coefficients of outer(inner(t)) up to t^n_terms (both constant-free)."""
    a = inner.a
    k_max = n_terms
    powers = np.zeros((k_max + 1, k_max + 1))
    powers[1, 1 : min(k_max, a.size) + 1] = a[:k_max]
    for k in range(2, k_max + 1):
        for n in range(k, k_max + 1):
            powers[k, n] = sum(
                a[j - 1] * powers[k - 1, n - j]
                for j in range(1, min(a.size, n - k + 1) + 1)
            )
    out = np.zeros(k_max)
    for k in range(1, min(outer.a.size, k_max) + 1):
        out += outer.a[k - 1] * powers[k, 1:]
    return SeriesCoeffs(out)


def cmx_estimate(moments: ConnectedMoments | np.ndarray, m: int) -> EnergyEstimate:
    """Connected-moments-expansion estimate from m = 2k+1 moments."""
    values = _values(moments)
    if m < 1 or m % 2 == 0:
        raise ValueError(f"CMX order must be odd and >= 1, got {m}")
    if m > values.size:
        raise ValueError(f"need {m} moments, have {values.size}")
    i1 = float(values[0])
    if m == 1:
        return EnergyEstimate(i1, Method.CMX, 1)
    if _is_eigenstate(values):
        return EnergyEstimate(i1, Method.CMX, m, eigenstate=True)
    s, scaled = _scaled(values, m)
    k = (m - 1) // 2
    x = scaled[1 : k + 1]
    t = np.empty((k, k))
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            t[i - 1, j - 1] = scaled[i + j]
    condition = float(np.linalg.cond(t))
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise SingularMomentMatrix(f"moment matrix condition {condition:.3e}")
    correction = float(x @ np.linalg.solve(t, x))
    return EnergyEstimate(i1 - s * correction, Method.CMX, m, condition=condition)


def csm_estimate(moments: ConnectedMoments | np.ndarray, m: int) -> EnergyEstimate:
    """Inverse-series estimate from m >= 3 moments (m even or odd)."""
    values = _values(moments)
    if m < 3:
        raise ValueError(f"CSM order must be >= 3, got {m}")
    if m > values.size:
        raise ValueError(f"need {m} moments, have {values.size}")
    i1 = float(values[0])
    if _is_eigenstate(values):
        return EnergyEstimate(i1, Method.CSM, m, eigenstate=True)
    s, scaled = _scaled(values, m)
    a = np.array(
        [(-1.0) ** j * scaled[j] / factorial(j) for j in range(1, m)]
    )
    b = series_revert(SeriesCoeffs(a), m - 1).a
    denominator = b[m - 2]
    if denominator == 0.0:
        raise VanishingDenominator(f"b_{m - 1} vanished exactly")
    correction = (m - 2) / (m - 1) * b[m - 3] / denominator
    if abs(correction) > CORRECTION_LIMIT * max(1.0, abs(i1) / s):
        raise VanishingDenominator(
            f"derivative ratio {correction:.3e} beyond the meaningful range"
        )
    return EnergyEstimate(
        i1 + s * correction, Method.CSM, m, condition=float(abs(denominator))
    )


def variational_estimate(moments: ConnectedMoments | np.ndarray) -> EnergyEstimate:
    """Order-1 estimate: the trial energy itself."""
    return EnergyEstimate(float(_values(moments)[0]), Method.VARIATIONAL, 1)


def e_of_t(moments: ConnectedMoments | np.ndarray, t: float) -> float:
    """Truncated series E(t) = sum_m (-t)^m I_{m+1} / m! (diagnostic only)."""
    values = _values(moments)
    total = 0.0
    term = 1.0
    for m, i_next in enumerate(values):
        total += term * i_next
        term *= -t / (m + 1)
    return total


def estimate(
    moments: ConnectedMoments | np.ndarray, method: Method, m: int
) -> EnergyEstimate:
    if method is Method.VARIATIONAL or m == 1:
        return variational_estimate(moments)
    if method is Method.CMX:
        return cmx_estimate(moments, m)
    return csm_estimate(moments, m)
