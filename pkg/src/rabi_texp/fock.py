"""Truncated Fock-space representation: Hamiltonian, coherent and trial states.

The three trial families are

* non-symmetrized:  (y, 1)/sqrt(y^2+1) (x) |x>,
* positive parity:  c+ [|x> + |-x>] |down>  +  y c- [|x> - |-x>] |up>,
* negative parity:  c- [|x> - |-x>] |down>  +  y c+ [|x> + |-x>] |up>,

with c+- = 1/sqrt(y^2+1) / sqrt(2 +- 2 exp(-2x^2)).  The even/odd coherent
combinations are assembled by masking Fock components rather than by
subtraction, so no cancellation occurs at small x; the x -> 0 limit state
(|down,0> + y |up,1> for positive parity, |down,1> + y |up,0> for negative,
normalized) is built directly below |x| = 1e-6 where the c- normalization
becomes 0/0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import TruncationError
from .model import FockConfig, RabiParams, TrialKind, TrialSpec

SMALL_X = 1e-6

#: tail mass above which coherent_state refuses to return a truncation
TAIL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class StateVector:
    """Normalized state in the atom-level-major basis (dim 2 (n_max+1))."""

    coefficients: np.ndarray

    @property
    def n_max(self) -> int:
        return self.coefficients.size // 2 - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))


def coherent_state(x: float, config: FockConfig) -> np.ndarray:
    """Boson-space coefficients c_n = exp(-x^2/2) x^n / sqrt(n!).

    Evaluated through the recurrence c_n = c_{n-1} x / sqrt(n) (as a cumulative
    product); for x^2 > 1200 the seed exp(-x^2/2) underflows, so the
    coefficients are assembled in log space instead, which is identical up to
    rounding.
    """
    n1 = config.n_max + 1
    if x == 0.0:
        c = np.zeros(n1)
        c[0] = 1.0
        return c
    if x * x <= 1200.0:
        steps = np.empty(n1)
        steps[0] = 1.0
        steps[1:] = x / np.sqrt(np.arange(1.0, n1))
        c = np.cumprod(steps) * np.exp(-0.5 * x * x)
    else:
        n = np.arange(n1)
        logc = -0.5 * x * x + n * np.log(abs(x)) - 0.5 * gammaln(n + 1.0)
        c = np.exp(logc)
        if x < 0:
            c[1::2] *= -1.0
    tail = 1.0 - float(c @ c)
    if tail > TAIL_TOLERANCE:
        raise TruncationError(
            f"coherent tail mass {tail:.3e} at x={x}, n_max={config.n_max}"
        )
    return c


def trial_state(spec: TrialSpec, config: FockConfig) -> StateVector:
    """Construct the normalized trial state for the given family and (x, y)."""
    n1 = config.n_max + 1
    y = spec.y
    spinor = 1.0 / np.sqrt(1.0 + y * y)
    v = np.zeros(2 * n1)
    if spec.kind is TrialKind.NONSYM:
        c = coherent_state(spec.x, config)
        v[:n1] = spinor * c
        v[n1:] = y * spinor * c
    elif abs(spec.x) < SMALL_X:
        sign = -1.0 if spec.x < 0 else 1.0
        if spec.kind is TrialKind.POS_PARITY:
            v[0] = spinor
            v[n1 + 1] = y * spinor * sign
        else:
            v[1] = spinor * sign
            v[n1] = y * spinor
    else:
        x = spec.x
        c = coherent_state(x, config)
        even = c.copy()
        even[1::2] = 0.0
        odd = c - even
        # 2*even = |x> + |-x>, 2*odd = |x> - |-x>; expm1 keeps the odd
        # normalization exact at small x
        plus = 2.0 * even / np.sqrt(2.0 + 2.0 * np.exp(-2.0 * x * x))
        minus = 2.0 * odd / np.sqrt(-2.0 * np.expm1(-2.0 * x * x))
        if spec.kind is TrialKind.POS_PARITY:
            v[:n1] = spinor * plus
            v[n1:] = y * spinor * minus
        else:
            v[:n1] = spinor * minus
            v[n1:] = y * spinor * plus
    v /= np.linalg.norm(v)
    return StateVector(v)


def build_hamiltonian(params: RabiParams, config: FockConfig) -> np.ndarray:
    """Dense symmetric matrix of H in the atom-level-major basis.

    Assembled from one symmetric coupling block, so H == H.T holds exactly.
    """
    n1 = config.n_max + 1
    n = np.arange(n1)
    sq = 2.0 * params.g * np.sqrt(np.arange(1.0, n1))
    coupling = np.diag(sq, 1) + np.diag(sq, -1)
    h = np.zeros((2 * n1, 2 * n1))
    h[:n1, :n1] = np.diag(params.omega * n - 0.5 * params.omega0)
    h[n1:, n1:] = np.diag(params.omega * n + 0.5 * params.omega0)
    h[:n1, n1:] = coupling
    h[n1:, :n1] = coupling
    return h


def parity_diagonal(config: FockConfig) -> np.ndarray:
    """Diagonal of Pi = -sigma_z (-1)^(b'b) in the atom-level-major basis."""
    n1 = config.n_max + 1
    signs = np.where(np.arange(n1) % 2 == 0, 1.0, -1.0)
    return np.concatenate([signs, -signs])


def parity_matrix(config: FockConfig) -> np.ndarray:
    return np.diag(parity_diagonal(config))
