"""Pure-numpy fallback for the moment kernels.

Mirrors the compiled extension ``_kernels_cy``: structured application of the
shifted Rabi Hamiltonian (never materializing the dense matrix) and the
symmetric-split accumulation of power moments <psi|(H - shift)^m|psi>.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_sqrt_cache: dict[int, np.ndarray] = {}
_arange_cache: dict[int, np.ndarray] = {}


def _tables(n1: int) -> tuple[np.ndarray, np.ndarray]:
    sq = _sqrt_cache.get(n1)
    if sq is None:
        sq = np.sqrt(np.arange(1.0, n1))
        _sqrt_cache[n1] = sq
        _arange_cache[n1] = np.arange(float(n1))
    return _arange_cache[n1], sq


def apply_shifted(omega0, omega, g, shift, v, out=None):
    """out = (H - shift) v, exploiting the tridiagonal block structure."""
    dim = v.shape[0]
    n1 = dim // 2
    n, sq = _tables(n1)
    if out is None:
        out = np.empty_like(v)
    d = v[:n1]
    u = v[n1:]
    np.multiply(omega * n + (-0.5 * omega0 - shift), d, out=out[:n1])
    np.multiply(omega * n + (0.5 * omega0 - shift), u, out=out[n1:])
    c = 2.0 * g
    out[1:n1] += c * sq * u[:-1]
    out[: n1 - 1] += c * sq * u[1:]
    out[n1 + 1 :] += c * sq * d[:-1]
    out[n1:-1] += c * sq * d[1:]
    return out


def raw_moments(omega0, omega, g, shift, psi, n_moments):
    """mu[m-1] = <psi|(H - shift)^m|psi> for m = 1..n_moments.

    Uses floor(m/2) applications per moment: mu_m = <v_j, v_(m-j)> with
    v_k = (H - shift)^k psi and j = floor(m/2).
    """
    n_apps = (n_moments + 1) // 2
    vs = [np.asarray(psi, dtype=np.float64)]
    for _ in range(n_apps):
        vs.append(apply_shifted(omega0, omega, g, shift, vs[-1]))
    mu = np.empty(n_moments)
    for m in range(1, n_moments + 1):
        mu[m - 1] = vs[m // 2] @ vs[m - m // 2]
    return mu
