"""Parameters, basis conventions and trial-state specifications.

Conventions fixed here and relied on everywhere else:

* Hamiltonian  H = (omega0/2) sigma_z + omega b'b + g (sigma+ + sigma-)(b' + b),
  where sigma+ + sigma- = 2 sigma_x, i.e. off-diagonal matrix elements carry
  2g sqrt(n).  With this normalization the omega0 = 0 ground state sits at
  E0 = -4 g^2 / omega with coherent displacement x = 2g/omega.
* State vectors are atom-level-major: coefficients [0 .. n_max] hold the
  bottom atomic level (sigma_z = -1), [n_max+1 .. 2 n_max+1] the top level.
* Parity operator Pi = -sigma_z (-1)^(b'b).  It is diagonal in this basis:
  (-1)^n on the bottom block, -(-1)^n on the top block, so the g = 0 ground
  state |down, 0> has parity +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


@dataclass(frozen=True)
class RabiParams:
    """Hamiltonian parameters: atomic gap, boson energy, coupling."""

    omega0: float
    omega: float
    g: float

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if self.omega0 < 0 or self.g < 0:
            # sign reversals are exact symmetries; only the canonical
            # quadrant is supported
            raise ValueError("omega0 and g must be >= 0")


class TrialKind(str, Enum):
    """Trial-state family: bare spinor x coherent state, or its parity
    symmetrizations (positive parity targets E0, negative parity E1)."""

    NONSYM = "nonsym"
    POS_PARITY = "pparity"
    NEG_PARITY = "nparity"


@dataclass(frozen=True)
class TrialSpec:
    """A trial state: family plus the two free parameters.

    ``x`` is the coherent displacement, ``y`` the spinor mixing amplitude of
    the top atomic level.
    """

    kind: TrialKind
    x: float
    y: float


@dataclass(frozen=True)
class FockConfig:
    """Boson occupation cutoff; the full basis has dimension 2 (n_max + 1)."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)


def adequate_n_max(x: float) -> int:
    """Cutoff that keeps the coherent-state tail mass below ~1e-14.

    A coherent state with displacement x has mean occupation x^2 and width
    sqrt(x^2); the 10-sigma + 20 margin leaves the truncated tail far below
    anything a sixth power of the Hamiltonian can amplify back.
    """
    x2 = x * x
    return max(32, math.ceil(x2 + 10.0 * math.sqrt(x2 + 1.0) + 20.0))


def config_for(x: float) -> FockConfig:
    return FockConfig(adequate_n_max(abs(x)))
