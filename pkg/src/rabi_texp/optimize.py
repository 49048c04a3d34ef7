"""Stationary-point optimization of the order-m energy surfaces.

The order-m estimate E(x, y) inherits a spurious dependence on the trial
parameters from the series truncation; the working points are chosen by the
stationarity conditions dE/dx = dE/dy = 0.  Among the stationary points only
minima (and flat, positive-semidefinite points) are acceptable; maxima and
saddles never are.  When several minima coexist, the physical one is the
member of the unique family that is continuous in g and stays close to the
variational solution -- all other families are disconnected "blind arms" and
are discarded.

Derivatives are central finite differences (Richardson-refined once for the
gradient), applied to the full fock -> moments -> extrapolation pipeline, so
the same machinery serves every method and order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.optimize import minimize

from .errors import (
    NoMinimumFound,
    NoPhysicalSolution,
    SingularMomentMatrix,
    VanishingDenominator,
    ZeroLinearTerm,
)
from .extrapolation import EnergyEstimate, Method, estimate as extrapolate
from .model import RabiParams, TrialKind, TrialSpec
from .moments import analytic_mu1, trial_connected_moments

GRAD_TOL = 1e-8
GRAD_STEP = 1e-5
HESS_STEP = 5e-4
DEDUP_DISTANCE = 1e-6


class HessianClass(str, Enum):
    MINIMUM = "minimum"
    MAXIMUM = "maximum"
    SADDLE = "saddle"
    DEGENERATE = "degenerate"


class BranchLabel(str, Enum):
    PHYSICAL = "Physical"
    BLIND_ARM = "BlindArm"


@dataclass(frozen=True)
class StationaryPoint:
    x: float
    y: float
    energy: float
    method: Method
    order: int
    hessian_class: HessianClass
    grad_norm: float
    condition: float = 0.0

    @property
    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)

    def acceptable(self) -> bool:
        """Minima and flat (semidefinite) points qualify; maxima/saddles not."""
        return self.hessian_class in (HessianClass.MINIMUM, HessianClass.DEGENERATE)


@dataclass(frozen=True)
class SearchBox:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def clip(self, x: float, y: float) -> tuple[float, float]:
        return (
            min(max(x, self.x_lo), self.x_hi),
            min(max(y, self.y_lo), self.y_hi),
        )

    def starts(self, n: int) -> list[tuple[float, float]]:
        """Cell-centered n x n start grid (avoids the x = 0 boundary, where
        the symmetrized families are non-smooth for g > 0)."""
        xs = np.linspace(self.x_lo, self.x_hi, n + 1)
        ys = np.linspace(self.y_lo, self.y_hi, n + 1)
        return [
            (0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]))
            for i in range(n)
            for j in range(n)
        ]


def default_box(params: RabiParams) -> SearchBox:
    """x up to the strong-coupling asymptote 2g/omega plus margin; y covers
    the physical branch interval [-1, 0] with slack on both sides."""
    if params.omega <= 0:
        raise ValueError("optimization requires omega > 0")
    return SearchBox(0.0, 2.0 * params.g / params.omega + 1.0, -1.5, 0.5)


@dataclass(frozen=True)
class ContinuationSettings:
    """Knobs of the physical-branch chaining rule."""

    capture_radius: float = 0.25      # floor of the acceptance radius
    prediction_factor: float = 3.0    # radius grows with |predicted dx|
    min_step: float = 1e-4            # bisection floor before declaring a gap
    starts: int = 12                  # multi-start grid per scan
    refined_starts: int = 24          # fallback grid when a step finds nothing
    exhaustive: bool = False          # scan every grid point (collects arms)


@dataclass
class BranchTrace:
    """A continuation curve over g_grid; ``points[i]`` is None inside gaps."""

    g_grid: np.ndarray
    points: list[StationaryPoint | None]
    label: BranchLabel
    gaps: list[tuple[float, float]] = field(default_factory=list)
    blind_arms: list["BranchTrace"] = field(default_factory=list)
    parent: "BranchTrace | None" = None


class EnergyObjective:
    """E^(m)(x, y) for a fixed Hamiltonian, trial family and estimator.

    ``value`` returns NaN where the estimator is undefined (singular moment
    matrix, vanishing denominators), which makes failed probes drop out of
    the finite-difference machinery naturally.
    """

    def __init__(self, params: RabiParams, kind: TrialKind, method: Method, order: int):
        self.params = params
        self.kind = kind
        self.method = method
        self.order = order

    def estimate(self, x: float, y: float) -> EnergyEstimate:
        if self.method is Method.VARIATIONAL or self.order == 1:
            value = analytic_mu1(self.params, self.kind, x, y)
            return EnergyEstimate(value, Method.VARIATIONAL, 1)
        moments = trial_connected_moments(
            self.params, TrialSpec(self.kind, x, y), self.order
        )
        return extrapolate(moments, self.method, self.order)

    def value(self, x: float, y: float) -> float:
        try:
            return self.estimate(x, y).value
        except (SingularMomentMatrix, VanishingDenominator, ZeroLinearTerm):
            return math.nan

    __call__ = value


def _gradient(f, x: float, y: float) -> np.ndarray:
    """Central differences, Richardson-refined once."""
    out = np.empty(2)
    for i, (c, h) in enumerate(((x, GRAD_STEP * max(1.0, abs(x))),
                                (y, GRAD_STEP * max(1.0, abs(y))))):
        if i == 0:
            coarse = (f(c + h, y) - f(c - h, y)) / (2 * h)
            fine = (f(c + h / 2, y) - f(c - h / 2, y)) / h
        else:
            coarse = (f(x, c + h) - f(x, c - h)) / (2 * h)
            fine = (f(x, c + h / 2) - f(x, c - h / 2)) / h
        out[i] = (4 * fine - coarse) / 3
    return out


def _hessian(f, x: float, y: float, f0: float) -> np.ndarray:
    hx = HESS_STEP * max(1.0, abs(x))
    hy = HESS_STEP * max(1.0, abs(y))
    hxx = (f(x + hx, y) - 2 * f0 + f(x - hx, y)) / hx**2
    hyy = (f(x, y + hy) - 2 * f0 + f(x, y - hy)) / hy**2
    hxy = (
        f(x + hx, y + hy) - f(x + hx, y - hy) - f(x - hx, y + hy) + f(x - hx, y - hy)
    ) / (4 * hx * hy)
    return np.array([[hxx, hxy], [hxy, hyy]])


def _classify(f, x: float, y: float, f0: float) -> HessianClass:
    eigenvalues = np.linalg.eigvalsh(_hessian(f, x, y, f0))
    if not np.all(np.isfinite(eigenvalues)):
        return HessianClass.DEGENERATE
    tau = max(1e-6, 1e-6 * float(np.abs(eigenvalues).max()))
    positive = eigenvalues > tau
    negative = eigenvalues < -tau
    if positive.all():
        return HessianClass.MINIMUM
    if negative.all():
        return HessianClass.MAXIMUM
    if positive.any() and negative.any():
        return HessianClass.SADDLE
    return HessianClass.DEGENERATE


def _newton(f, x0: float, y0: float, box: SearchBox,
            max_iter: int = 50) -> tuple[float, float, float, float] | None:
    """Newton iteration on the gradient; returns (x, y, energy, grad_norm)
    at convergence, None on failure."""
    x, y = box.clip(x0, y0)
    for _ in range(max_iter):
        f0 = f(x, y)
        if not math.isfinite(f0):
            return None
        grad = _gradient(f, x, y)
        if not np.all(np.isfinite(grad)):
            return None
        grad_norm = float(np.hypot(*grad))
        if grad_norm <= GRAD_TOL * max(1.0, abs(f0)):
            return x, y, f0, grad_norm
        hess = _hessian(f, x, y, f0)
        if not np.all(np.isfinite(hess)):
            return None
        # Solve in the Hessian eigenbasis, freezing flat modes: along a
        # quartic valley the measured curvature is finite-difference noise
        # and any Newton step there is garbage.  Physical minima here have
        # curvatures of order 0.1 and larger, far above the floor.
        lam, vec = np.linalg.eigh(hess)
        floor = 1e-6 * max(1.0, abs(f0))
        active = np.abs(lam) >= floor
        if not active.any():
            return None
        coeffs = np.where(active, (vec.T @ grad) / np.where(active, lam, 1.0), 0.0)
        step = -vec @ coeffs
        if not np.all(np.isfinite(step)):
            return None
        length = float(np.hypot(*step))
        if length > 1.0:
            step *= 1.0 / length
        x_new, y_new = box.clip(x + step[0], y + step[1])
        if abs(x_new - x) < 1e-14 and abs(y_new - y) < 1e-14:
            return None  # pinned at the boundary with a finite gradient
        x, y = x_new, y_new
    return None


def _polish(objective: EnergyObjective, x: float, y: float, box: SearchBox
            ) -> StationaryPoint | None:
    result = _newton(objective.value, x, y, box)
    if result is None:
        return None
    xs, ys, energy, grad_norm = result
    est = objective.estimate(xs, ys)
    cls = _classify(objective.value, xs, ys, energy)
    return StationaryPoint(
        xs, ys, energy, est.method, est.order, cls, grad_norm, est.condition
    )


def stationary_points(
    params: RabiParams,
    kind: TrialKind,
    method: Method,
    order: int,
    box: SearchBox | None = None,
    starts: int = 12,
    seeds: tuple[tuple[float, float], ...] = (),
) -> list[StationaryPoint]:
    """All distinct stationary points found from an n x n multi-start grid
    (plus explicit seeds), deduplicated and Hessian-classified.  Failed
    starts are dropped silently; an empty list is a legal outcome."""
    box = box if box is not None else default_box(params)
    objective = EnergyObjective(params, kind, method, order)
    found: list[StationaryPoint] = []
    for x0, y0 in [*box.starts(starts), *seeds]:
        result = _newton(objective.value, x0, y0, box)
        if result is None:
            continue
        x, y, energy, grad_norm = result
        if any(np.hypot(x - p.x, y - p.y) < DEDUP_DISTANCE for p in found):
            continue
        est = objective.estimate(x, y)
        cls = _classify(objective.value, x, y, energy)
        found.append(
            StationaryPoint(x, y, energy, est.method, est.order, cls,
                            grad_norm, est.condition)
        )
    found.sort(key=lambda p: p.energy)
    return found


def variational_optimum(params: RabiParams, kind: TrialKind) -> StationaryPoint:
    """Global minimum of the closed-form trial energy over the search box.

    Exactly degenerate optima (flat valleys, which occur at g = 0) are
    resolved by continuity: the minimizer is re-seeded from the optimum at a
    small positive coupling, so the returned point is the g -> 0+ limit of
    the branch rather than an arbitrary member of the valley.
    """
    box = default_box(params)
    point = _variational_in_box(params, kind, box)
    if point is None:
        raise NoMinimumFound(f"variational starts all diverged for {kind}")
    if point.hessian_class is HessianClass.DEGENERATE and params.g == 0.0:
        nudged = replace(params, g=1e-3)
        anchor = _variational_in_box(nudged, kind, default_box(nudged))
        if anchor is not None:
            re_polished = _polish_variational(params, kind, anchor.x, anchor.y, box)
            if re_polished is not None:
                point = re_polished
    return point


def _variational_in_box(
    params: RabiParams, kind: TrialKind, box: SearchBox
) -> StationaryPoint | None:
    surface = lambda p: analytic_mu1(params, kind, p[0], p[1])
    best = None
    for x0, y0 in box.starts(7):
        result = minimize(
            surface,
            np.array([x0, y0]),
            method="L-BFGS-B",
            bounds=[(box.x_lo, box.x_hi), (box.y_lo, box.y_hi)],
        )
        if best is None or result.fun < best.fun:
            best = result
    if best is None:
        return None
    polished = _polish_variational(params, kind, best.x[0], best.x[1], box)
    if polished is not None:
        return polished
    # fall back to the box minimizer even if the gradient residual is loose
    f = lambda x, y: analytic_mu1(params, kind, x, y)
    x, y = best.x
    grad = _gradient(f, x, y)
    return StationaryPoint(
        x, y, float(best.fun), Method.VARIATIONAL, 1,
        _classify(f, x, y, float(best.fun)), float(np.hypot(*grad)),
    )


def _polish_variational(
    params: RabiParams, kind: TrialKind, x0: float, y0: float, box: SearchBox
) -> StationaryPoint | None:
    f = lambda x, y: analytic_mu1(params, kind, x, y)
    result = _newton(f, x0, y0, box)
    if result is None:
        return None
    x, y, energy, grad_norm = result
    return StationaryPoint(
        x, y, energy, Method.VARIATIONAL, 1, _classify(f, x, y, energy), grad_norm
    )


def _select_candidate(
    candidates: list[StationaryPoint],
    reference: tuple[float, float],
    radius: float,
    variational_energy: float,
    anchor: tuple[float, float] | None = None,
) -> StationaryPoint | None:
    """Among acceptable points within the capture radius of the reference,
    pick the one nearest the anchor (the predicted location during
    continuation; the reference itself otherwise).  Near-ties are broken by
    closeness to the variational energy."""
    target = anchor if anchor is not None else reference
    qualifying = [
        p
        for p in candidates
        if p.acceptable()
        and np.hypot(p.x - reference[0], p.y - reference[1]) <= radius
    ]
    if not qualifying:
        return None
    return min(
        qualifying,
        key=lambda p: (
            round(float(np.hypot(p.x - target[0], p.y - target[1])), 12),
            abs(p.energy - variational_energy),
        ),
    )


def estimate_energy(
    params: RabiParams,
    kind: TrialKind,
    method: Method,
    order: int,
) -> tuple[EnergyEstimate, StationaryPoint]:
    """Single-(g) energy estimate at the physical stationary point.

    The variational optimum seeds a multi-start scan; the accepted point is
    the nearest acceptable minimum within the capture radius of the
    variational optimum.
    """
    variational = variational_optimum(params, kind)
    if order == 1 or method is Method.VARIATIONAL:
        return (
            EnergyEstimate(variational.energy, Method.VARIATIONAL, 1),
            variational,
        )
    box = default_box(params)
    settings = ContinuationSettings()
    points = stationary_points(
        params, kind, method, order, box, settings.starts, seeds=(variational.xy,)
    )
    chosen = _select_candidate(
        points, variational.xy, settings.capture_radius, variational.energy
    )
    if chosen is None:
        points = stationary_points(
            params, kind, method, order, box, settings.refined_starts,
            seeds=(variational.xy,),
        )
        chosen = _select_candidate(
            points, variational.xy, settings.capture_radius, variational.energy
        )
    if chosen is None:
        raise NoPhysicalSolution(
            f"no acceptable stationary point near {variational.xy} "
            f"for {kind.value}/{method.value}/m={order} at g={params.g}"
        )
    objective = EnergyObjective(params, kind, method, order)
    return objective.estimate(chosen.x, chosen.y), chosen


class _Chain:
    """Sequential physical-branch walker over increasing g."""

    def __init__(
        self,
        base: RabiParams,
        kind: TrialKind,
        method: Method,
        order: int,
        settings: ContinuationSettings,
    ):
        self.base = base
        self.kind = kind
        self.method = method
        self.order = order
        self.settings = settings
        self.prev: tuple[float, StationaryPoint] | None = None
        self.prev2: tuple[float, StationaryPoint] | None = None
        self._variational_cache: dict[float, StationaryPoint] = {}

    def params_at(self, g: float) -> RabiParams:
        return replace(self.base, g=g)

    def variational(self, g: float) -> StationaryPoint:
        point = self._variational_cache.get(g)
        if point is None:
            point = variational_optimum(self.params_at(g), self.kind)
            self._variational_cache[g] = point
        return point

    def _predict(self, g: float) -> tuple[float, float]:
        assert self.prev is not None
        g1, p1 = self.prev
        if self.prev2 is None or self.prev2[0] == g1:
            return p1.xy
        g2, p2 = self.prev2
        w = (g - g1) / (g1 - g2)
        return (p1.x + w * (p1.x - p2.x), p1.y + w * (p1.y - p2.y))

    def _radius(self, predicted: tuple[float, float]) -> float:
        assert self.prev is not None
        dx = abs(predicted[0] - self.prev[1].x)
        return max(self.settings.capture_radius, self.settings.prediction_factor * dx)

    def _attempt(
        self, g: float, scan_all: bool
    ) -> tuple[StationaryPoint | None, list[StationaryPoint]]:
        """One acceptance attempt at coupling g; returns (accepted, scanned)."""
        params = self.params_at(g)
        box = default_box(params)
        objective = EnergyObjective(params, self.kind, self.method, self.order)
        if self.prev is None:
            reference = self.variational(g).xy
            radius = self.settings.capture_radius
            seed = reference
        else:
            seed = self._predict(g)
            reference = self.prev[1].xy
            radius = self._radius(seed)
        scanned: list[StationaryPoint] = []
        # Fast path: a single Newton polish from the predicted location.  Only
        # trusted once two accepted points back the predictor, and only when
        # the corrector moved by less than half the predicted step -- close
        # twin minima coexist at intermediate g, and a polish that wandered
        # further than that may have hopped onto a blind arm.
        if not scan_all and self.prev is not None and self.prev2 is not None:
            candidate = _polish(objective, seed[0], seed[1], box)
            if candidate is not None and candidate.acceptable():
                within = np.hypot(
                    candidate.x - reference[0], candidate.y - reference[1]
                ) <= radius
                moved = float(np.hypot(candidate.x - seed[0], candidate.y - seed[1]))
                step = float(
                    np.hypot(seed[0] - reference[0], seed[1] - reference[1])
                )
                if within and moved <= max(0.5 * step, 0.005):
                    return candidate, scanned
        for starts in (self.settings.starts, self.settings.refined_starts):
            scanned = stationary_points(
                params, self.kind, self.method, self.order, box, starts,
                seeds=(seed, self.variational(g).xy),
            )
            chosen = _select_candidate(
                scanned, reference, radius, self.variational(g).energy, anchor=seed
            )
            if chosen is not None:
                return chosen, scanned
        return None, scanned

    def accept(self, g: float, point: StationaryPoint) -> None:
        self.prev2 = self.prev
        self.prev = (g, point)

    def advance(self, g_target: float, scan_all: bool
                ) -> tuple[StationaryPoint | None, list[StationaryPoint]]:
        """Walk from the last accepted g to g_target, bisecting the step when
        an attempt fails; None means a gap (chain state is then reset, so the
        next call restarts from the variational optimum)."""
        while True:
            point, scanned = self._attempt(g_target, scan_all)
            if point is not None:
                self.accept(g_target, point)
                return point, scanned
            if self.prev is None:
                return None, scanned
            # insert an intermediate acceptance, then retry the target
            g_cur = self.prev[0]
            g_try = 0.5 * (g_cur + g_target)
            sub = None
            while g_try - g_cur >= self.settings.min_step:
                sub, _ = self._attempt(g_try, scan_all)
                if sub is not None:
                    break
                g_try = 0.5 * (g_cur + g_try)
            if sub is None:
                self.prev = None
                self.prev2 = None
                return None, scanned
            self.accept(g_try, sub)


def continue_branch(
    params_base: RabiParams,
    kind: TrialKind,
    method: Method,
    order: int,
    g_grid,
    settings: ContinuationSettings | None = None,
) -> BranchTrace:
    """Trace the physical branch across an ascending g grid.

    Seeds at the first grid point from the variational optimum, then chains
    by predictor extrapolation with the capture-radius rule; failed steps are
    bisected down to ``settings.min_step`` before a gap is declared, and the
    chain restarts from the variational optimum past the gap.  With
    ``settings.exhaustive`` every grid point is fully scanned and the
    rejected minima are chained into blind-arm traces.
    """
    settings = settings if settings is not None else ContinuationSettings()
    g_grid = np.asarray(g_grid, dtype=float)
    if g_grid.size < 1 or np.any(np.diff(g_grid) <= 0):
        raise ValueError("g_grid must be non-empty and strictly ascending")

    if order == 1 or method is Method.VARIATIONAL:
        points = [
            variational_optimum(replace(params_base, g=g), kind) for g in g_grid
        ]
        return BranchTrace(g_grid, list(points), BranchLabel.PHYSICAL)

    variational_trace = continue_branch(
        params_base, kind, Method.VARIATIONAL, 1, g_grid
    )

    chain = _Chain(params_base, kind, method, order, settings)
    for g, vp in zip(g_grid, variational_trace.points):
        chain._variational_cache[float(g)] = vp

    points: list[StationaryPoint | None] = []
    leftovers: list[tuple[float, StationaryPoint]] = []
    gaps: list[tuple[float, float]] = []
    gap_start: float | None = None
    for i, g in enumerate(g_grid):
        g = float(g)
        accepted, scanned = chain.advance(g, settings.exhaustive)
        points.append(accepted)
        for p in scanned:
            if p.acceptable() and (accepted is None or p is not accepted):
                leftovers.append((g, p))
        if accepted is None and gap_start is None:
            gap_start = g_grid[i - 1] if i > 0 else g
        elif accepted is not None and gap_start is not None:
            gaps.append((float(gap_start), g))
            gap_start = None
    if gap_start is not None:
        gaps.append((float(gap_start), float(g_grid[-1])))

    trace = BranchTrace(
        g_grid, points, BranchLabel.PHYSICAL, gaps, parent=variational_trace
    )
    if settings.exhaustive:
        trace.blind_arms = _chain_blind_arms(g_grid, leftovers, settings)
    return trace


def _chain_blind_arms(
    g_grid: np.ndarray,
    leftovers: list[tuple[float, StationaryPoint]],
    settings: ContinuationSettings,
) -> list[BranchTrace]:
    """Group rejected acceptable points into arms by nearest-neighbor
    chaining with the same capture radius as the physical branch."""
    remaining = sorted(leftovers, key=lambda item: (item[0], item[1].energy))
    arms: list[BranchTrace] = []
    while remaining:
        g0, p0 = remaining.pop(0)
        arm: dict[float, StationaryPoint] = {g0: p0}
        last = (g0, p0)
        still: list[tuple[float, StationaryPoint]] = []
        for g, p in remaining:
            if g <= last[0]:
                still.append((g, p))
                continue
            if np.hypot(p.x - last[1].x, p.y - last[1].y) <= settings.capture_radius:
                arm[g] = p
                last = (g, p)
            else:
                still.append((g, p))
        remaining = still
        arm_points: list[StationaryPoint | None] = [
            arm.get(float(g)) for g in g_grid
        ]
        arms.append(BranchTrace(g_grid, arm_points, BranchLabel.BLIND_ARM))
    return arms
