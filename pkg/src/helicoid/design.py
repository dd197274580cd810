"""Inverse design: search the five-parameter space for target stiffness.

The objective is a weighted sum of squared relative stiffness errors
(hinged at the tolerance bands) plus penalties for strain, workspace
and bound violations; it is zero exactly when every target is met. The
search runs a bounded Nelder-Mead refinement from a deterministic
3-point-per-dimension seed grid, once per candidate helix count, and
reduces results by (objective, lexicographic parameters) so the outcome
does not depend on evaluation order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import Bounds, minimize

from .errors import HelicoidError, InfeasiblePlateError, NoFeasibleDesignError
from .geometry import HelicoidSpec, ManufacturingLimits, validate_spec
from .kinematics import PlateSpec, max_bending, max_compression
from .material import Material
from .stiffness import StiffnessReport, axial_stiffness, bending_stiffness, stiffness_report

_PARAMS = ("H", "D", "w", "t")
_PENALTY = 1e3


@dataclass(frozen=True)
class DesignTargets:
    """Stiffness/workspace targets, tolerance bands and search bounds.

    Bands are relative (0.02 = plus or minus 2%). bounds maps each of
    H, D, w, t to its [lo, hi] interval; n_h_values is the candidate
    helix-count set. delta_l_min / theta_min need a plate to evaluate
    workspace against.
    """

    k_ax_target: float
    k_bend_target: float
    bounds: dict[str, tuple[float, float]]
    n_h_values: tuple[int, ...]
    k_ax_band: float = 0.02
    k_bend_band: float = 0.02
    delta_l_min: float = 0.0
    theta_min: float = 0.0
    eps_max_limit: float = 0.05
    weights: tuple[float, float] = (1.0, 1.0)
    plate: PlateSpec | None = None

    def __post_init__(self):
        if self.k_ax_target <= 0 or self.k_bend_target <= 0:
            raise ValueError("stiffness targets must be positive")
        for name in _PARAMS:
            if name not in self.bounds:
                raise ValueError(f"bounds missing parameter {name!r}")
            lo, hi = self.bounds[name]
            if not 0 < lo < hi:
                raise ValueError(f"bounds for {name!r} must satisfy 0 < lo < hi")
        if not self.n_h_values or any(n < 1 for n in self.n_h_values):
            raise ValueError("n_h_values must be a non-empty set of positive ints")
        if any(w < 0 for w in self.weights) or not any(self.weights):
            raise ValueError("weights must be non-negative and not all zero")
        if (self.delta_l_min > 0 or self.theta_min > 0) and self.plate is None:
            raise ValueError("workspace targets need a plate definition")

    def limits(self) -> ManufacturingLimits:
        return ManufacturingLimits(max_eps=self.eps_max_limit)


def _hinge(x: float) -> float:
    return x if x > 0 else 0.0


def _objective_detail(
    spec: HelicoidSpec, targets: DesignTargets, material: Material
) -> tuple[float, bool]:
    """(objective value, hard-constraint feasibility) for one candidate."""
    w_ax, w_bend = targets.weights
    w_sum = w_ax + w_bend

    penalty = 0.0
    for name in _PARAMS:
        lo, hi = targets.bounds[name]
        x = getattr(spec, name)
        span = hi - lo
        penalty += _hinge((lo - x) / span) ** 2 + _hinge((x - hi) / span) ** 2
    in_bounds = penalty == 0.0

    violations = validate_spec(spec, targets.limits())
    penalty += float(len(violations))

    value = 0.0
    workspace_ok = True
    try:
        k_ax = axial_stiffness(spec, material.E)
        k_bend = bending_stiffness(spec, material.E)
    except (HelicoidError, ValueError):
        penalty += 10.0
    else:
        e_ax = _hinge(abs(k_ax - targets.k_ax_target) / targets.k_ax_target - targets.k_ax_band)
        e_bend = _hinge(
            abs(k_bend - targets.k_bend_target) / targets.k_bend_target - targets.k_bend_band
        )
        value = w_ax * e_ax**2 + w_bend * e_bend**2
        if targets.plate is not None and targets.delta_l_min > 0:
            try:
                dl_max = max_compression(spec, targets.plate)
            except InfeasiblePlateError:
                dl_max = 0.0
            short = _hinge((targets.delta_l_min - dl_max) / targets.delta_l_min)
            penalty += short**2
            workspace_ok = workspace_ok and short == 0
            if targets.theta_min > 0:
                th_short = _hinge(
                    (targets.theta_min - max_bending(targets.plate, dl_max)) / targets.theta_min
                )
                penalty += th_short**2
                workspace_ok = workspace_ok and th_short == 0

    feasible = in_bounds and not violations and workspace_ok
    return value + w_sum * _PENALTY * penalty, feasible


def objective(spec: HelicoidSpec, targets: DesignTargets, material: Material) -> float:
    """Scalar design error, zero iff all targets are met within bands."""
    return _objective_detail(spec, targets, material)[0]


@dataclass(frozen=True)
class TraceEntry:
    """One accepted (best-so-far) iterate of the search."""

    evaluation: int
    n_h: int
    H: float
    D: float
    w: float
    t: float
    objective: float


@dataclass(frozen=True)
class DesignResult:
    """Best design found, its recomputed report, and the search trace."""

    best_spec: HelicoidSpec
    report: StiffnessReport
    workspace: dict | None
    objective_value: float
    trace: tuple[TraceEntry, ...]
    n_evaluations: int


class _BudgetExhausted(Exception):
    pass


class _Search:
    """Evaluation bookkeeping: budget, best-so-far, deterministic ties."""

    def __init__(self, targets: DesignTargets, material: Material, budget: int):
        self.targets = targets
        self.material = material
        self.budget = budget
        self.count = 0
        self.best: tuple | None = None  # (objective, n_h, H, D, w, t) over all
        self.best_feasible: tuple | None = None  # same, hard constraints met
        self.trace: list[TraceEntry] = []

    def exhausted(self) -> bool:
        return self.count >= self.budget

    def evaluate(self, n_h: int, x) -> float:
        if self.exhausted():
            raise _BudgetExhausted
        self.count += 1
        spec = HelicoidSpec(H=float(x[0]), D=float(x[1]), w=float(x[2]), t=float(x[3]), n_h=n_h)
        value, feasible = _objective_detail(spec, self.targets, self.material)
        key = (value, n_h, spec.H, spec.D, spec.w, spec.t)
        if self.best is None or key < self.best:
            self.best = key
            self.trace.append(TraceEntry(self.count, n_h, spec.H, spec.D, spec.w, spec.t, value))
        if feasible and (self.best_feasible is None or key < self.best_feasible):
            self.best_feasible = key
        return value


def optimize(targets: DesignTargets, material: Material, budget: int = 4000) -> DesignResult:
    """Search all candidate helix counts for the best-scoring spec.

    Deterministic for fixed inputs: the seed grid is the 3-point tensor
    grid (lo, mid, hi per parameter) in a fixed order, refinement is
    plain Nelder-Mead with clipped bounds, and `budget` caps the total
    number of objective evaluations (seeds count toward it, so tiny
    budgets return the best evaluated seed unrefined). Raises
    NoFeasibleDesignError, carrying the nearest candidate, when nothing
    evaluated satisfied the hard constraints.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    search = _Search(targets, material, budget)
    lo = np.array([targets.bounds[p][0] for p in _PARAMS])
    hi = np.array([targets.bounds[p][1] for p in _PARAMS])
    grid_1d = [np.array([a, (a + b) / 2, b]) for a, b in zip(lo, hi)]
    seeds = [np.array(p) for p in itertools.product(*grid_1d)]
    n_h_list = tuple(sorted(set(targets.n_h_values)))
    per_branch = max(1, budget // len(n_h_list))

    try:
        for n_h in n_h_list:
            used_before = search.count
            seed_scores = []
            for seed in seeds:
                if search.count - used_before >= per_branch:
                    break
                seed_scores.append((search.evaluate(n_h, seed), tuple(seed)))
            seed_scores.sort(key=lambda sc: (sc[0], sc[1]))
            n_starts = min(3, len(seed_scores))
            for rank in range(n_starts):
                left = per_branch - (search.count - used_before)
                if left <= 0:
                    break
                x0 = np.clip(np.array(seed_scores[rank][1]), lo, hi)
                minimize(
                    lambda x, n=n_h: search.evaluate(n, np.clip(x, lo, hi)),
                    x0,
                    method="Nelder-Mead",
                    bounds=Bounds(lo, hi),
                    options={"maxfev": max(1, left // (n_starts - rank)),
                             "xatol": 1e-10, "fatol": 1e-14},
                )
    except _BudgetExhausted:
        pass

    if search.best_feasible is None:
        assert search.best is not None
        _, n_h, H, D, w, t = search.best
        nearest = HelicoidSpec(H=H, D=D, w=w, t=t, n_h=n_h)
        raise NoFeasibleDesignError(
            f"no design satisfying the hard constraints was found in "
            f"{search.count} evaluations; nearest candidate: {nearest}",
            nearest=nearest,
        )

    value, n_h, H, D, w, t = search.best_feasible
    best_spec = HelicoidSpec(H=H, D=D, w=w, t=t, n_h=n_h)
    workspace = None
    if targets.plate is not None:
        dl_max = max_compression(best_spec, targets.plate)
        workspace = {
            "delta_l_max": dl_max,
            "theta_max_full_margin": max_bending(targets.plate, dl_max),
        }
    return DesignResult(
        best_spec=best_spec,
        report=stiffness_report(best_spec, material, targets.limits()),
        workspace=workspace,
        objective_value=value,
        trace=tuple(search.trace),
        n_evaluations=search.count,
    )
