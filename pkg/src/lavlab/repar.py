"""Slope-capping time reparametrization of finite-energy trajectories.

Given a trajectory y and a threshold k, build a strictly increasing time
change phi and return y o phi^{-1}, which has Lipschitz constant at most 2k
and the same boundary values.  Cells where |y'| >= k (the fast set) are
slowed by |y'|/k; to land exactly on the right endpoint, a measured subset
of slow cells (slope <= lambda < k, the compensation set) runs at speed 1/2,
its measure being exactly twice the time deficit created by the slowdown.
For integrands that are convex in the velocity, the energy excess of the
capped trajectory is eventually below 1/k; `find_K` locates that threshold
on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import (ArgumentError, ConsistencyError, InfeasibleError,
                     UnsupportedLagrangianError)
from .functional import DEFAULT_ORDER, energy
from .lagrangian import LagrangianSpec, partials
from .trajectory import (ENDPOINT_RTOL, MonotoneMap, Trajectory,
                         push_through_inverse)

SPLIT_GUARD_REL = 1e-13  # measure shortfalls below this (times b-a) skip the cell split


@dataclass(frozen=True)
class ReparPlan:
    """Classification of mesh cells driving the time change.

    All indices refer to `trajectory`, which is the input refined by at most
    one node (the compensation-set split).  `a_fractions` records the covered
    fraction of each compensation cell; after the split these are all 1.0 and
    the inserted node is reported in `split_node`.
    """

    trajectory: Trajectory
    k: float
    lam: float
    s_cells: tuple[int, ...]
    omega_cells: tuple[int, ...]
    a_cells: tuple[int, ...]
    a_fractions: tuple[float, ...]
    measure_s: float
    measure_omega: float
    deficit: float
    complete: bool
    split_node: float | None = None

    @property
    def measure_a(self) -> float:
        widths = self.trajectory.mesh.widths
        return float(sum(widths[i] * f for i, f in zip(self.a_cells, self.a_fractions)))

    def speeds(self) -> np.ndarray:
        """Per-cell speeds: |d|/k on the fast set, 1/2 on the compensation
        set, 1 elsewhere (before the endpoint closure correction)."""
        d = self.trajectory.cell_derivatives()
        v = np.ones(self.trajectory.mesh.n_cells)
        for i in self.s_cells:
            v[i] = abs(d[i]) / self.k
        for i in self.a_cells:
            v[i] = 0.5
        return v

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "lambda": self.lam,
            "s_cells": list(self.s_cells),
            "a_cells": list(self.a_cells),
            "measure_s": self.measure_s,
            "measure_a": self.measure_a,
            "measure_omega": self.measure_omega,
            "deficit": self.deficit,
            "split_node": self.split_node,
        }


@dataclass(frozen=True)
class ReparResult:
    """Capped trajectory with its plan and the energy bookkeeping."""

    y_k: Trajectory
    plan: ReparPlan
    lip_before: float
    lip_after: float
    energy_before: float
    energy_after: float

    @property
    def gap(self) -> float:
        return self.energy_after - self.energy_before

    def to_json_dict(self) -> dict:
        return {
            "plan": self.plan.to_json_dict(),
            "lip_before": self.lip_before,
            "lip_after": self.lip_after,
            "energy_before": self.energy_before,
            "energy_after": self.energy_after,
            "gap": self.gap,
        }


def choose_lambda(y: Trajectory) -> float:
    """Smallest integer lambda >= 1 whose slow set covers half the interval.

    The slow set {|y'| <= lambda} is a union of cells; the rule keeps the
    compensation set feasible at moderate thresholds.
    """
    d = np.abs(y.cell_derivatives())
    widths = y.mesh.widths
    half = (y.mesh.b - y.mesh.a) / 2.0
    top = int(math.ceil(float(np.max(d)))) + 1
    for lam in range(1, top + 1):
        if float(widths[d <= lam].sum()) >= half:
            return float(lam)
    return float(top)  # unreachable: lam = ceil(max|d|) covers every cell


def classify(y: Trajectory, k: float, lam: float) -> ReparPlan:
    """Fast set, slow set, and time deficit for threshold k > lambda.

    Slopes are constant per cell, so both sets are exact unions of cells and
    the deficit integral is a finite sum.
    """
    if not k > lam:
        raise ArgumentError(f"need k > lambda (got k={k}, lambda={lam})")
    d = y.cell_derivatives()
    widths = y.mesh.widths
    absd = np.abs(d)
    s_idx = np.flatnonzero(absd >= k)
    omega_idx = np.flatnonzero(absd <= lam)
    deficit = float(np.sum(widths[s_idx] * (absd[s_idx] / k - 1.0)))
    return ReparPlan(
        trajectory=y, k=float(k), lam=float(lam),
        s_cells=tuple(int(i) for i in s_idx),
        omega_cells=tuple(int(i) for i in omega_idx),
        a_cells=(), a_fractions=(),
        measure_s=float(widths[s_idx].sum()),
        measure_omega=float(widths[omega_idx].sum()),
        deficit=deficit, complete=False)


def _feasible_k_hint(y: Trajectory, k: float, lam: float) -> float | None:
    widths = y.mesh.widths
    absd = np.abs(y.cell_derivatives())
    omega = float(widths[absd <= lam].sum())
    probe = k
    for _ in range(64):
        probe *= 2.0
        mask = absd >= probe
        if 2.0 * float(np.sum(widths[mask] * (absd[mask] / probe - 1.0))) < omega:
            return probe
    return None


def select_A(plan: ReparPlan) -> ReparPlan:
    """Complete the plan: pick the compensation set greedily from the left.

    Cells of the slow set are taken in mesh order until their measure equals
    twice the deficit; the final cell is split by inserting one node so the
    measure is exact.  Requires the slow set strictly larger than the target
    measure; otherwise raises InfeasibleError carrying a feasible-k hint.
    """
    if plan.complete:
        return plan
    target = 2.0 * plan.deficit
    y = plan.trajectory
    span = y.mesh.b - y.mesh.a
    if target == 0.0:
        return replace(plan, a_cells=(), a_fractions=(), complete=True)
    if not plan.measure_omega > target:
        hint = _feasible_k_hint(y, plan.k, plan.lam)
        raise InfeasibleError(
            f"slow set too small: |Omega|={plan.measure_omega:.6g} <= "
            f"2*deficit={target:.6g}; retry with k >= {hint}", k_hint=hint)

    widths = y.mesh.widths
    chosen: list[int] = []
    remaining = target
    split_node = None
    split_cell = None
    for idx in plan.omega_cells:
        w = float(widths[idx])
        if remaining >= w:
            chosen.append(idx)
            remaining -= w
            if remaining <= SPLIT_GUARD_REL * span:
                remaining = 0.0
                break
        else:
            if remaining > SPLIT_GUARD_REL * span:
                split_node = float(y.mesh.nodes[idx]) + remaining
                split_cell = idx
            remaining = 0.0
            break
    if remaining > 0.0:
        raise ConsistencyError("compensation selection exhausted the slow set")

    if split_node is None:
        return replace(plan, a_cells=tuple(chosen),
                       a_fractions=(1.0,) * len(chosen), complete=True)

    refined = y.with_node(split_node)
    shift = lambda i: i if i < split_cell else i + 1
    s_cells = tuple(shift(i) for i in plan.s_cells)
    omega_cells = []
    for i in plan.omega_cells:
        if i == split_cell:
            omega_cells.extend([i, i + 1])  # both halves stay slow
        else:
            omega_cells.append(shift(i))
    a_cells = tuple(shift(i) for i in chosen) + (split_cell,)
    return ReparPlan(
        trajectory=refined, k=plan.k, lam=plan.lam,
        s_cells=s_cells, omega_cells=tuple(omega_cells),
        a_cells=a_cells, a_fractions=(1.0,) * len(a_cells),
        measure_s=plan.measure_s, measure_omega=plan.measure_omega,
        deficit=plan.deficit, complete=True, split_node=split_node)


def build_map(plan: ReparPlan) -> MonotoneMap:
    """Monotone map with the plan's speeds, closed to hit b exactly.

    In exact arithmetic the measure equation makes phi(b) = b; the residual
    float defect is absorbed into the last unit-speed cell before the map is
    validated against the endpoint tolerance.
    """
    if not plan.complete:
        raise ArgumentError("plan is not complete; run select_A first")
    mesh = plan.trajectory.mesh
    speeds = plan.speeds()
    widths = mesh.widths
    defect = (mesh.b - mesh.a) - float(np.dot(speeds, widths))
    if defect != 0.0:
        neutral = np.flatnonzero(speeds == 1.0)
        j = int(neutral[-1]) if neutral.size else mesh.n_cells - 1
        speeds[j] += defect / float(widths[j])
    phi = MonotoneMap(mesh, speeds)
    if not phi.is_endpoint_exact:
        raise ConsistencyError(
            f"endpoint defect {phi.endpoint_defect:.3e} exceeds tolerance "
            f"{ENDPOINT_RTOL * (mesh.b - mesh.a):.3e}")
    return phi


def reparametrize(spec: LagrangianSpec, y: Trajectory, k: float,
                  order: int = DEFAULT_ORDER) -> ReparResult:
    """Cap the slopes of y at 2k by a time change, preserving the boundary.

    Requires an autonomous integrand (the energy bookkeeping below uses that
    L sees only (y, v)) with finite energy on y, and k above choose_lambda(y).
    If max |y'| < k the input is returned unchanged, bitwise.  For convex
    integrands the guarantee energy_after <= energy_before + 1/k is
    asymptotic in k; use find_K to locate the onset.
    """
    if not spec.autonomous:
        raise UnsupportedLagrangianError(
            f"{spec.id}: reparametrization requires an autonomous integrand")
    lam = choose_lambda(y)
    if not k > lam:
        raise ArgumentError(f"need k > choose_lambda(y) = {lam} (got k={k})")
    before = energy(spec, y, order)
    if not math.isfinite(before.value):
        raise ArgumentError("reparametrize requires finite energy(y)")
    lip = y.lipschitz_constant

    plan = classify(y, k, lam)
    if lip < k:
        plan = replace(plan, complete=True)
        return ReparResult(y_k=y, plan=plan, lip_before=lip, lip_after=lip,
                           energy_before=before.value, energy_after=before.value)

    plan = select_A(plan)
    speeds = plan.speeds()
    if np.all(speeds == 1.0):  # |d| == k ties only: the map is the identity
        return ReparResult(y_k=plan.trajectory, plan=plan, lip_before=lip,
                           lip_after=lip, energy_before=before.value,
                           energy_after=before.value)
    phi = build_map(plan)
    y_k = push_through_inverse(plan.trajectory, phi)
    after = energy(spec, y_k, order)
    return ReparResult(y_k=y_k, plan=plan, lip_before=lip,
                       lip_after=y_k.lipschitz_constant,
                       energy_before=before.value, energy_after=after.value)


@dataclass(frozen=True)
class KRow:
    k: float
    status: str  # "ok" | "above_bound" | "skipped_lambda" | "infeasible"
    lip_after: float | None
    energy_before: float | None
    energy_after: float | None
    gap: float | None

    def to_json_dict(self) -> dict:
        return {"k": self.k, "status": self.status, "lip_after": self.lip_after,
                "energy_before": self.energy_before,
                "energy_after": self.energy_after, "gap": self.gap}


@dataclass(frozen=True)
class FindKReport:
    """Sweep of the energy-excess bound gap <= 1/k over a threshold grid.

    K is the smallest grid point from which the bound holds for every larger
    grid point; None when no trailing run satisfies it.
    """

    K: float | None
    rows: tuple[KRow, ...]

    @property
    def found(self) -> bool:
        return self.K is not None

    def to_json_dict(self) -> dict:
        return {"K": self.K, "rows": [r.to_json_dict() for r in self.rows]}


def find_K(spec: LagrangianSpec, y: Trajectory, k_grid: Sequence[float],
           order: int = DEFAULT_ORDER) -> FindKReport:
    """Locate the onset of energy_after <= energy_before + 1/k on a grid."""
    if not spec.autonomous:
        raise UnsupportedLagrangianError(f"{spec.id}: find_K requires an autonomous integrand")
    if not spec.convex_in_v:
        raise ArgumentError(f"{spec.id}: find_K requires convex_in_v")
    lam = choose_lambda(y)
    rows: list[KRow] = []
    for k in sorted(float(k) for k in k_grid):
        if not k > lam:
            rows.append(KRow(k, "skipped_lambda", None, None, None, None))
            continue
        try:
            res = reparametrize(spec, y, k, order)
        except InfeasibleError:
            rows.append(KRow(k, "infeasible", None, None, None, None))
            continue
        bound = res.energy_before + 1.0 / k
        slack = 1e-12 * max(1.0, abs(res.energy_before))
        ok = res.energy_after <= bound + slack
        rows.append(KRow(k, "ok" if ok else "above_bound", res.lip_after,
                         res.energy_before, res.energy_after, res.gap))
    K = None
    for row in reversed(rows):
        if row.status == "ok":
            K = row.k
        else:
            break
    return FindKReport(K=K, rows=tuple(rows))


@dataclass(frozen=True)
class TangentCurve:
    """P(w) = L(y, w) - w L_v(y, w) on a grid, with monotonicity report.

    For integrands convex in v, P is non-decreasing on w < 0 and
    non-increasing on w > 0; P(w) is the intercept of the tangent line to
    v -> L(y, v) at w with the vertical axis.
    """

    w_grid: tuple[float, ...]
    values: tuple[float, ...]
    nondecreasing_on_negative: bool
    nonincreasing_on_positive: bool
    max_violation: float


def lemma_P(spec: LagrangianSpec, y: float, w_grid, t: float = 0.0) -> TangentCurve:
    """Tangent-intercept values of v -> L(t, y, v) on a grid (t frozen)."""
    grid = np.sort(np.asarray(w_grid, dtype=float))
    vals = []
    for w in grid:
        lw = float(spec.eval(t, y, w))
        _, _, lv = partials(spec, t, y, w)
        vals.append(lw - w * lv)
    vals = np.asarray(vals)
    scale = max(1.0, float(np.max(np.abs(vals))))
    tol = 1e-10 * scale
    neg = grid < 0
    pos = grid > 0
    viol_neg = float(np.max(-np.diff(vals[neg]), initial=0.0))
    viol_pos = float(np.max(np.diff(vals[pos]), initial=0.0))
    return TangentCurve(
        w_grid=tuple(float(w) for w in grid),
        values=tuple(float(p) for p in vals),
        nondecreasing_on_negative=viol_neg <= tol,
        nonincreasing_on_positive=viol_pos <= tol,
        max_violation=max(viol_neg, viol_pos))
