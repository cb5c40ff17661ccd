"""Gap experiments: bounded-slope minimization, truncation sequences, and
the logarithmic lower bound that witnesses energy blow-up.

The central contrast: for Mania's integrand with both endpoints pinned, the
best energy reachable with a slope bound stays bounded away from zero no
matter how the mesh and bound grow, while truncations of the minimizer with
only the final endpoint pinned have energies at quadrature-noise level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ArgumentError, DomainError
from .functional import (DEFAULT_ORDER, cell_energies, cell_energies_lr,
                         energy, energy_converged)
from .lagrangian import LagrangianSpec, catalog
from .repar import reparametrize
from .trajectory import Mesh, Trajectory, graded_mesh, sample, uniform_mesh

DEFAULT_SEED = 0x4C41565245

_GRAD_STEP_REL = 1e-6
_MAX_HALVINGS = 40


# -- reference minimizing families ------------------------------------------


def sqrt_ramp(n: int, tail_cells: int = 1024, tail_power: float = 2.0) -> Trajectory:
    """Linear ramp of slope sqrt(n) on [0, 1/n], then sqrt(t) up to 1.

    The tail is sampled on a graded mesh; tail_cells=1 gives the coarse
    three-node version with slopes (sqrt(n), (1 - n**-0.5)/(1 - 1/n)).
    """
    if n < 2:
        raise ArgumentError("need n >= 2")
    tail = graded_mesh(1.0 / n, 1.0, tail_cells, tail_power)
    nodes = np.concatenate([[0.0], tail.nodes])
    values = np.sqrt(nodes)
    values[0] = 0.0
    return Trajectory(Mesh(nodes), values)


def plateau_tent(n: int) -> Trajectory:
    """Tent from (0,0) to (1,0) flattened on [1/2 - 1/n, 1/2 + 1/n].

    Slopes are (1, 0, -1); the unit-slope pieces contribute nothing to the
    double-well integrand, and the plateau contributes exactly 2/n.
    """
    if n < 3:
        raise ArgumentError("need n >= 3 so the plateau is interior")
    left = 0.5 - 1.0 / n
    right = 0.5 + 1.0 / n
    nodes = np.array([0.0, left, right, 1.0])
    values = np.array([0.0, left, left, 0.0])
    return Trajectory(Mesh(nodes), values)


def sawtooth(n: int) -> Trajectory:
    """2n teeth of slope +/-1 on [0, 1]; |y| <= 1/(2n), boundary (0, 0)."""
    if n < 1:
        raise ArgumentError("need n >= 1")
    nodes = np.arange(2 * n + 1) / (2.0 * n)
    values = np.where(np.arange(2 * n + 1) % 2 == 1, 1.0 / (2.0 * n), 0.0)
    return Trajectory(Mesh(nodes), values)


def cuberoot_truncation(n: int, tail_power: float = 3.0) -> Trajectory:
    """t**(1/3) truncated flat at height (n+1)**(-1/3) on [0, 1/(n+1)].

    Lipschitz with constant (n+1)**(2/3)/3 and final value 1; the tail
    resolution scales with that constant so the sampled energy stays at
    quadrature-noise level for every n.
    """
    if n < 1:
        raise ArgumentError("need n >= 1")
    s0 = 1.0 / (n + 1)
    tail_cells = max(256, int(math.ceil(16.0 * (n + 1) ** (2.0 / 3.0))))
    tail = graded_mesh(s0, 1.0, tail_cells, tail_power)
    nodes = np.concatenate([[0.0], tail.nodes])
    values = np.cbrt(np.maximum(nodes, s0))
    return Trajectory(Mesh(nodes), values)


# -- bounded-slope minimization ----------------------------------------------


def _project_two(y_prop: np.ndarray, h: np.ndarray,
                 A: float, B: float, m_eff: float) -> np.ndarray | None:
    """Left-anchored sequential slope clipping, then an endpoint-restoring
    ramp over the unclipped cells; None when the correction would violate
    the bound (the step is then rejected)."""
    n = h.size
    out = np.empty(n + 1)
    out[0] = A
    clipped = np.zeros(n, dtype=bool)
    for i in range(n):
        s = (y_prop[i + 1] - out[i]) / h[i]
        if s > m_eff:
            s = m_eff
            clipped[i] = True
        elif s < -m_eff:
            s = -m_eff
            clipped[i] = True
        out[i + 1] = out[i] + s * h[i]
    defect = B - out[n]
    if defect == 0.0:
        return out
    free_w = float(h[~clipped].sum())
    if free_w == 0.0:
        return None
    ramp_slope = defect / free_w
    slopes = np.diff(out) / h
    slopes[~clipped] += ramp_slope
    if np.max(np.abs(slopes[~clipped])) > m_eff:
        return None
    out[1:] = out[0] + np.cumsum(slopes * h)
    out[n] = B
    if np.max(np.abs(np.diff(out) / h)) > m_eff * (1.0 + 1e-12):
        return None
    return out


def _project_one(y_prop: np.ndarray, h: np.ndarray, B: float,
                 m_eff: float) -> np.ndarray:
    """Right-anchored sequential clipping for the final-endpoint-only mode."""
    n = h.size
    out = np.empty(n + 1)
    out[n] = B
    for i in range(n - 1, -1, -1):
        s = (out[i + 1] - y_prop[i]) / h[i]
        s = min(max(s, -m_eff), m_eff)
        out[i] = out[i + 1] - s * h[i]
    return out


def minimize_bounded(spec: LagrangianSpec, mesh: Mesh, bound_M: float,
                     boundary: tuple[float | None, float], restarts: int = 8,
                     seed: int = DEFAULT_SEED, order: int = DEFAULT_ORDER,
                     max_iters: int = 150,
                     extra_inits: Sequence[Trajectory] = ()
                     ) -> tuple[Trajectory, float, int]:
    """Best slope-bounded trajectory found by projected gradient descent.

    The gradient of the quadrature energy is taken by central finite
    differences per free node (step 1e-6 * scale); steps use a halving line
    search (up to 40 halvings) and every iterate is projected back to the
    slope box [-M, M] exactly.  `restarts` seeded pseudo-random starts are
    run in addition to the straight-line start; the best result wins.

    Returns (trajectory, energy, total accepted iterations).
    """
    A, B = boundary
    nodes = mesh.nodes
    h = mesh.widths
    n = mesh.n_cells
    span = mesh.b - mesh.a
    if bound_M <= 0:
        raise ArgumentError("bound_M must be positive")
    if A is not None and bound_M <= abs(B - A) / span:
        raise ArgumentError(
            f"bound_M={bound_M} infeasible: straight line needs slope {abs(B - A) / span:.6g}")
    m_eff = bound_M * (1.0 - 1e-12)

    def project(prop: np.ndarray) -> np.ndarray | None:
        if A is None:
            return _project_one(prop, h, B, m_eff)
        return _project_two(prop, h, A, B, m_eff)

    def obj(yv: np.ndarray) -> float:
        total = 0.0
        for c in cell_energies(spec, nodes, yv, order):
            total += float(c)
        return total

    free = np.ones(n + 1, dtype=bool)
    free[-1] = False
    if A is not None:
        free[0] = False

    def gradient(yv: np.ndarray) -> np.ndarray:
        """Central differences per node; each node touches two cells, so the
        four perturbed contribution arrays are evaluated in batch."""
        eps = _GRAD_STEP_REL * np.maximum(1.0, np.abs(yv))
        yl, yr = yv[:-1], yv[1:]
        el, er = eps[:-1], eps[1:]
        g = np.zeros(n + 1)
        g[1:] += cell_energies_lr(spec, nodes, yl, yr + er, order) \
            - cell_energies_lr(spec, nodes, yl, yr - er, order)
        g[:-1] += cell_energies_lr(spec, nodes, yl + el, yr, order) \
            - cell_energies_lr(spec, nodes, yl - el, yr, order)
        g /= 2.0 * eps
        g[~free] = 0.0
        return np.nan_to_num(g, nan=0.0, posinf=0.0, neginf=0.0)

    def descend(y0: np.ndarray) -> tuple[np.ndarray, float, int]:
        yv = project(y0)
        if yv is None:
            return y0, math.inf, 0
        e = obj(yv)
        iters = 0
        step = 0.1 * max(1.0, float(np.max(np.abs(yv))))
        for _ in range(max_iters):
            g = gradient(yv)
            gmax = float(np.max(np.abs(g)))
            if gmax < 1e-12 * max(1.0, abs(e)):
                break
            dirn = g / gmax
            s = step
            accepted = False
            for _ in range(_MAX_HALVINGS):
                cand = project(yv - s * dirn)
                if cand is not None:
                    ec = obj(cand)
                    if ec < e:
                        yv, e = cand, ec
                        accepted = True
                        step = 2.0 * s
                        break
                s /= 2.0
            if not accepted:
                break
            iters += 1
        return yv, e, iters

    inits: list[np.ndarray] = []
    if A is None:
        inits.append(np.full(n + 1, B))
    else:
        inits.append(A + (B - A) * (nodes - mesh.a) / span)
    for t in extra_inits:
        if not np.array_equal(t.mesh.nodes, nodes):
            raise ArgumentError("extra_inits must live on the scan mesh")
        inits.append(t.values.copy())
    rng = np.random.default_rng([seed, n, int(abs(bound_M) * 1e6)])
    base = inits[0]
    amp0 = 0.5 * max(1.0, float(np.max(np.abs(base))))
    for _ in range(restarts):
        bumps = rng.standard_normal(n + 1)
        bumps[0] = bumps[-1] = 0.0
        smooth = np.convolve(bumps, np.ones(5) / 5.0, mode="same")
        inits.append(base + amp0 * rng.uniform(0.2, 1.0) * smooth)

    best_y, best_e, total_iters = None, math.inf, 0
    for y0 in inits:
        yv, e, iters = descend(y0)
        total_iters += iters
        if e < best_e:
            best_y, best_e = yv, e
    return Trajectory(mesh, best_y), best_e, total_iters


# -- scans --------------------------------------------------------------------


@dataclass(frozen=True)
class GapRow:
    mesh_n: int
    slope_bound: float
    best_energy: float
    iterations: int

    def to_json_dict(self) -> dict:
        return {"mesh_n": self.mesh_n, "slope_bound": self.slope_bound,
                "best_energy": self.best_energy, "iterations": self.iterations}


@dataclass(frozen=True)
class GapReport:
    """Bounded-slope energies across (mesh, bound) grids vs. the minimizer."""

    rows: tuple[GapRow, ...]
    floor_estimate: float
    reference_energy: float
    gap_estimate: float

    def to_json_dict(self) -> dict:
        return {
            "rows": [r.to_json_dict() for r in self.rows],
            "floor_estimate": self.floor_estimate,
            "reference_energy": self.reference_energy,
            "gap_estimate": self.gap_estimate,
        }

    def rows_to_csv(self, f) -> None:
        f.write("mesh_n,slope_bound,best_energy,iterations\n")
        for r in self.rows:
            f.write(f"{r.mesh_n},{r.slope_bound!r},{r.best_energy!r},{r.iterations}\n")


def mania_reference_energy(order: int = DEFAULT_ORDER, tol: float = 1e-6,
                           max_cells: int = 2 ** 14) -> float:
    """Energy of the true minimizer t**(1/3), by refinement on graded meshes."""
    family = []
    n = 64
    while n <= max_cells:
        family.append(graded_mesh(0.0, 1.0, n, 3.0))
        n *= 2
    res = energy_converged(catalog("mania"), np.cbrt, family, order=order, tol=tol)
    return res.value


def _scan_mesh_group(args: tuple) -> list[GapRow]:
    """One mesh size, all bounds ascending with warm starts.  Module-level so
    process pools can pickle it."""
    n, M_grid, restarts, seed, order = args
    spec = catalog("mania")
    mesh = uniform_mesh(0.0, 1.0, int(n))
    warm: list[Trajectory] = []
    rows = []
    for M in sorted(float(m) for m in M_grid):
        traj, e, iters = minimize_bounded(
            spec, mesh, M, (0.0, 1.0), restarts=restarts, seed=seed,
            order=order, extra_inits=warm)
        rows.append(GapRow(mesh_n=int(n), slope_bound=M,
                           best_energy=e, iterations=iters))
        warm = [traj]
    return rows


def mania_two_endpoint_scan(n_grid: Sequence[int], M_grid: Sequence[float],
                            restarts: int = 8, seed: int = DEFAULT_SEED,
                            order: int = DEFAULT_ORDER,
                            jobs: int = 1) -> GapReport:
    """Bounded-slope minimization of Mania's problem with both endpoints.

    For each mesh size the bound grid is scanned in ascending order, warm-
    starting from the best trajectory at the previous bound, which makes the
    best energy non-increasing in the bound by construction.  Mesh sizes are
    independent jobs; with jobs > 1 they run in a process pool, and the
    report is assembled in grid order either way.
    """
    if not n_grid or not M_grid:
        raise ArgumentError("grids must be non-empty")
    groups = [(int(n), tuple(M_grid), restarts, seed, order) for n in n_grid]
    if jobs > 1 and len(groups) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=min(jobs, len(groups))) as pool:
            per_group = list(pool.map(_scan_mesh_group, groups))
    else:
        per_group = [_scan_mesh_group(g) for g in groups]
    rows = [row for group in per_group for row in group]
    reference = mania_reference_energy(order=order)
    floor = min(r.best_energy for r in rows)
    return GapReport(rows=tuple(rows), floor_estimate=floor,
                     reference_energy=reference,
                     gap_estimate=floor - reference)


def mania_one_endpoint_truncations(n_grid: Sequence[int],
                                   order: int = DEFAULT_ORDER
                                   ) -> tuple[tuple[int, float], ...]:
    """Energies of the flat-topped truncations pinned only at t = 1."""
    spec = catalog("mania")
    out = []
    for n in n_grid:
        traj = cuberoot_truncation(int(n))
        out.append((int(n), energy(spec, traj, order).value))
    return tuple(out)


# -- logarithmic lower bound ---------------------------------------------------


def halfinverse_lower_bound(y: Trajectory, interval: tuple[float, float],
                            C: float) -> float:
    """Lower bound for the half-inverse energy of y over a window (c, b).

    For y nonvanishing on [c, b] with |y'| <= C,
        F(y) >= -ln|y(b)| + ln|y(c)| + (ln|y(b)| - ln|y(c)|)^2 / (4 C^2 (b-c)).
    Sending y(c) -> 0 makes the bound blow up, witnessing infinite energy
    for trajectories that vanish at the left endpoint.
    """
    c, b = interval
    if not (y.mesh.a <= c < b <= y.mesh.b):
        raise ArgumentError(f"window ({c}, {b}) must sit inside [{y.mesh.a}, {y.mesh.b}]")
    if C < y.lipschitz_constant * (1.0 - 1e-12):
        raise ArgumentError(
            f"C={C} is below the trajectory's Lipschitz constant {y.lipschitz_constant}")
    lo = y.mesh.cell_of(c)
    hi = y.mesh.cell_of(b)
    probe = np.concatenate([[y.eval(c)], y.values[lo + 1:hi + 1], [y.eval(b)]])
    if np.any(probe == 0.0) or np.any(probe > 0) != np.all(probe > 0):
        raise DomainError("trajectory must be nonvanishing on the window")
    log_ratio = math.log(abs(y.eval(b))) - math.log(abs(y.eval(c)))
    return -log_ratio + log_ratio ** 2 / (4.0 * C * C * (b - c))


# -- avoidance table -----------------------------------------------------------


@dataclass(frozen=True)
class AvoidanceRow:
    k: float
    lip_after: float
    energy_before: float
    energy_after: float
    gap: float

    def to_json_dict(self) -> dict:
        return {"k": self.k, "lip_after": self.lip_after,
                "energy_before": self.energy_before,
                "energy_after": self.energy_after, "gap": self.gap}


def avoidance_demo(spec: LagrangianSpec, y_exact: Callable, mesh: Mesh,
                   k_grid: Sequence[float], order: int = DEFAULT_ORDER
                   ) -> tuple[AvoidanceRow, ...]:
    """Slope-capping sweep on a sampled profile: (k, Lip, energies, gap)."""
    y = sample(y_exact, mesh)
    rows = []
    for k in sorted(float(k) for k in k_grid):
        res = reparametrize(spec, y, k, order)
        rows.append(AvoidanceRow(k=k, lip_after=res.lip_after,
                                 energy_before=res.energy_before,
                                 energy_after=res.energy_after, gap=res.gap))
    return tuple(rows)
