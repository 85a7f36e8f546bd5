"""Backward-Euler time stepping with exhaustive per-step solution enumeration.

Each step solves the discrete inclusion

    (M/tau + K) a + e_n * dj(a_n)  ∋  M*prev/tau + f_k,

where dj is a multivalued boundary graph acting on the last nodal value.  The
unknown can sit on any affine segment of the graph (fold its slope/intercept
into the last row, solve, check the segment interval) or on a vertical segment
(pin a_n, solve the reduced system, check the back-computed flux against the
vertical interval).  Every segment is tried, so the complete solution set of
the step is recovered; at most one solution per segment exists.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .fem1d import (
    SingularSystemError,
    TridiagonalSystem,
    assemble_mass,
    assemble_stiffness,
    solve_tridiagonal,
)
from .nonsmooth import AffineSegment, VerticalSegment

log = logging.getLogger(__name__)

ACCEPT_TOL = 1e-12  # interval membership when accepting a segment's candidate

BRANCH_POLICIES = ("all", "min_boundary", "max_boundary", "first")


class NoSolutionError(RuntimeError):
    """Raised when a step admits no solution on any graph segment."""


@dataclass
class RotheConfig:
    """Time grid and branch bookkeeping parameters.

    num_steps * tau must equal horizon; tau must stay below tau0 when a
    coercivity threshold is supplied.
    """

    tau: float
    num_steps: int
    horizon: float = 1.0
    max_branches: int = 64
    dedupe_tol: float = 1e-10
    tau0: float | None = None

    def __post_init__(self):
        if self.tau <= 0 or self.num_steps < 1:
            raise ValueError("tau must be positive and num_steps >= 1")
        if abs(self.num_steps * self.tau - self.horizon) > 1e-12:
            raise ValueError(
                "num_steps*tau = %r must equal horizon %r"
                % (self.num_steps * self.tau, self.horizon)
            )
        if self.tau0 is not None and not self.tau < self.tau0:
            raise ValueError("tau=%g violates the step restriction tau0=%g" % (self.tau, self.tau0))

    @classmethod
    def from_step(cls, tau, horizon=1.0, **kw):
        """Derive the step count, requiring tau to divide the horizon."""
        steps = round(horizon / tau)
        if steps < 1 or abs(steps * tau - horizon) > 1e-12:
            raise ValueError("tau=%r does not divide horizon=%r" % (tau, horizon))
        return cls(tau=tau, num_steps=steps, horizon=horizon, **kw)


@dataclass
class StepSolution:
    state: np.ndarray
    case_tag: str
    boundary_flux: float


@dataclass
class Branch:
    state: np.ndarray
    parent: int | None
    case_tag: str
    boundary_flux: float | None
    branch_id: str


@dataclass
class SolutionTree:
    """Per-time-step record of all retained discrete solutions."""

    mesh: object
    config: RotheConfig
    policy: str
    levels: list = field(default_factory=list)
    truncated: bool = False
    no_solution_level: int | None = None
    terminated: list = field(default_factory=list)  # (level, branch_id) of dead ends
    step_failures: list = field(default_factory=list)  # (level, branch_id, case_tag, message)

    @property
    def num_levels(self):
        return len(self.levels)

    def branch_counts(self):
        return [len(level) for level in self.levels]

    @property
    def max_branch_count(self):
        return max(self.branch_counts())

    def completed(self):
        return self.no_solution_level is None and self.num_levels == self.config.num_steps + 1

    def path_states(self, leaf_index=0):
        """Root-to-leaf nodal states, following parent links from the last level."""
        states = []
        level = self.num_levels - 1
        idx = leaf_index
        while level >= 0:
            branch = self.levels[level][idx]
            states.append(branch.state)
            idx = branch.parent if branch.parent is not None else 0
            level -= 1
        states.reverse()
        return states

    def chain_states(self):
        """States of a single-branch tree; fails if any level branched."""
        if any(len(level) != 1 for level in self.levels):
            raise ValueError("tree has branching levels; pick a leaf explicitly")
        return [level[0].state for level in self.levels]

    def boundary_values(self, leaf_index=0):
        return np.array([s[-1] for s in self.path_states(leaf_index)])


def clement_average(f, tau, k):
    """Mean action vector of f over ((k-1)*tau, k*tau).

    Composite Simpson with 8 panels; f maps a time to the action vector of
    the forcing functional on the nodal basis.
    """
    a = (k - 1) * tau
    h = tau / 8.0
    weights = (1, 4, 2, 4, 2, 4, 2, 4, 1)
    acc = None
    for j, w in enumerate(weights):
        v = np.asarray(f(a + j * h), dtype=float)
        acc = w * v if acc is None else acc + w * v
    return acc * (h / 3.0) / tau


def project_initial(mesh, u0):
    """Nodal interpolation of the initial datum at the free nodes x_1..x_n.

    The Dirichlet node x_0 is excluded, so data that violate the boundary
    condition (like a nonzero constant) are taken as-is at the free nodes.
    """
    return np.array([float(u0(x)) for x in mesh.nodes])


def _fold_affine(system, rhs, seg):
    sys2 = system.copy()
    sys2.diag[-1] = sys2.diag[-1] + seg.slope
    rhs2 = rhs.copy()
    rhs2[-1] -= seg.intercept
    return sys2, rhs2


def _solve_pinned(system, rhs, r_star):
    """Solve with the last unknown pinned to r_star; return (state, required flux)."""
    n = system.size
    red = TridiagonalSystem(system.lower[: n - 2], system.diag[: n - 1], system.upper[: n - 2])
    rhs_red = rhs[: n - 1].copy()
    rhs_red[-1] -= system.upper[n - 2] * r_star
    state = np.empty(n)
    state[: n - 1] = solve_tridiagonal(red, rhs_red)
    state[-1] = r_star
    flux = rhs[-1] - (system.lower[n - 2] * state[n - 2] + system.diag[-1] * r_star)
    return state, float(flux)


def rothe_step_all(mesh, graph, prev, tau, f_k=None, dedupe_tol=1e-10, failures=None):
    """All solutions of one backward-Euler step, as StepSolution records.

    Segments are tried left to right along the graph.  A singular folded
    system (a negative segment slope cancelling the pivot) is reported into
    ``failures`` and skipped; the other segments still run.  An empty result
    means the step has no solution at all.
    """
    prev = np.asarray(prev, dtype=float)
    system = assemble_mass(mesh).scaled(1.0 / tau) + assemble_stiffness(mesh)
    rhs = assemble_mass(mesh).matvec(prev) / tau
    if f_k is not None:
        rhs = rhs + np.asarray(f_k, dtype=float)

    found = []
    for idx, seg in enumerate(graph.segments):
        if isinstance(seg, AffineSegment):
            tag = "a%d" % idx
            sys2, rhs2 = _fold_affine(system, rhs, seg)
            try:
                state = solve_tridiagonal(sys2, rhs2)
            except SingularSystemError as err:
                log.debug("segment %s singular: %s", tag, err)
                if failures is not None:
                    failures.append((tag, str(err)))
                continue
            if seg.contains(state[-1], ACCEPT_TOL):
                found.append(StepSolution(state, tag, seg.value(state[-1])))
        else:
            tag = "v%d" % idx
            try:
                state, flux = _solve_pinned(system, rhs, seg.r)
            except SingularSystemError as err:
                log.debug("segment %s singular: %s", tag, err)
                if failures is not None:
                    failures.append((tag, str(err)))
                continue
            if seg.xi_lo - ACCEPT_TOL <= flux <= seg.xi_hi + ACCEPT_TOL:
                found.append(StepSolution(state, tag, flux))

    unique = []
    for sol in found:
        if not any(np.max(np.abs(sol.state - u.state)) < dedupe_tol for u in unique):
            unique.append(sol)
    return unique


def _select(candidates, policy):
    if policy == "all":
        return candidates
    if policy == "first":
        return candidates[:1]
    if policy == "min_boundary":
        return [min(candidates, key=lambda b: b.state[-1])]
    if policy == "max_boundary":
        return [max(candidates, key=lambda b: b.state[-1])]
    raise ValueError("unknown branch policy %r" % (policy,))


def run(config, mesh, graph, u0, f=None, branch_policy="all"):
    """Step the inclusion over the whole horizon, growing a SolutionTree.

    Forcing always passes through per-interval averaging (a zero closure
    substitutes when f is None), keeping a single code path.  Branches that
    admit no successor are terminated and recorded; if every branch dies the
    tree stops early with ``no_solution_level`` set.
    """
    if branch_policy not in BRANCH_POLICIES:
        raise ValueError("unknown branch policy %r" % (branch_policy,))
    if f is None:
        f = lambda t: np.zeros(mesh.n)

    tree = SolutionTree(mesh=mesh, config=config, policy=branch_policy)
    root = Branch(project_initial(mesh, u0), None, "init", None, "0")
    tree.levels.append([root])

    for k in range(1, config.num_steps + 1):
        f_k = clement_average(f, config.tau, k)
        candidates = []
        for parent_idx, parent in enumerate(tree.levels[-1]):
            fails = []
            sols = rothe_step_all(
                mesh, graph, parent.state, config.tau, f_k,
                dedupe_tol=config.dedupe_tol, failures=fails,
            )
            for tag, msg in fails:
                tree.step_failures.append((k, parent.branch_id, tag, msg))
            if not sols:
                tree.terminated.append((k, parent.branch_id))
                continue
            for sol in sols:
                seg_index = int(sol.case_tag[1:])
                candidates.append(
                    Branch(
                        sol.state,
                        parent_idx,
                        sol.case_tag,
                        sol.boundary_flux,
                        "%s.%d" % (parent.branch_id, seg_index),
                    )
                )
        kept = _select(candidates, branch_policy) if candidates else []
        # Level-wide dedup: endpoint solutions reachable through two parents.
        unique = []
        for b in kept:
            if not any(np.max(np.abs(b.state - u.state)) < config.dedupe_tol for u in unique):
                unique.append(b)
        if len(unique) > config.max_branches:
            unique = unique[: config.max_branches]
            tree.truncated = True
        if not unique:
            tree.no_solution_level = k
            break
        tree.levels.append(unique)
    return tree


@dataclass
class Interpolant:
    """Time interpolant of the step snapshots: constant or linear in time."""

    kind: str  # "piecewise_constant" | "piecewise_linear"
    tau: float
    snapshots: np.ndarray  # (N+1, n)

    def __post_init__(self):
        if self.kind not in ("piecewise_constant", "piecewise_linear"):
            raise ValueError("unknown interpolant kind %r" % (self.kind,))
        self.snapshots = np.asarray(self.snapshots, dtype=float)

    @property
    def num_steps(self):
        return len(self.snapshots) - 1

    @property
    def horizon(self):
        return self.num_steps * self.tau

    def __call__(self, t):
        if t < -1e-12 or t > self.horizon + 1e-12:
            raise ValueError("t=%r outside [0, %r]" % (t, self.horizon))
        s = t / self.tau
        if self.kind == "piecewise_constant":
            # value is snapshot k on ((k-1)tau, k tau]
            k = min(self.num_steps, max(0, int(math.ceil(s - 1e-12))))
            return self.snapshots[k]
        near = round(s)
        if 0 <= near <= self.num_steps and abs(s - near) <= 1e-12 * max(1.0, abs(s)):
            return self.snapshots[near]  # exact at interpolation nodes
        k = min(self.num_steps - 1, max(0, int(math.floor(s))))
        theta = s - k
        return (1.0 - theta) * self.snapshots[k] + theta * self.snapshots[k + 1]

    def derivative(self, t):
        """A.e. time derivative; constant (u^k - u^{k-1})/tau inside interval k."""
        if self.kind != "piecewise_linear":
            raise ValueError("derivative defined for the piecewise linear interpolant")
        s = t / self.tau
        k = min(self.num_steps - 1, max(0, int(math.floor(s))))
        return (self.snapshots[k + 1] - self.snapshots[k]) / self.tau

    def differences(self):
        """Forward differences u^k - u^{k-1}, k = 1..N."""
        return self.snapshots[1:] - self.snapshots[:-1]


def make_interpolants(states, tau):
    """Both interpolants over one root-to-leaf snapshot path."""
    snaps = np.asarray(states, dtype=float)
    return (
        Interpolant("piecewise_constant", tau, snaps),
        Interpolant("piecewise_linear", tau, snaps),
    )


TRAJECTORY_HEADER = ["t", "branch_id", "parent_id", "case_tag"]


def trajectory_rows(tree):
    """Rows of the branch-trajectory table: one per branch per level.

    Columns: t, branch_id, parent_id, case_tag, alpha_1..alpha_n, xi.  The
    root row has empty parent and flux fields.
    """
    rows = []
    for level, branches in enumerate(tree.levels):
        t = level * tree.config.tau
        for b in branches:
            parent_id = ""
            if b.parent is not None:
                parent_id = tree.levels[level - 1][b.parent].branch_id
            flux = "" if b.boundary_flux is None else b.boundary_flux
            rows.append([t, b.branch_id, parent_id, b.case_tag, *b.state.tolist(), flux])
    return rows
