"""Ground-state and sign-changing level computation by projected descent.

Each start draws a random field, projects it onto the relevant Nehari
set, and alternates descent steps along the negative residual with
re-projection; a damped Newton polish on the pointwise residual system
finishes every start.  A brute-force grid oracle on instances with at
most a few free vertices provides independent reference levels.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .energy import ProblemInstance, dir_deriv, energy, field_to_dict, residual
from .graphs import negative_part, positive_part
from .nehari import DegenerateCoupling, NoBracket, NonConvergence, project_pair, project_ray

__all__ = [
    "SolveOptions",
    "SolveReport",
    "VerificationReport",
    "OracleResult",
    "InfeasibleWell",
    "DofLimitExceeded",
    "NonConvergence",
    "solve_ground",
    "solve_nodal",
    "verify",
    "oracle_enumerate",
]

_COLLAPSE_TOL = 1e-14
_SIGN_EPS = 1e-8


class InfeasibleWell(ValueError):
    """Dirichlet well too small to carry a sign-changing solution."""


class DofLimitExceeded(ValueError):
    """Instance has more free vertices than the oracle budget."""


class _Collapse(Exception):
    pass


@dataclass(frozen=True)
class SolveOptions:
    starts: int = 64
    seed: int = 0
    tol_residual: float = 1e-10
    max_outer_iters: int = 5000
    step_init: float = 0.5
    armijo: float = 1e-4
    shrink: float = 0.5

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        if self.tol_residual <= 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class SolveReport:
    minimizer: np.ndarray
    level: float
    residual_inf: float
    membership_residuals: tuple[float, float]
    starts_converged: int
    level_histogram: tuple[float, ...]
    sign_pattern: dict
    degenerate_coupling: bool

    def to_dict(self, inst: ProblemInstance) -> dict:
        return {
            "minimizer": field_to_dict(inst.graph, self.minimizer),
            "level": self.level,
            "residual_inf": self.residual_inf,
            "membership_residuals": list(self.membership_residuals),
            "starts_converged": self.starts_converged,
            "level_histogram": list(self.level_histogram),
            "sign_pattern": self.sign_pattern,
            "degenerate_coupling": self.degenerate_coupling,
        }

    def to_json(self, inst: ProblemInstance) -> str:
        return json.dumps(self.to_dict(inst), sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True)
class VerificationReport:
    residual_inf: float
    membership_residuals: tuple[float, float]
    nehari_gap: float  # J(u) - |u|_2^2 / 2; zero on the Nehari sets
    level: float
    companion_ground: float | None = None

    @property
    def m_margin(self) -> float | None:
        if self.companion_ground is None:
            return None
        return self.level - 2.0 * self.companion_ground

    @property
    def m_gt_2c(self) -> bool | None:
        margin = self.m_margin
        return None if margin is None else margin > 0.0

    def to_dict(self) -> dict:
        return {
            "residual_inf": self.residual_inf,
            "membership_residuals": list(self.membership_residuals),
            "nehari_gap": self.nehari_gap,
            "level": self.level,
            "companion_ground": self.companion_ground,
            "m_margin": self.m_margin,
            "m_gt_2c": self.m_gt_2c,
        }


# -- residual Newton polish ----------------------------------------------


def _residual_free(inst: ProblemInstance, u_free: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(u_free)):
        # Keep root finders that wander off the chart moving back.
        return np.full(len(u_free), 1e300)
    u = np.zeros(inst.graph.n)
    u[inst.free] = u_free
    return residual(inst, u)[inst.free]


def _residual_jacobian(inst: ProblemInstance, u: np.ndarray) -> np.ndarray:
    """Jacobian of the pointwise residual on the free vertex set."""
    g = inst.graph
    free = np.nonzero(inst.free)[0]
    jac = -g.weights[np.ix_(free, free)] / g.mu[free][:, None]
    diag = g.deg[free] / g.mu[free] + inst.lam_a[free]
    uf = u[free]
    with np.errstate(divide="ignore"):
        log_term = np.where(np.abs(uf) > 1e-150, np.log(uf * uf), np.log(1e-300))
    np.fill_diagonal(jac, np.diag(jac) + diag - log_term - 2.0)
    return jac


def _newton_polish(inst: ProblemInstance, u: np.ndarray, tol: float, max_iter: int = 60):
    """Damped Newton on the residual system; None when it fails to settle."""
    free = inst.free
    uf = u[free].copy()
    rnorm = float(np.max(np.abs(_residual_free(inst, uf))))
    for _ in range(max_iter):
        full = np.zeros(inst.graph.n)
        full[free] = uf
        if rnorm <= tol:
            return full
        jac = _residual_jacobian(inst, full)
        try:
            step = np.linalg.solve(jac, -_residual_free(inst, uf))
        except np.linalg.LinAlgError:
            return None
        alpha, accepted = 1.0, False
        while alpha > 1e-10:
            cand = uf + alpha * step
            cnorm = float(np.max(np.abs(_residual_free(inst, cand))))
            if cnorm < rnorm:
                uf, rnorm, accepted = cand, cnorm, True
                break
            alpha *= 0.5
        if not accepted:
            return None
    full = np.zeros(inst.graph.n)
    full[free] = uf
    return full if rnorm <= tol else None


# -- per-start descent -----------------------------------------------------


def _project_nodal(inst: ProblemInstance, u: np.ndarray):
    g = inst.graph
    up, um = positive_part(u), negative_part(u)
    if (
        math.sqrt(max(g.norms(up, 0.0).h1_sq, 0.0)) < _COLLAPSE_TOL
        or math.sqrt(max(g.norms(um, 0.0).h1_sq, 0.0)) < _COLLAPSE_TOL
    ):
        raise _Collapse
    try:
        proj = project_pair(inst, u)
    except (ValueError, NonConvergence, NoBracket, DegenerateCoupling):
        raise _Collapse from None
    if not np.all(np.isfinite(proj.projected)):
        raise _Collapse
    return proj.projected, proj.degenerate


def _project_ground(inst: ProblemInstance, u: np.ndarray):
    if float(np.max(np.abs(u))) < _COLLAPSE_TOL:
        raise _Collapse
    s = project_ray(inst, u)
    if not math.isfinite(s) or s == 0.0:
        raise _Collapse
    return s * u, False


def _sign_ok(u: np.ndarray, free: np.ndarray, nodal: bool) -> bool:
    uf = u[free]
    if nodal:
        return float(uf.max()) > _SIGN_EPS and float(uf.min()) < -_SIGN_EPS
    return float(np.max(np.abs(uf))) > _SIGN_EPS


def _run_start(inst: ProblemInstance, u0: np.ndarray, opts: SolveOptions, nodal: bool):
    """Projected descent from one initial field.

    Returns (field, converged, degenerate) or raises _Collapse when a sign
    part dies and the start must be re-randomized.
    """
    project = _project_nodal if nodal else _project_ground
    precond = 1.0 / (inst.lam_a + 1.0)
    u, degen = project(inst, inst.project(u0))

    def polished(cur: np.ndarray):
        cand = _newton_polish(inst, cur, tol=0.1 * opts.tol_residual)
        if cand is None or not _sign_ok(cand, inst.free, nodal):
            return None
        if energy(inst, cand) > energy(inst, cur) + 1e-9 * max(1.0, abs(energy(inst, cur))):
            return None
        return cand

    for it in range(opts.max_outer_iters):
        r = residual(inst, u)
        rinf = float(np.max(np.abs(r)))
        scale = max(1.0, float(np.max(np.abs(u))))
        if rinf <= opts.tol_residual * scale:
            cand = polished(u)
            return (cand if cand is not None else u), True, degen
        if rinf <= 1e-2 * scale or it % 25 == 24:
            cand = polished(u)
            if cand is not None:
                return cand, True, degen
        d = -r * precond
        slope = inst.graph.integrate(r * d)
        j0 = energy(inst, u)
        alpha, moved = opts.step_init, False
        while alpha > 1e-16:
            try:
                cand, cand_degen = project(inst, u + alpha * d)
            except _Collapse:
                alpha *= opts.shrink
                continue
            if energy(inst, cand) <= j0 + opts.armijo * alpha * slope:
                u, degen, moved = cand, cand_degen, True
                break
            alpha *= opts.shrink
        if not moved:
            cand = polished(u)
            if cand is not None:
                return cand, True, degen
            return u, False, degen
    r = residual(inst, u)
    ok = float(np.max(np.abs(r))) <= opts.tol_residual * max(1.0, float(np.max(np.abs(u))))
    return u, ok, degen


# -- initialization ---------------------------------------------------------


def _max_coupling_signs(inst: ProblemInstance) -> np.ndarray:
    """Sign pattern cutting many edges: top eigenvector of the free Laplacian."""
    g = inst.graph
    free = np.nonzero(inst.free)[0]
    lap = np.diag(g.deg[free]) - g.weights[np.ix_(free, free)]
    _, vecs = np.linalg.eigh(lap)
    signs = np.sign(vecs[:, -1])
    signs[signs == 0] = 1.0
    if np.all(signs > 0) or np.all(signs < 0):
        signs = np.where(np.arange(len(free)) % 2 == 0, 1.0, -1.0)
    out = np.zeros(g.n)
    out[free] = signs
    return out


def _seed_taper(inst: ProblemInstance) -> np.ndarray:
    # True solutions decay like 1/sqrt(lam*a + 1) into the penalized region;
    # seeding with that profile keeps the Nehari scaling factors near 1.
    return 1.0 / np.sqrt(inst.lam_a + 1.0)


def _spike_order(inst: ProblemInstance) -> np.ndarray:
    """Free vertices sorted by the level of their ray-projected indicator.

    The scaled indicator at x lands on the Nehari manifold at level
    (mu/2) exp((deg + lam a mu)/mu); low scores mark vertices where a
    localized state is cheap, which delocalized seeds tend to miss.
    """
    g = inst.graph
    free = np.nonzero(inst.free)[0]
    score = (g.deg[free] + inst.lam_a[free] * g.mu[free]) / g.mu[free] + np.log(g.mu[free])
    # Spikes at heavily penalized vertices are never competitive and their
    # ray projection overflows; drop them.
    keep = score <= 100.0
    return free[keep][np.argsort(score[keep], kind="stable")]


def _deterministic_seeds(inst: ProblemInstance, nodal: bool) -> list[np.ndarray]:
    n = inst.graph.n
    free = np.nonzero(inst.free)[0]
    taper = _seed_taper(inst)
    spikes = _spike_order(inst)
    if not nodal:
        u = np.zeros(n)
        u[free] = 1.0
        seeds = [u * taper]
        for idx in spikes[:4]:
            spike = np.zeros(n)
            spike[idx] = 1.0
            seeds.append(spike)
        return seeds
    half = np.zeros(n)
    half[free[: len(free) // 2]] = 1.5
    half[free[len(free) // 2 :]] = -1.5
    seeds = [half * taper, 1.5 * taper * _max_coupling_signs(inst)]
    if len(spikes) >= 2:
        dipole = np.zeros(n)
        dipole[spikes[0]] = 1.0
        dipole[spikes[1]] = -1.0
        seeds.append(dipole)
    return seeds


def _random_seed_field(inst: ProblemInstance, rng: np.random.Generator, nodal: bool) -> np.ndarray:
    free = np.nonzero(inst.free)[0]
    mags = rng.uniform(0.5, 2.5, size=len(free))
    if nodal:
        signs = rng.choice([-1.0, 1.0], size=len(free))
        if np.all(signs > 0) or np.all(signs < 0):
            signs[0] = -signs[0]
        mags = mags * signs
    u = np.zeros(inst.graph.n)
    u[free] = mags
    return u * _seed_taper(inst)


def _normalize_sign(u: np.ndarray) -> np.ndarray:
    nz = np.nonzero(u)[0]
    if len(nz) and u[nz[0]] < 0:
        return -u
    return u


def _sign_pattern(inst: ProblemInstance, u: np.ndarray) -> dict:
    ids = inst.graph.vertex_ids
    return {
        "positive": [ids[i] for i in np.nonzero(u > 0)[0]],
        "negative": [ids[i] for i in np.nonzero(u < 0)[0]],
        "zero": [ids[i] for i in np.nonzero(u == 0)[0]],
    }


def _solve(inst: ProblemInstance, opts: SolveOptions, nodal: bool) -> SolveReport:
    results = []  # (level, normalized field, degenerate)
    seeds = _deterministic_seeds(inst, nodal)
    for i in range(opts.starts):
        rng = np.random.default_rng([opts.seed, i])
        u0 = seeds[i] if i < len(seeds) else _random_seed_field(inst, rng, nodal)
        for _attempt in range(4):
            try:
                u, ok, degen = _run_start(inst, u0, opts, nodal)
            except _Collapse:
                u0 = _random_seed_field(inst, rng, nodal)
                continue
            if ok:
                results.append((energy(inst, u), _normalize_sign(u), degen))
            break
    if not results:
        mode = "nodal" if nodal else "ground"
        raise NonConvergence(f"no {mode} start reached tolerance (starts={opts.starts})")

    best_level = min(level for level, _, _ in results)
    ties = [r for r in results if r[0] <= best_level + 1e-12 * max(1.0, abs(best_level))]
    _, u_best, degen = min(ties, key=lambda r: tuple(r[1]))

    r = residual(inst, u_best)
    up, um = positive_part(u_best), negative_part(u_best)
    return SolveReport(
        minimizer=u_best,
        level=energy(inst, u_best),
        residual_inf=float(np.max(np.abs(r))),
        membership_residuals=(dir_deriv(inst, u_best, up), dir_deriv(inst, u_best, um)),
        starts_converged=len(results),
        level_histogram=tuple(level for level, _, _ in results),
        sign_pattern=_sign_pattern(inst, u_best),
        degenerate_coupling=degen,
    )


def solve_ground(inst: ProblemInstance, opts: SolveOptions | None = None) -> SolveReport:
    """Least level on the Nehari manifold, best over random starts."""
    return _solve(inst, opts or SolveOptions(), nodal=False)


def solve_nodal(inst: ProblemInstance, opts: SolveOptions | None = None) -> SolveReport:
    """Least level on the sign-changing Nehari set, best over random starts."""
    if inst.mode == "dirichlet" and len(inst.omega.interior) < 2:
        raise InfeasibleWell("sign-changing solutions need at least two interior vertices")
    return _solve(inst, opts or SolveOptions(), nodal=True)


def verify(
    inst: ProblemInstance, u: np.ndarray, companion_ground: float | None = None
) -> VerificationReport:
    """Solution and membership diagnostics for an arbitrary field.

    With a companion ground level the report also carries the margin of
    the nodal level over twice the ground level.
    """
    u = inst.check_admissible(u)
    r = residual(inst, u)
    up, um = positive_part(u), negative_part(u)
    level = energy(inst, u)
    return VerificationReport(
        residual_inf=float(np.max(np.abs(r))),
        membership_residuals=(dir_deriv(inst, u, up), dir_deriv(inst, u, um)),
        nehari_gap=level - 0.5 * inst.graph.integrate(u * u),
        level=level,
        companion_ground=companion_ground,
    )


# -- brute-force oracle -----------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    points: tuple[np.ndarray, ...]
    levels: tuple[float, ...]
    min_nehari_level: float | None
    min_nodal_level: float | None

    def nontrivial(self):
        return [
            (u, lvl)
            for u, lvl in zip(self.points, self.levels)
            if float(np.max(np.abs(u))) > _SIGN_EPS
        ]


def oracle_enumerate(
    inst: ProblemInstance, dof_limit: int = 3, grid: int = 32
) -> OracleResult:
    """Brute-force enumeration of pointwise solutions on tiny instances.

    Dense grid scan of the residual system over the free vertices, with a
    root polish started from every cell whose corners change sign in each
    component, plus seeded random polish starts for safety.  Distinct
    roots are deduplicated and classified: any nontrivial root lies on the
    Nehari manifold; sign-changing roots lie on the sign-changing set.
    """
    free = np.nonzero(inst.free)[0]
    d = len(free)
    if d > dof_limit:
        raise DofLimitExceeded(f"{d} free vertices exceed the oracle budget {dof_limit}")
    if grid < 1:
        raise ValueError("empty grid resolution")
    g = inst.graph
    deg_scale = float(np.max(g.deg / g.mu))
    bound = 2.0 * math.e * max(1.0, deg_scale)
    pts = np.linspace(-bound, bound, grid + 1)

    # Residuals on the whole lattice at once.
    mesh = np.meshgrid(*([pts] * d), indexing="ij")
    lattice = np.stack([m.reshape(-1) for m in mesh], axis=-1)  # (N, d)
    full = np.zeros((lattice.shape[0], g.n))
    full[:, free] = lattice
    lap = (full @ g.weights.T - full * g.deg) / g.mu
    nonlin = np.where(full != 0.0, full * np.log(np.where(full != 0.0, full * full, 1.0)), 0.0)
    res = (-lap + inst.lam_a * full - nonlin)[:, free]
    res_grid = res.reshape((grid + 1,) * d + (d,))

    def jac(uf):
        u = np.zeros(g.n)
        u[free] = uf
        return _residual_jacobian(inst, u)

    candidates = []
    for cell in itertools.product(*([range(grid)] * d)):
        ok = True
        for comp in range(d):
            vals = []
            for offs in itertools.product(*([(0, 1)] * d)):
                idx = tuple(c + o for c, o in zip(cell, offs))
                vals.append(res_grid[idx + (comp,)])
            if not (min(vals) <= 0.0 <= max(vals)):
                ok = False
                break
        if ok:
            candidates.append(np.array([pts[c] + 0.5 * (pts[1] - pts[0]) for c in cell]))
    rng = np.random.default_rng(12345)
    for _ in range(200):
        candidates.append(rng.uniform(-bound, bound, size=d))

    roots: list[np.ndarray] = []
    for x0 in candidates:
        sol = scipy.optimize.root(
            lambda uf: _residual_free(inst, uf), x0, jac=jac, method="hybr", tol=1e-12
        )
        if not sol.success:
            continue
        uf = sol.x
        if float(np.max(np.abs(_residual_free(inst, uf)))) > 1e-9:
            continue
        if not any(np.max(np.abs(uf - r)) <= 1e-8 * max(1.0, np.max(np.abs(r))) for r in roots):
            roots.append(uf)

    points, levels = [], []
    for uf in roots:
        u = np.zeros(g.n)
        u[free] = uf
        # Snap near-zero entries so sign classification is exact.
        u[np.abs(u) < 1e-12] = 0.0
        points.append(u)
        levels.append(energy(inst, u))

    nehari = [lvl for u, lvl in zip(points, levels) if float(np.max(np.abs(u))) > _SIGN_EPS]
    nodal = [
        lvl
        for u, lvl in zip(points, levels)
        if float(u.max()) > _SIGN_EPS and float(u.min()) < -_SIGN_EPS
    ]
    return OracleResult(
        points=tuple(points),
        levels=tuple(levels),
        min_nehari_level=min(nehari) if nehari else None,
        min_nodal_level=min(nodal) if nodal else None,
    )
