"""Projections onto the Nehari manifold and the sign-changing Nehari set.

The ray projection has a closed form for the logarithmic nonlinearity.
The pair projection solves the 2x2 system g1 = g2 = 0 in the scaling
factors (s, t) of the positive and negative parts, by damped Newton with
an intermediate-value bracketing box as safeguard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import ProblemInstance, energy, sq_log_sq
from .graphs import negative_part, positive_part

__all__ = [
    "DegenerateCoupling",
    "NoBracket",
    "NonConvergence",
    "PairProjection",
    "FiberValue",
    "project_ray",
    "pair_residuals",
    "miranda_bracket",
    "fiber_energy",
    "project_pair",
]

_BRACKET_MIN = 2.0**-40
_BRACKET_MAX = 2.0**40


class DegenerateCoupling(RuntimeError):
    """The positive and negative supports share no edge (coupling is zero)."""


class NoBracket(RuntimeError):
    """No sign-change box found; one part is numerically null."""


class NonConvergence(RuntimeError):
    """Iteration budget exhausted before reaching tolerance."""


@dataclass(frozen=True)
class PairProjection:
    """Scaling pair placing s*u+ + t*u- on the sign-changing Nehari set."""

    s: float
    t: float
    projected: np.ndarray
    g1_residual: float
    g2_residual: float
    iterations: int
    bracket: tuple[float, float]
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "t": self.t,
            "g1_residual": self.g1_residual,
            "g2_residual": self.g2_residual,
            "iterations": self.iterations,
            "bracket": list(self.bracket),
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class FiberValue:
    s: float
    t: float
    value: float


@dataclass(frozen=True)
class _SplitStats:
    """Norms of the sign parts entering the closed-form pair residuals."""

    a_pos: float  # energy-space norm^2 of u+
    l_pos: float  # integral of u+^2 log u+^2
    b_pos: float  # L2 norm^2 of u+
    a_neg: float
    l_neg: float
    b_neg: float
    k: float  # edge coupling, <= 0

    @property
    def scale(self) -> float:
        return max(self.a_pos, self.a_neg, 1.0)


def _split_stats(inst: ProblemInstance, u: np.ndarray) -> _SplitStats:
    from .energy import coupling_k

    u = inst.check_admissible(u)
    g = inst.graph
    up, um = positive_part(u), negative_part(u)
    return _SplitStats(
        a_pos=inst.norm_h_sq(up),
        l_pos=g.integrate(sq_log_sq(up)),
        b_pos=g.integrate(up * up),
        a_neg=inst.norm_h_sq(um),
        l_neg=g.integrate(sq_log_sq(um)),
        b_neg=g.integrate(um * um),
        k=coupling_k(inst, u),
    )


def project_ray(inst: ProblemInstance, w: np.ndarray) -> float:
    """Unique positive scaling placing ``s w`` on the Nehari manifold.

    Closed form: log s^2 = (|w|_H^2 - |w|_2^2 - int w^2 log w^2) / |w|_2^2.
    """
    w = inst.check_admissible(w)
    b = inst.graph.integrate(w * w)
    if b == 0.0:
        raise ValueError("cannot ray-project the zero field")
    a = inst.norm_h_sq(w)
    l = inst.graph.integrate(sq_log_sq(w))
    return math.exp(0.5 * (a - b - l) / b)


def _g_pair(stats: _SplitStats, s: float, t: float) -> tuple[float, float]:
    ls2 = math.log(s * s)
    lt2 = math.log(t * t)
    g1 = (
        s * s * (stats.a_pos - stats.l_pos - stats.b_pos)
        - s * s * ls2 * stats.b_pos
        - 0.5 * s * t * stats.k
    )
    g2 = (
        t * t * (stats.a_neg - stats.l_neg - stats.b_neg)
        - t * t * lt2 * stats.b_neg
        - 0.5 * s * t * stats.k
    )
    return g1, g2


def _g_jacobian(stats: _SplitStats, s: float, t: float) -> np.ndarray:
    ls2 = math.log(s * s)
    lt2 = math.log(t * t)
    d11 = (
        2.0 * s * (stats.a_pos - stats.l_pos - stats.b_pos)
        - (2.0 * s * ls2 + 2.0 * s) * stats.b_pos
        - 0.5 * t * stats.k
    )
    d12 = -0.5 * s * stats.k
    d21 = -0.5 * t * stats.k
    d22 = (
        2.0 * t * (stats.a_neg - stats.l_neg - stats.b_neg)
        - (2.0 * t * lt2 + 2.0 * t) * stats.b_neg
        - 0.5 * s * stats.k
    )
    return np.array([[d11, d12], [d21, d22]])


def pair_residuals(inst: ProblemInstance, u: np.ndarray, s: float, t: float) -> tuple[float, float]:
    """Closed-form values of (g1, g2) at the scaling pair (s, t).

    g1 equals the directional derivative of the energy at s*u+ + t*u-
    along s*u+; g2 the analogue for the negative part.
    """
    if s <= 0 or t <= 0:
        raise ValueError("s and t must be positive")
    stats = _split_stats(inst, u)
    if stats.b_pos == 0.0 or stats.b_neg == 0.0:
        raise ValueError("pair residuals need both sign parts nontrivial")
    return _g_pair(stats, s, t)


def miranda_bracket(inst: ProblemInstance, u: np.ndarray) -> tuple[float, float]:
    """Box [r, R]^2 whose faces carry the sign pattern bracketing a root.

    Uses that g1 is increasing in t and g2 in s (the coupling is negative),
    so the face conditions reduce to the diagonal corner signs; the scan is
    geometric with factor 2 from 1 outward.
    """
    stats = _split_stats(inst, u)
    if stats.b_pos == 0.0 or stats.b_neg == 0.0:
        raise ValueError("bracket needs both sign parts nontrivial")
    if stats.k >= 0.0:
        raise DegenerateCoupling("positive and negative supports are not edge-adjacent")
    return _bracket_from_stats(stats)


def _bracket_from_stats(stats: _SplitStats) -> tuple[float, float]:
    r = 1.0
    while not all(g > 0.0 for g in _g_pair(stats, r, r)):
        r *= 0.5
        if r < _BRACKET_MIN:
            raise NoBracket("no lower corner with positive signs; a part is numerically null")
    big = max(r, 1.0)
    while not all(g < 0.0 for g in _g_pair(stats, big, big)):
        big *= 2.0
        if big > _BRACKET_MAX:
            raise NoBracket("no upper corner with negative signs")
    return r, big


def fiber_energy(
    inst: ProblemInstance,
    u: np.ndarray,
    s: float,
    t: float,
    membership_tol: float = 1e-8,
) -> FiberValue:
    """Energy of s*u+ + t*u- via the closed fiber formula.

    Requires ``u`` to sit on the sign-changing Nehari set (both pair
    residuals below tolerance).  The returned value matches direct energy
    evaluation of the recombined field and is maximal exactly at (1, 1).
    """
    if s < 0 or t < 0:
        raise ValueError("s and t must be nonnegative")
    stats = _split_stats(inst, u)
    if stats.b_pos == 0.0 or stats.b_neg == 0.0:
        raise ValueError("fiber energy needs both sign parts nontrivial")
    g1, g2 = _g_pair(stats, 1.0, 1.0)
    if max(abs(g1), abs(g2)) > membership_tol * stats.scale:
        raise ValueError("field is not on the sign-changing Nehari set")

    def f(tau: float) -> float:
        if tau == 0.0:
            return -1.0
        return tau * tau - tau * tau * math.log(tau * tau) - 1.0

    value = (
        energy(inst, u)
        + 0.5 * f(s) * stats.b_pos
        + 0.5 * f(t) * stats.b_neg
        + 0.25 * (s - t) ** 2 * stats.k
    )
    return FiberValue(s=s, t=t, value=value)


def _bisect_g1(stats: _SplitStats, t: float, lo: float, hi: float) -> float:
    # g1(lo, t) > 0 > g1(hi, t) inside the bracket box.
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if _g_pair(stats, mid, t)[0] > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return math.sqrt(lo * hi)


def _bisect_g2(stats: _SplitStats, s: float, lo: float, hi: float) -> float:
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if _g_pair(stats, s, mid)[1] > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return math.sqrt(lo * hi)


def project_pair(
    inst: ProblemInstance,
    u: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 200,
    initial: tuple[float, float] | None = None,
) -> PairProjection:
    """Unique (s, t) with s*u+ + t*u- on the sign-changing Nehari set.

    Damped Newton on (g1, g2) with the analytic Jacobian, clamped into the
    bracketing box; alternating one-dimensional bisection is the fallback
    when a Newton step fails to reduce the residual.  Zero coupling makes
    the system decouple into two independent ray projections; the result
    is then flagged ``degenerate``.
    """
    u = inst.check_admissible(u)
    up, um = positive_part(u), negative_part(u)
    stats = _split_stats(inst, u)
    if stats.b_pos == 0.0 or stats.b_neg == 0.0:
        raise ValueError("pair projection needs both sign parts nontrivial")
    scale = stats.scale

    if stats.k >= 0.0:
        s = project_ray(inst, up)
        t = project_ray(inst, um)
        g1, g2 = _g_pair(stats, s, t)
        return PairProjection(
            s=s,
            t=t,
            projected=s * up + t * um,
            g1_residual=g1,
            g2_residual=g2,
            iterations=0,
            bracket=(min(s, t), max(s, t)),
            degenerate=True,
        )

    lo, hi = _bracket_from_stats(stats)
    if initial is not None:
        s, t = (min(max(float(v), lo), hi) for v in initial)
    else:
        s = t = min(max(1.0, lo), hi)

    def h(sv: float, tv: float) -> float:
        g1, g2 = _g_pair(stats, sv, tv)
        return g1 * g1 + g2 * g2

    for it in range(1, max_iter + 1):
        g1, g2 = _g_pair(stats, s, t)
        if max(abs(g1), abs(g2)) <= tol * scale:
            return PairProjection(
                s=s,
                t=t,
                projected=s * up + t * um,
                g1_residual=g1,
                g2_residual=g2,
                iterations=it - 1,
                bracket=(lo, hi),
            )
        jac = _g_jacobian(stats, s, t)
        step = None
        det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        if abs(det) > 1e-300:
            step = np.linalg.solve(jac, -np.array([g1, g2]))
        accepted = False
        if step is not None:
            h0 = g1 * g1 + g2 * g2
            alpha = 1.0
            # Demand a genuine decrease; otherwise hand over to the
            # globally convergent alternating bisection below.
            while alpha > 1e-4:
                cand_s = min(max(s + alpha * step[0], lo), hi)
                cand_t = min(max(t + alpha * step[1], lo), hi)
                if h(cand_s, cand_t) <= 0.5 * h0:
                    s, t = cand_s, cand_t
                    accepted = True
                    break
                alpha *= 0.5
        if not accepted:
            # Alternating bisection: each g has a unique root in its own
            # variable and both cross-derivatives are positive, so the
            # sweep is monotone and converges on its own.  Run it to
            # tolerance here; interleaving single sweeps with Newton can
            # cycle (a norm-decreasing Newton step may jump back across
            # the box).
            for _ in range(max_iter):
                s = _bisect_g1(stats, t, lo, hi)
                t = _bisect_g2(stats, s, lo, hi)
                g1, g2 = _g_pair(stats, s, t)
                if max(abs(g1), abs(g2)) <= tol * scale:
                    break

    g1, g2 = _g_pair(stats, s, t)
    if max(abs(g1), abs(g2)) <= tol * scale:
        return PairProjection(
            s=s,
            t=t,
            projected=s * up + t * um,
            g1_residual=g1,
            g2_residual=g2,
            iterations=max_iter,
            bracket=(lo, hi),
        )
    raise NonConvergence(
        f"pair projection stalled at |g|={max(abs(g1), abs(g2)):.3e} after {max_iter} iterations"
    )
