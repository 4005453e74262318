"""Numerical verification utilities.

Rejection sampling away from declared singular sets, relative residuals
of the defining equation and of its first-order factorization, fixed and
adaptive Runge-Kutta integration, conservation drift reports, finite
difference brackets and rank-based independence checks.  Everything is
deterministic given a sample seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .extension import DerivPair, recursion_term, recursion_term_closed
from .jets import EvaluationError, ScalarField
from .poisson import HamiltonianSystem, PoissonStructure, apply_xl2, base_flow

__all__ = [
    "RejectionError",
    "SampleSpec",
    "sample_points",
    "ResidualReport",
    "pde_residual",
    "FirstOrderReport",
    "first_order_residual",
    "Trajectory",
    "integrate",
    "ConservationReport",
    "conservation_report",
    "fd_gradient",
    "fd_bracket",
    "fd_bracket_normalized",
    "independence_rank",
    "recursion_closed_sweep",
]

_TINY = 1e-12


class RejectionError(Exception):
    """Rejection sampling could not find enough admissible points."""


@dataclass(frozen=True)
class SampleSpec:
    """A sampling request: box, point count, RNG seed, singular margin."""

    intervals: tuple[tuple[float, float], ...]
    count: int
    seed: int
    margin: float = 0.0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("sample count must be positive")
        if not self.intervals:
            raise ValueError("sampling needs at least one interval")
        for lo, hi in self.intervals:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"bad sampling interval ({lo}, {hi})")
        if self.margin < 0:
            raise ValueError("singular margin must be nonnegative")


def sample_points(spec: SampleSpec,
                  singular: Callable[[np.ndarray, float], bool] | None = None) -> np.ndarray:
    """Uniform points in the box, rejecting the margin-fattened singular set.

    Raises :class:`RejectionError` once more than 99 percent of a large
    trial budget has been rejected.
    """
    rng = np.random.default_rng(spec.seed)
    lo = np.array([iv[0] for iv in spec.intervals])
    hi = np.array([iv[1] for iv in spec.intervals])
    taken: list[np.ndarray] = []
    drawn = 0
    batch_size = max(64, spec.count)
    while len(taken) < spec.count:
        batch = lo + rng.uniform(size=(batch_size, len(lo))) * (hi - lo)
        drawn += batch_size
        for row in batch:
            if singular is None or not singular(row, spec.margin):
                taken.append(row)
                if len(taken) == spec.count:
                    break
        if drawn >= 100 * spec.count and len(taken) < 0.01 * drawn:
            rate = 100.0 * (1.0 - len(taken) / drawn)
            raise RejectionError(
                f"rejected {rate:.1f}% of {drawn} draws; "
                "singular set saturates the sampling box"
            )
    return np.array(taken)


@dataclass
class ResidualReport:
    """Per-point relative residuals of the defining equation."""

    residuals: np.ndarray
    points: np.ndarray
    skipped: int

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if len(self.residuals) else math.inf

    @property
    def mean_residual(self) -> float:
        return float(np.mean(self.residuals)) if len(self.residuals) else math.inf


def pde_residual(system: HamiltonianSystem, seed_field: ScalarField,
                 c: float, c0: float, spec: SampleSpec,
                 singular: Callable[[np.ndarray, float], bool] | None = None) -> ResidualReport:
    """Relative residual of X_L^2 G = -2 (c L + c0) G at sampled points.

    Residuals are |lhs - rhs| / (|lhs| + |rhs| + 1e-12).  Points where
    evaluation fails are skipped and counted.
    """
    pred = singular if singular is not None else seed_field.singular
    points = sample_points(spec, pred)
    vals = []
    kept = []
    skipped = 0
    for x in points:
        try:
            lhs = apply_xl2(system, seed_field, x)
            rhs = -2.0 * (c * system.hamiltonian.value(x) + c0) * seed_field.value(x)
        except EvaluationError:
            skipped += 1
            continue
        vals.append(abs(lhs - rhs) / (abs(lhs) + abs(rhs) + _TINY))
        kept.append(x)
    return ResidualReport(np.array(vals), np.array(kept), skipped)


@dataclass
class FirstOrderReport:
    """Residuals of the factorized first-order relation along the flow."""

    abs_residuals: np.ndarray
    rel_residuals: np.ndarray
    points: np.ndarray
    skipped: int

    @property
    def max_abs(self) -> float:
        return float(np.max(self.abs_residuals)) if len(self.abs_residuals) else math.inf

    @property
    def max_rel(self) -> float:
        return float(np.max(self.rel_residuals)) if len(self.rel_residuals) else math.inf


def first_order_residual(system: HamiltonianSystem, field_g: ScalarField,
                         c: float, c0: float, sign: int, spec: SampleSpec,
                         singular: Callable[[np.ndarray, float], bool] | None = None,
                         step: float = 1e-6) -> FirstOrderReport:
    """Residual of X_L G = sign * sqrt(-2 (c L + c0)) G at sampled points.

    The derivative along the flow is taken by a central difference over
    one tight Runge-Kutta step each way, so value-only fields
    (quadrature-backed ones included) are admissible.  Points where the
    radicand is negative for a real field, or where evaluation fails,
    are skipped and counted.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    points = sample_points(spec, singular)
    rhs_fn = base_flow(system)
    abs_vals, rel_vals, kept = [], [], []
    skipped = 0
    for x in points:
        try:
            g0 = field_g.value(x)
            xp = _rk4_step(rhs_fn, x, step)
            xm = _rk4_step(rhs_fn, x, -step)
            deriv = (field_g.value(xp) - field_g.value(xm)) / (2.0 * step)
            rad = -2.0 * (c * system.hamiltonian.value(x) + c0)
            if rad < 0 and field_g.codomain == "real":
                skipped += 1
                continue
            root = cmath_sqrt(rad) if rad < 0 else math.sqrt(rad)
            target = sign * root * g0
        except EvaluationError:
            skipped += 1
            continue
        a = abs(deriv - target)
        abs_vals.append(a)
        rel_vals.append(a / (abs(deriv) + abs(target) + _TINY))
        kept.append(x)
    return FirstOrderReport(np.array(abs_vals), np.array(rel_vals), np.array(kept), skipped)


def cmath_sqrt(v: float) -> complex:
    return complex(0.0, math.sqrt(-v)) if v < 0 else complex(math.sqrt(v))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    method: str
    truncated: bool = False
    reason: str = ""
    stats: dict = field(default_factory=dict)


def _rk4_step(rhs, y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# Fehlberg 4(5) tableau.
_FB = (
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_FB4 = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)
_FB5 = (16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)


def integrate(rhs: Callable[[np.ndarray], np.ndarray], y0, t_final: float,
              method: str = "rk4", dt: float = 1e-3, tol: float = 1e-10,
              dt_min: float = 1e-9, dt_max: float = 0.5) -> Trajectory:
    """Integrate y' = rhs(y) from 0 to ``t_final``.

    ``rk4`` takes fixed steps of size ``dt`` (the last step is shortened
    to land exactly on ``t_final``); ``rkf45`` is an embedded adaptive
    pair controlled by ``tol``.  A flow evaluation error or a non-finite
    state truncates the trajectory and records the reason.
    """
    y0 = np.asarray(y0, dtype=float)
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    if method == "rk4":
        return _integrate_rk4(rhs, y0, t_final, dt)
    if method == "rkf45":
        return _integrate_rkf45(rhs, y0, t_final, dt, tol, dt_min, dt_max)
    raise ValueError(f"unknown integration method {method!r}")


def _integrate_rk4(rhs, y0, t_final, dt) -> Trajectory:
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = max(1, int(math.ceil(t_final / dt - 1e-12)))
    times = [0.0]
    states = [y0]
    y = y0
    t = 0.0
    truncated = False
    reason = ""
    for i in range(n_steps):
        h = min(dt, t_final - t)
        try:
            y = _rk4_step(rhs, y, h)
        except EvaluationError as e:
            truncated, reason = True, f"flow evaluation failed at t = {t:.6g}: {e}"
            break
        if not np.all(np.isfinite(y)):
            truncated, reason = True, f"state became non-finite at t = {t + h:.6g}"
            break
        t += h
        times.append(t)
        states.append(y)
    return Trajectory(
        np.array(times), np.array(states), "rk4", truncated, reason,
        stats={"n_steps": len(times) - 1},
    )


def _integrate_rkf45(rhs, y0, t_final, dt, tol, dt_min, dt_max) -> Trajectory:
    times = [0.0]
    states = [y0]
    y = y0
    t = 0.0
    h = min(dt, t_final)
    accepted = 0
    rejected = 0
    truncated = False
    reason = ""
    while t < t_final - 1e-14 * t_final:
        h = min(h, t_final - t)
        try:
            k1 = rhs(y)
            k2 = rhs(y + h * _FB[0][0] * k1)
            k3 = rhs(y + h * (_FB[1][0] * k1 + _FB[1][1] * k2))
            k4 = rhs(y + h * (_FB[2][0] * k1 + _FB[2][1] * k2 + _FB[2][2] * k3))
            k5 = rhs(y + h * (_FB[3][0] * k1 + _FB[3][1] * k2 + _FB[3][2] * k3 + _FB[3][3] * k4))
            k6 = rhs(y + h * (_FB[4][0] * k1 + _FB[4][1] * k2 + _FB[4][2] * k3
                              + _FB[4][3] * k4 + _FB[4][4] * k5))
        except EvaluationError as e:
            truncated, reason = True, f"flow evaluation failed at t = {t:.6g}: {e}"
            break
        ks = (k1, k2, k3, k4, k5, k6)
        y4 = y + h * sum(b * k for b, k in zip(_FB4, ks))
        y5 = y + h * sum(b * k for b, k in zip(_FB5, ks))
        scale = tol * (1.0 + float(np.max(np.abs(y))))
        err = float(np.max(np.abs(y5 - y4)))
        if not math.isfinite(err):
            truncated, reason = True, f"step error became non-finite at t = {t:.6g}"
            break
        if err <= scale or h <= dt_min * (1 + 1e-12):
            t += h
            y = y5
            times.append(t)
            states.append(y)
            accepted += 1
            if not np.all(np.isfinite(y)):
                truncated, reason = True, f"state became non-finite at t = {t:.6g}"
                break
        else:
            rejected += 1
        factor = 0.9 * (scale / err) ** 0.2 if err > 0 else 5.0
        h = min(max(h * min(max(factor, 0.2), 5.0), dt_min), dt_max)
    return Trajectory(
        np.array(times), np.array(states), "rkf45", truncated, reason,
        stats={"n_accepted": accepted, "n_rejected": rejected},
    )


@dataclass
class ConservationReport:
    times: np.ndarray
    series: dict[str, np.ndarray]
    drifts: dict[str, float]


def conservation_report(traj: Trajectory, observables: dict[str, Callable],
                        stride: int = 1) -> ConservationReport:
    """Observable series along a trajectory and their relative drifts.

    Drift of O is max_t |O(t) - O(0)| / max(|O(0)|, 1e-12).  ``stride``
    subsamples the stored states; the final state is always included.
    """
    if stride < 1:
        raise ValueError("stride must be positive")
    n = len(traj.states)
    idx = list(range(0, n, stride))
    if idx[-1] != n - 1:
        idx.append(n - 1)
    times = traj.times[idx]
    series = {}
    drifts = {}
    for name, fn in observables.items():
        vals = np.array([fn(traj.states[i]) for i in idx])
        series[name] = vals
        ref = vals[0]
        drifts[name] = float(np.max(np.abs(vals - ref)) / max(abs(ref), _TINY))
    return ConservationReport(times, series, drifts)


def fd_gradient(fn: Callable, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a callable over flat vectors."""
    x = np.asarray(x, dtype=float)
    probe = fn(x)
    out = np.empty(len(x), dtype=complex if isinstance(probe, complex) else float)
    for i in range(len(x)):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        out[i] = (fn(xp) - fn(xm)) / (2.0 * h)
    return out


def fd_bracket(structure: PoissonStructure, f: Callable, g: Callable,
               x: np.ndarray, h: float = 1e-5):
    """{F, G} at ``x`` with both gradients by central differences."""
    gf = fd_gradient(f, x, h)
    gg = fd_gradient(g, x, h)
    return gf @ structure.matrix(x) @ gg


def fd_bracket_normalized(structure: PoissonStructure, f: Callable, g: Callable,
                          x: np.ndarray, h: float = 1e-5) -> float:
    """|{F, G}| scaled by the gradient sizes and the bivector norm."""
    gf = fd_gradient(f, x, h)
    gg = fd_gradient(g, x, h)
    pi = structure.matrix(x)
    val = abs(gf @ pi @ gg)
    scale = float(np.linalg.norm(gf) * np.linalg.norm(np.asarray(pi, dtype=float), 2)
                  * np.linalg.norm(gg))
    return val / (scale + _TINY)


def independence_rank(fns: Sequence[Callable], states: Sequence[np.ndarray],
                      h: float = 1e-5, threshold: float = 1e-6) -> int:
    """Minimum over states of the numerical rank of the gradient stack.

    Gradients come from central differences; singular values below
    ``threshold`` times the largest are treated as zero.  A complex
    observable whose imaginary gradient is negligible contributes its
    real part only; otherwise real and imaginary parts each get a row.
    """
    best = None
    for x in states:
        rows = []
        for fn in fns:
            gr = fd_gradient(fn, x, h)
            if np.iscomplexobj(gr):
                scale = float(np.max(np.abs(gr))) or 1.0
                rows.append(gr.real)
                if float(np.max(np.abs(gr.imag))) > 1e-12 * scale:
                    rows.append(gr.imag)
            else:
                rows.append(gr)
        sv = np.linalg.svd(np.array(rows), compute_uv=False)
        rank = int(np.sum(sv > threshold * sv[0])) if sv[0] > 0 else 0
        best = rank if best is None else min(best, rank)
    if best is None:
        raise ValueError("independence_rank needs at least one state")
    return best


def recursion_closed_sweep(n_max: int, count_real: int, count_complex: int,
                           seed: int) -> dict:
    """Compare recursive and closed chain members on random triples.

    Returns the worst relative disagreement overall and per index, over
    ``count_real`` real and ``count_complex`` complex (G, X_L G, lam)
    triples drawn deterministically from ``seed``.
    """
    rng = np.random.default_rng(seed)
    triples = []
    for _ in range(count_real):
        g, xg, lam = rng.uniform(-2.0, 2.0, size=3)
        triples.append((float(g), float(xg), float(lam)))
    for _ in range(count_complex):
        v = rng.uniform(-1.0, 1.0, size=6)
        triples.append((complex(v[0], v[1]), complex(v[2], v[3]), complex(v[4], v[5])))
    per_n = {}
    for n in range(1, n_max + 1):
        worst = 0.0
        for g, xg, lam in triples:
            pair = DerivPair(g, xg)
            a = recursion_term(n, pair, lam)
            b = recursion_term_closed(n, pair, lam)
            for u, v in ((a.value, b.value), (a.xl, b.xl)):
                worst = max(worst, abs(u - v) / (abs(u) + abs(v) + _TINY))
        per_n[n] = worst
    return {"max_rel": max(per_n.values()), "per_n": per_n}
