"""The first-order aggregation flow on K[G] and its Lyapunov diagnostics.

Each agent x^i in K[G] evolves by

    dx^i/dt = kappa * (x^c (x^i)^dagger x^i - x^i (x^c)^dagger x^i),

where x^c is the centroid. The flow keeps every ||x^i|| constant, so unit
initial data stay on the unit sphere, and V = mean pairwise squared distance
never increases.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .errors import DivergenceError, IncompatibleOperandsError, InvalidParameterError
from .groups import Automorphism, FiniteGroup
from .ring import FieldMode, GroupRingElement, _coerce_mode, dagger, mul

log = logging.getLogger(__name__)


def quotient_table(group: FiniteGroup) -> np.ndarray:
    """quot[a, b] = a * b^-1, contiguous for the compiled kernels."""
    return np.ascontiguousarray(group.cayley[:, group.inverse])


@dataclass(frozen=True, eq=False)
class Ensemble:
    """N agents in K[G] stored row-wise, plus the coupling strength."""

    group: FiniteGroup
    states: np.ndarray
    kappa: float = 1.0
    mode: FieldMode = FieldMode.COMPLEX

    def __post_init__(self):
        s = np.array(self.states, dtype=np.complex128)
        if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] != self.group.order:
            raise InvalidParameterError(
                f"states must have shape (N >= 1, {self.group.order}), got {s.shape}"
            )
        mode = _coerce_mode(self.mode)
        if mode is FieldMode.REAL and np.any(s.imag != 0):
            raise InvalidParameterError("REAL-mode ensemble has non-zero imaginary parts")
        kappa = float(self.kappa)
        if not kappa >= 0:
            raise InvalidParameterError(f"coupling strength kappa must be nonnegative, got {self.kappa}")
        s.setflags(write=False)
        object.__setattr__(self, "states", s)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "kappa", kappa)

    @classmethod
    def from_elements(cls, agents: Sequence[GroupRingElement], kappa: float = 1.0) -> "Ensemble":
        if not agents:
            raise InvalidParameterError("ensemble needs at least one agent")
        g, mode = agents[0].group, agents[0].mode
        for a in agents[1:]:
            if a.mode is not mode or not (a.group is g or a.group.same_table(g)):
                raise IncompatibleOperandsError("all agents must share one group and field mode")
        return cls(g, np.stack([a.coeffs for a in agents]), kappa, mode)

    @property
    def n_agents(self) -> int:
        return self.states.shape[0]

    @property
    def agents(self) -> list[GroupRingElement]:
        return [GroupRingElement(self.group, row, self.mode) for row in self.states]

    def with_states(self, states: np.ndarray) -> "Ensemble":
        return replace(self, states=states)

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)


def random_ensemble(
    group: FiniteGroup,
    n_agents: int,
    kappa: float = 1.0,
    mode=FieldMode.COMPLEX,
    seed: int | None = 0,
    rng: np.random.Generator | None = None,
) -> Ensemble:
    """Agents drawn uniformly from the unit sphere of coefficient space."""
    if n_agents < 1:
        raise InvalidParameterError("n_agents must be >= 1")
    mode = _coerce_mode(mode)
    rng = rng if rng is not None else np.random.default_rng(seed)
    s = rng.standard_normal((n_agents, group.order))
    if mode is FieldMode.COMPLEX:
        s = s + 1j * rng.standard_normal((n_agents, group.order))
    s = s / np.linalg.norm(s, axis=1, keepdims=True)
    return Ensemble(group, s, kappa, mode)


def centroid(ens: Ensemble) -> GroupRingElement:
    return GroupRingElement(ens.group, ens.states.mean(axis=0), ens.mode)


def rhs_array(ens: Ensemble) -> np.ndarray:
    out = np.empty_like(ens.states)
    _kernels.rhs(np.ascontiguousarray(ens.states), ens.group.cayley, quotient_table(ens.group), ens.kappa, out)
    return out


def rhs(ens: Ensemble) -> list[GroupRingElement]:
    """Velocity of every agent, built from ring operations."""
    xc = centroid(ens)
    xcd = dagger(xc)
    out = []
    for x in ens.agents:
        v = mul(mul(xc, dagger(x)), x) - mul(mul(x, xcd), x)
        out.append(v * ens.kappa)
    return out


def rhs_component(ens: Ensemble) -> list[np.ndarray]:
    """Same vector field from the coefficient-level triple sum.

    dx^i_g/dt = kappa * sum_{g1, g2} (x^c_{g1} conj(x^i_{g2}) - x^i_{g1} conj(x^c_{g2})) x^i_{g2 g1^-1 g}
    """
    G = ens.group
    n = G.order
    X = ens.states
    xc = X.mean(axis=0)
    out = []
    for x in X:
        v = np.zeros(n, dtype=np.complex128)
        for g in range(n):
            acc = 0j
            for g1 in range(n):
                g1inv_g = G.mul(G.inv(g1), g)
                for g2 in range(n):
                    w = x[G.mul(g2, g1inv_g)]
                    acc += (xc[g1] * np.conj(x[g2]) - x[g1] * np.conj(xc[g2])) * w
            v[g] = ens.kappa * acc
        out.append(v)
    return out


# -- diagnostics --------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostics:
    t: float
    R2: float
    V: float
    dissipation: float
    residual: float
    min_norm: float
    max_norm: float

    CSV_COLUMNS = ("t", "R2", "V", "dissipation", "residual", "min_norm", "max_norm")

    def row(self) -> tuple[float, ...]:
        return tuple(getattr(self, c) for c in self.CSV_COLUMNS)


def diagnostics(ens: Ensemble, t: float = 0.0) -> Diagnostics:
    vals = _kernels.diagnostics(np.ascontiguousarray(ens.states), quotient_table(ens.group), ens.kappa)
    return Diagnostics(float(t), *(float(v) for v in vals))


def order_parameter(ens: Ensemble) -> float:
    """R^2 = ||x^c||^2."""
    xc = ens.states.mean(axis=0)
    return float(np.vdot(xc, xc).real)


def variance(ens: Ensemble) -> float:
    """V = (1/N^2) sum_{i,j} ||x^i - x^j||^2."""
    X = ens.states
    diff = X[:, None, :] - X[None, :, :]
    return float(np.sum(np.abs(diff) ** 2) / ens.n_agents**2)


def dissipation(ens: Ensemble) -> float:
    """(2 kappa / N) sum_i ||x^c (x^i)^dagger - x^i (x^c)^dagger||^2, which equals -dV/dt."""
    xc = centroid(ens)
    xcd = dagger(xc)
    total = 0.0
    for x in ens.agents:
        d = mul(xc, dagger(x)) - mul(x, xcd)
        total += float(np.vdot(d.coeffs, d.coeffs).real)
    return 2.0 * ens.kappa / ens.n_agents * total


# -- time stepping ------------------------------------------------------------

@dataclass
class SimConfig:
    dt: float = 1e-3
    t_final: float = 10.0
    renormalize: bool = False
    record_every: int = 1
    seed: int = 0
    residual_tol: float = 1e-6
    converge_records: int = 100
    keep_states: bool = True

    def __post_init__(self):
        if not self.dt > 0 or not self.t_final > 0:
            raise InvalidParameterError("dt and t_final must be positive")
        if not self.dt < self.t_final:
            raise InvalidParameterError("dt must be smaller than t_final")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise InvalidParameterError("record_every must be a positive integer")
        self.record_every = int(self.record_every)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass
class Trajectory:
    """Recorded snapshots and diagnostics of one run.

    Iterating yields ``(Ensemble, Diagnostics)`` pairs. ``converged_at`` is the
    first recorded time that starts a run of ``converge_records`` consecutive
    records with residual below ``residual_tol`` (None if never).
    """

    initial: Ensemble
    records: list[Diagnostics]
    states: np.ndarray | None
    final: Ensemble
    converged_at: float | None = None

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[tuple[Ensemble, Diagnostics]]:
        if self.states is None:
            raise InvalidParameterError("trajectory was recorded without states (keep_states=False)")
        for s, d in zip(self.states, self.records):
            yield self.initial.with_states(s), d

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(d, name) for d in self.records])

    @property
    def times(self) -> np.ndarray:
        return self.column("t")


def step_rk4(ens: Ensemble, dt: float) -> Ensemble:
    X = np.array(ens.states, dtype=np.complex128)
    bad = _kernels.rk4(X, ens.group.cayley, quotient_table(ens.group), ens.kappa, float(dt), 1, False)
    if bad >= 0:
        raise DivergenceError(0)
    return _finish(ens, X)


def _finish(ens: Ensemble, X: np.ndarray) -> Ensemble:
    if ens.mode is FieldMode.REAL:
        X = X.real.astype(np.complex128)  # drops signed zeros only; RK4 on real data stays real
    return ens.with_states(X)


def simulate(ens: Ensemble, cfg: SimConfig) -> Trajectory:
    """Fixed-step RK4 from ``ens``; diagnostics every ``cfg.record_every`` steps.

    With ``cfg.renormalize`` each agent is projected to the unit sphere after
    every step; norms in the diagnostics are measured before that projection.
    """
    G = ens.group
    quot = quotient_table(G)
    X = np.array(ens.states, dtype=np.complex128)
    n_steps = cfg.n_steps
    k = cfg.record_every

    records = [diagnostics(ens, 0.0)]
    states = [X.copy()] if cfg.keep_states else None
    streak_start, streak, converged_at = None, 0, None

    def track(d: Diagnostics):
        nonlocal streak_start, streak, converged_at
        if d.residual < cfg.residual_tol:
            if streak == 0:
                streak_start = d.t
            streak += 1
            if streak >= cfg.converge_records and converged_at is None:
                converged_at = streak_start
        else:
            streak = 0

    track(records[0])
    done = 0
    while done < n_steps:
        chunk = min(k, n_steps - done)
        if chunk > 1:
            bad = _kernels.rk4(X, G.cayley, quot, ens.kappa, cfg.dt, chunk - 1, cfg.renormalize)
            if bad >= 0:
                raise DivergenceError(done + bad)
        bad = _kernels.rk4(X, G.cayley, quot, ens.kappa, cfg.dt, 1, False)
        if bad >= 0:
            raise DivergenceError(done + chunk - 1)
        done += chunk
        vals = _kernels.diagnostics(X, quot, ens.kappa)
        d = Diagnostics(done * cfg.dt, *(float(v) for v in vals))
        if cfg.renormalize:
            X /= np.linalg.norm(X, axis=1, keepdims=True)
        records.append(d)
        track(d)
        if states is not None:
            states.append(X.copy())
        if log.isEnabledFor(logging.DEBUG) and len(records) % 1000 == 0:
            log.debug("t=%.4g R2=%.6g residual=%.3g", d.t, d.R2, d.residual)

    final = _finish(ens, X)
    arr = np.stack(states) if states is not None else None
    return Trajectory(ens, records, arr, final, converged_at)


# -- Kuramoto reduction -------------------------------------------------------

def kuramoto_reduce(ens: Ensemble, t_final: float, dt: float) -> np.ndarray:
    """Phases of the equivalent identical-oscillator Kuramoto model.

    Over the trivial group every agent is a single complex number e^{i theta};
    the flow reduces to dtheta_i/dt = (2 kappa / N) sum_k sin(theta_k - theta_i).
    Returns an array of shape (n_steps + 1, N).
    """
    if ens.group.order != 1:
        raise InvalidParameterError("Kuramoto reduction needs the trivial group Z1")
    if ens.mode is not FieldMode.COMPLEX:
        raise InvalidParameterError("Kuramoto reduction needs COMPLEX mode")
    z = ens.states[:, 0]
    mag = np.abs(z)
    if np.any(mag == 0):
        raise InvalidParameterError("zero-magnitude agent has no phase")
    if np.any(np.abs(mag - 1) > 1e-9):
        raise InvalidParameterError("Kuramoto reduction needs unit-magnitude agents")
    n_steps = int(round(t_final / dt))
    out = np.empty((n_steps + 1, ens.n_agents))
    _kernels.kuramoto_rk4(np.angle(z), ens.kappa, float(dt), n_steps, out)
    return out


def wrap_phase(a):
    """Map angles to (-pi, pi]."""
    return np.angle(np.exp(1j * np.asarray(a)))


def map_ensemble(phi: Automorphism, ens: Ensemble) -> Ensemble:
    out = np.empty_like(ens.states)
    out[:, phi.perm] = ens.states
    return ens.with_states(out)
