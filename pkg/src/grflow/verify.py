"""Runnable invariant suites behind ``grflow verify``.

Every check reports its worst-case defect next to the tolerance it is held to.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import dynamics as dyn
from . import equilibria as eq
from . import ring
from .groups import Automorphism, FiniteGroup
from .ring import FieldMode


@dataclass
class Check:
    name: str
    defect: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.defect <= self.tol

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: worst defect {self.defect:.3e} (tol {self.tol:.1e})"


def _maxdiff(a: ring.GroupRingElement, b: ring.GroupRingElement) -> float:
    return float(np.max(np.abs(a.coeffs - b.coeffs)))


def ring_suite(group: FiniteGroup, trials: int = 100, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    tol = 1e-12
    worst: dict[str, float] = {}

    def note(name, val):
        worst[name] = max(worst.get(name, 0.0), float(val))

    e = ring.one(group, FieldMode.COMPLEX)
    # inversion is an automorphism only for abelian groups; otherwise conjugate
    phi = Automorphism.inversion(group) if group.is_abelian() else Automorphism.conjugation(group, 1)
    for _ in range(trials):
        x, y, z = (ring.random_element(group, rng, FieldMode.COMPLEX, unit=True) for _ in range(3))
        note("mul associativity", _maxdiff((x * y) * z, x * (y * z)))
        note("left distributivity", _maxdiff(x * (y + z), x * y + x * z))
        note("right distributivity", _maxdiff((x + y) * z, x * z + y * z))
        note("two-sided unit", max(_maxdiff(e * x, x), _maxdiff(x * e, x)))
        note("(xy)^dagger = y^dagger x^dagger", _maxdiff(ring.dagger(x * y), ring.dagger(y) * ring.dagger(x)))
        note("tr(xy) = tr(yx)", abs(ring.trace(x * y) - ring.trace(y * x)))
        note("<x,y> = tr(x^dagger y)", abs(ring.inner(x, y) - ring.trace(ring.dagger(x) * y)))
        note("Cauchy-Schwarz", max(0.0, abs(ring.inner(x, y)) - ring.norm(x) * ring.norm(y)))
        note("dagger isometric involution",
             max(_maxdiff(ring.dagger(ring.dagger(x)), x), abs(ring.norm(ring.dagger(x)) - ring.norm(x))))
        xyd = x * ring.dagger(y)
        via_a = [x.coeffs @ ring.amat(group, g) @ np.conj(y.coeffs) for g in range(group.order)]
        note("(x y^dagger)_g = x A^g conj(y)", np.max(np.abs(xyd.coeffs - np.array(via_a))))
        if group.order > 1:
            fx, fy = ring.extend_automorphism(phi, x), ring.extend_automorphism(phi, y)
            note("phi(xy) = phi(x) phi(y)", _maxdiff(ring.extend_automorphism(phi, x * y), fx * fy))
            note("phi(x^dagger) = phi(x)^dagger", _maxdiff(ring.extend_automorphism(phi, ring.dagger(x)), ring.dagger(fx)))

    mats = [ring.amat(group, g) for g in range(group.order)]
    perm_ok = all((m.sum(0) == 1).all() and (m.sum(1) == 1).all() for m in mats)
    distinct = len({m.tobytes() for m in mats}) == group.order
    transpose = all(np.array_equal(mats[g].T, mats[group.inv(g)]) for g in range(group.order))
    hom = all(
        np.array_equal(mats[g] @ mats[h], mats[group.mul(g, h)])
        for g in range(group.order) for h in range(group.order)
    )
    checks = [Check(k, v, tol) for k, v in worst.items()]
    checks.append(Check("A^g permutation, distinct, (A^g)^T = A^{g^-1}, A^g A^h = A^{gh}",
                        0.0 if (perm_ok and distinct and transpose and hom) else 1.0, 0.0))
    return checks


def dynamics_suite(group: FiniteGroup, trials: int = 10, seed: int = 0, t_final: float = 10.0,
                   dt: float = 1e-3, n_agents: int = 5) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    worst = 0.0
    for _ in range(trials):
        ens = dyn.random_ensemble(group, 4, kappa=1.0, mode=FieldMode.COMPLEX, rng=rng)
        a = dyn.rhs_array(ens)
        b = np.array(dyn.rhs_component(ens))
        worst = max(worst, float(np.max(np.abs(a - b))))
    checks.append(Check("vector field = coefficient triple-sum form", worst, 1e-12))

    ens = dyn.random_ensemble(group, n_agents, kappa=1.0, mode=FieldMode.COMPLEX, rng=rng)
    traj = dyn.simulate(ens, dyn.SimConfig(dt=dt, t_final=t_final, keep_states=False))
    lo, hi = traj.column("min_norm"), traj.column("max_norm")
    checks.append(Check("norm conservation | ||x^i|| - 1 |", float(max(np.abs(lo - 1).max(), np.abs(hi - 1).max())), 1e-8))
    V, R2, diss, t = traj.column("V"), traj.column("R2"), traj.column("dissipation"), traj.times
    checks.append(Check("V non-increasing (largest per-step increase)", max(0.0, float(np.diff(V).max())), 1e-9))
    checks.append(Check("V = 2 - 2 R^2", float(np.abs(V - (2 - 2 * R2)).max()), 1e-10))
    dVdt = (V[2:] - V[:-2]) / (t[2:] - t[:-2])
    mask = np.abs(dVdt) > 1e-6
    rel = np.abs(dVdt[mask] + diss[1:-1][mask]) / np.abs(dVdt[mask]) if mask.any() else np.zeros(1)
    checks.append(Check("dV/dt = -dissipation (relative, central differences)", float(rel.max()), 1e-4))
    dR2 = np.diff(R2)
    checks.append(Check("R^2 non-decreasing", max(0.0, float(-dR2.min())), 1e-9))

    if group.is_abelian():
        phi = Automorphism.inversion(group)
        cfg = dyn.SimConfig(dt=dt, t_final=t_final, keep_states=False)
        a = dyn.map_ensemble(phi, dyn.simulate(ens, cfg).final).states
        b = dyn.simulate(dyn.map_ensemble(phi, ens), cfg).final.states
        checks.append(Check("automorphism equivariance (inversion)", float(np.abs(a - b).max()), 1e-8))
    return checks


def equilibria_suite(group: FiniteGroup, trials: int = 100, seed: int = 0) -> list[Check]:
    from .groups import gcd_nullity, make_cyclic

    checks = []
    bad = 0
    for g in range(group.order):
        ns = eq.null_space(group, g)
        h = len(ns.cosets[0])
        if not (ns.nullity == eq.nullity_bruteforce(group, g) == group.order // h):
            bad += 1
        if not eq.annihilates(group, ns.basis, g):
            bad += 1
    checks.append(Check("coset nullity = exact-rank nullity = |G|/|H(g)|; basis annihilated", float(bad), 0.0))

    if group.spec.startswith("Z") and "x" not in group.spec and group.same_table(make_cyclic(group.order)):
        n = group.order
        miss = sum(eq.null_space(group, m).nullity != gcd_nullity(m, n) for m in range(n))
        checks.append(Check("cyclic nullity = gcd(2m, n)", float(miss), 0.0))

    miss = sum(not eq.null_inclusion_check(group, g, k) for g in range(group.order) for k in range(-6, 7))
    checks.append(Check("Null(A^g - A^{g^-1}) within Null(A^{g^n} - A^{g^-n}), n in [-6, 6]", float(miss), 0.0))

    rng = np.random.default_rng(seed)
    disagree = 0
    for _ in range(trials):
        ens = dyn.random_ensemble(group, 3, mode=FieldMode.REAL, rng=rng)
        rep = eq.classify(ens, eq.ANALYTIC_TOL)
        disagree += rep.is_equilibrium != (rep.residual <= eq.ANALYTIC_TOL)
    checks.append(Check("classify agrees with residual on random states", float(disagree), 0.0))

    ens = dyn.random_ensemble(group, 4, mode=FieldMode.REAL, rng=rng)
    end = dyn.simulate(ens, dyn.SimConfig(dt=1e-2, t_final=200.0, record_every=100, keep_states=False)).final
    rep = eq.classify(end, eq.SIMULATED_TOL)
    checks.append(Check("simulated end state accepted by classify (residual)", rep.residual if rep.is_equilibrium else math.inf, eq.SIMULATED_TOL))
    return checks


SUITES: dict[str, Callable[..., list[Check]]] = {
    "ring": ring_suite,
    "dynamics": dynamics_suite,
    "equilibria": equilibria_suite,
}


def run(group: FiniteGroup, suite: str = "all", trials: int | None = None, seed: int = 0) -> list[tuple[str, Check]]:
    names = list(SUITES) if suite == "all" else [suite]
    out = []
    for name in names:
        kw = {"seed": seed}
        if trials is not None:
            kw["trials"] = trials
        out += [(name, c) for c in SUITES[name](group, **kw)]
    return out
