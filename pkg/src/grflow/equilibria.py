"""Equilibria of the aggregation flow over R[G].

A configuration is stationary iff x^c (x^i)^dagger = x^i (x^c)^dagger for every
agent. Over the reals the g-component of that defect is
``x^c (A^g - A^{g^-1}) (x^i)^T``, which splits the equilibrium set per group
element into three classes:

* label 0 (global): the centroid vanishes;
* label 1 at g: the centroid lies in the null space of A^g - A^{g^-1};
* label 2 at g: otherwise, but every agent is orthogonal to
  v(Y, g) = x^c (A^g - A^{g^-1}).

The null space of A^g - A^{g^-1} is spanned by indicator vectors of the right
cosets of H(g) = <g^2>; everything on that side is exact integer arithmetic.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .dynamics import Ensemble, centroid
from .errors import InvalidParameterError, UnsupportedModeError, WitnessUndefinedError
from .groups import FiniteGroup, right_cosets, subgroup_of_square
from .linalg import integer_rank, row_times
from .ring import FieldMode, dagger, mul, norm, skew

ANALYTIC_TOL = 1e-8
SIMULATED_TOL = 1e-6


def residual(ens: Ensemble) -> float:
    """max_i ||x^c (x^i)^dagger - x^i (x^c)^dagger||_F."""
    xc = centroid(ens)
    xcd = dagger(xc)
    return max(norm(mul(xc, dagger(x)) - mul(x, xcd)) for x in ens.agents)


# -- exact null spaces ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NullSpaceBasis:
    group: FiniteGroup
    g: int
    cosets: tuple[tuple[int, ...], ...]

    @property
    def nullity(self) -> int:
        return len(self.cosets)

    @property
    def basis(self) -> list[list[int]]:
        out = []
        for block in self.cosets:
            v = [0] * self.group.order
            for m in block:
                v[m] = 1
            out.append(v)
        return out

    def contains(self, x, tol: float = 0.0) -> bool:
        """Whether coefficients are constant on every coset block."""
        x = np.asarray(x)
        return all(np.ptp(x[list(b)]) <= tol for b in self.cosets)


def null_space(group: FiniteGroup, g: int) -> NullSpaceBasis:
    cosets = right_cosets(group, subgroup_of_square(group, g))
    return NullSpaceBasis(group, int(g), tuple(cosets))


def nullity_bruteforce(group: FiniteGroup, g: int) -> int:
    """|G| minus the exact rank of A^g - A^{g^-1}."""
    return group.order - integer_rank(skew(group, g).matrix.tolist())


def annihilates(group: FiniteGroup, basis: list[list[int]], h: int) -> bool:
    m = skew(group, h).matrix.tolist()
    return all(not any(row_times(b, m)) for b in basis)


def null_inclusion_check(group: FiniteGroup, g: int, n: int) -> bool:
    """Check that Null(A^g - A^{g^-1}) sits inside Null(A^{g^n} - A^{g^-n})."""
    return annihilates(group, null_space(group, g).basis, group.power(g, n))


# -- classification -------------------------------------------------------------

class Label(str, enum.Enum):
    GLOBAL_ZERO = "0-global"
    ONE = "1"
    TWO = "2"
    NONE = "none"


@dataclass
class ElementRecord:
    g: int
    g_name: str
    label: Label
    null_check_value: float
    max_orthogonality_defect: float
    witness: np.ndarray | None = None
    defects: np.ndarray | None = None

    def to_dict(self) -> dict:
        d = {
            "g": self.g,
            "g_name": self.g_name,
            "label": self.label.value,
            "null_check_value": self.null_check_value,
            "max_orthogonality_defect": self.max_orthogonality_defect,
        }
        if self.witness is not None:
            d["witness"] = self.witness.tolist()
        return d


@dataclass
class EquilibriumReport:
    residual: float
    tolerance: float
    global_zero: bool
    records: list[ElementRecord] = field(default_factory=list)

    @property
    def is_equilibrium(self) -> bool:
        return self.global_zero or all(r.label in (Label.ONE, Label.TWO) for r in self.records)

    @property
    def labels(self) -> dict[str, str]:
        if self.global_zero:
            return {r.g_name: Label.GLOBAL_ZERO.value for r in self.records}
        return {r.g_name: r.label.value for r in self.records}

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "tolerance": self.tolerance,
            "is_equilibrium": self.is_equilibrium,
            "global_zero": self.global_zero,
            "elements": [r.to_dict() for r in self.records],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _require_real(ens: Ensemble) -> None:
    if ens.mode is not FieldMode.REAL:
        raise UnsupportedModeError(
            "equilibrium classes are defined over R[G]; use residual() for COMPLEX states"
        )


def witness_vector(ens: Ensemble, g: int) -> np.ndarray:
    """v(Y, g) = x^c (A^g - A^{g^-1}) as a real row vector."""
    xc = ens.states.real.mean(axis=0)
    return xc @ skew(ens.group, g).matrix


def classify(ens: Ensemble, tol: float = ANALYTIC_TOL) -> EquilibriumReport:
    """Label each group element per the 0 / 1 / 2 decomposition.

    Precedence is global 0, then 1, then 2; an element that fits none of them
    gets ``Label.NONE`` and the state is not an equilibrium.
    """
    _require_real(ens)
    G = ens.group
    X = ens.states.real
    xc = X.mean(axis=0)
    report = EquilibriumReport(residual=residual(ens), tolerance=tol, global_zero=bool(np.linalg.norm(xc) <= tol))
    for g in range(G.order):
        v = witness_vector(ens, g)
        vnorm = float(np.linalg.norm(v))
        defects = np.abs(X @ v)
        worst = float(defects.max())
        if report.global_zero:
            label = Label.GLOBAL_ZERO
        elif vnorm <= tol:
            label = Label.ONE
        elif worst <= tol:
            label = Label.TWO
        else:
            label = Label.NONE
        rec = ElementRecord(g, G.names[g], label, vnorm, worst)
        if label is Label.TWO:
            rec.witness, rec.defects = v, defects
        report.records.append(rec)
    return report


@dataclass
class HyperplaneWitness:
    vector: np.ndarray
    defects: np.ndarray
    sphere_dim: int | None
    radius: float | None


def hyperplane_witness(ens: Ensemble, g: int, tol: float = ANALYTIC_TOL) -> HyperplaneWitness:
    """Normal vector v(Y, g) of a hyperplane through 0 holding every agent.

    When all agents share one norm r they also lie on the sphere of radius r
    inside that hyperplane, a (|G| - 2)-dimensional sphere.
    """
    rec = classify(ens, tol).records[g]
    if rec.label is not Label.TWO:
        raise WitnessUndefinedError(f"no hyperplane witness at {rec.g_name}: label is {rec.label.value}")
    norms = ens.norms()
    same = bool(np.ptp(norms) <= tol)
    return HyperplaneWitness(
        vector=rec.witness,
        defects=rec.defects,
        sphere_dim=ens.group.order - 2 if same else None,
        radius=float(norms.mean()) if same else None,
    )


# -- the Z3 picture -------------------------------------------------------------

class Z3Class(str, enum.Enum):
    E1 = "E1"  # zero centroid
    E2 = "E2"  # agents on a common great circle
    E3 = "E3"  # centroid parallel to (1, 1, 1)
    NONE = "none"


ONES3 = np.ones(3)
_Z3_TABLE = (np.arange(3)[:, None] + np.arange(3)[None, :]) % 3


def z3_classify(ens: Ensemble, tol: float = ANALYTIC_TOL) -> Z3Class:
    """Classify a real Z3 state through phi(x) = (x_e, x_a, x_{a^2}) in R^3."""
    if ens.group.order != 3 or not np.array_equal(ens.group.cayley, _Z3_TABLE):
        raise InvalidParameterError("z3_classify needs the group Z3")
    _require_real(ens)
    phi = ens.states.real
    pc = phi.mean(axis=0)
    if np.linalg.norm(pc) <= tol:
        return Z3Class.E1
    y = np.cross(ONES3, pc)
    if np.linalg.norm(y) <= tol:
        return Z3Class.E3
    if np.max(np.abs(phi @ y)) <= tol:
        return Z3Class.E2
    return Z3Class.NONE

