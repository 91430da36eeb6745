"""Arithmetic in the group ring K[G], K = R or C.

An element is a dense coefficient vector indexed by group-element id. Both
fields share one complex128 code path; REAL mode only guarantees the
imaginary parts are exactly zero.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from numbers import Number

import numpy as np

from .errors import IncompatibleOperandsError, InvalidParameterError
from .groups import Automorphism, FiniteGroup

TOL = 1e-12


class FieldMode(str, enum.Enum):
    REAL = "real"
    COMPLEX = "complex"


def _coerce_mode(mode) -> FieldMode:
    try:
        return FieldMode(mode)
    except ValueError:
        raise InvalidParameterError(f"field mode must be 'real' or 'complex', got {mode!r}") from None


@dataclass(frozen=True, eq=False)
class GroupRingElement:
    group: FiniteGroup
    coeffs: np.ndarray
    mode: FieldMode = FieldMode.COMPLEX

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        if c.shape != (self.group.order,):
            raise InvalidParameterError(f"expected {self.group.order} coefficients, got {c.size}")
        mode = _coerce_mode(self.mode)
        if mode is FieldMode.REAL and np.any(c.imag != 0):
            raise InvalidParameterError("REAL-mode element has non-zero imaginary parts")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "mode", mode)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(-1.0, other))

    def __neg__(self):
        return scale(-1.0, self)

    def __mul__(self, other):
        if isinstance(other, GroupRingElement):
            return mul(self, other)
        if isinstance(other, Number):
            return scale(other, self)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return scale(other, self)
        return NotImplemented

    def __getitem__(self, g):
        if isinstance(g, str):
            g = self.group.index(g)
        return self.coeffs[g]

    def allclose(self, other: "GroupRingElement", tol: float = TOL) -> bool:
        _check_compatible(self, other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= tol)

    @property
    def real(self) -> np.ndarray:
        return self.coeffs.real.copy()

    def __repr__(self) -> str:
        terms = [f"({c:.6g}){n}" for c, n in zip(self.coeffs, self.group.names) if c != 0]
        return " + ".join(terms) or "0"


def element(group: FiniteGroup, coeffs, mode=None) -> GroupRingElement:
    """Wrap coefficients; the mode defaults to REAL when every entry is real."""
    c = np.asarray(coeffs)
    if mode is None:
        mode = FieldMode.COMPLEX if np.iscomplexobj(c) and np.any(c.imag != 0) else FieldMode.REAL
    return GroupRingElement(group, c, mode)


def zero(group: FiniteGroup, mode=FieldMode.REAL) -> GroupRingElement:
    return GroupRingElement(group, np.zeros(group.order), mode)


def basis(group: FiniteGroup, g, mode=FieldMode.REAL) -> GroupRingElement:
    if isinstance(g, str):
        g = group.index(g)
    c = np.zeros(group.order)
    c[g] = 1.0
    return GroupRingElement(group, c, mode)


def one(group: FiniteGroup, mode=FieldMode.REAL) -> GroupRingElement:
    return basis(group, 0, mode)


def _check_compatible(x: GroupRingElement, y: GroupRingElement) -> None:
    if x.group is not y.group and not x.group.same_table(y.group):
        raise IncompatibleOperandsError("operands live in different group rings")
    if x.mode is not y.mode:
        raise IncompatibleOperandsError(f"field modes differ: {x.mode.value} vs {y.mode.value}")


def add(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    _check_compatible(x, y)
    return GroupRingElement(x.group, x.coeffs + y.coeffs, x.mode)


def scale(lam, x: GroupRingElement) -> GroupRingElement:
    lam = complex(lam)
    if x.mode is FieldMode.REAL:
        if lam.imag != 0:
            raise InvalidParameterError("cannot scale a REAL-mode element by a complex scalar")
        return GroupRingElement(x.group, lam.real * x.coeffs, x.mode)
    return GroupRingElement(x.group, lam * x.coeffs, x.mode)


def mul(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    """Group convolution: out[k] = sum of x[i] y[j] over cayley[i, j] == k."""
    _check_compatible(x, y)
    out = np.zeros(x.group.order, dtype=np.complex128)
    np.add.at(out, x.group.cayley.ravel(), np.outer(x.coeffs, y.coeffs).ravel())
    return GroupRingElement(x.group, out, x.mode)


def dagger(x: GroupRingElement) -> GroupRingElement:
    """Hermitian conjugate: conjugate the coefficients and invert the indices."""
    out = np.empty_like(x.coeffs)
    out[x.group.inverse] = np.conj(x.coeffs)
    return GroupRingElement(x.group, out, x.mode)


def trace(x: GroupRingElement) -> complex:
    return complex(x.coeffs[0])


def inner(x: GroupRingElement, y: GroupRingElement) -> complex:
    _check_compatible(x, y)
    return complex(np.vdot(x.coeffs, y.coeffs))


def norm(x: GroupRingElement) -> float:
    return float(np.sqrt(np.vdot(x.coeffs, x.coeffs).real))


def amat(group: FiniteGroup, g: int) -> np.ndarray:
    """Permutation matrix with a 1 at (g1, g2) exactly when g1 * g2^-1 == g."""
    quot = group.cayley[:, group.inverse]  # quot[g1, g2] = g1 * g2^-1
    return (quot == int(g)).astype(np.int64)


@dataclass(frozen=True, eq=False)
class SkewObject:
    group: FiniteGroup
    g: int
    matrix: np.ndarray

    @property
    def is_zero(self) -> bool:
        return not self.matrix.any()


def skew(group: FiniteGroup, g: int) -> SkewObject:
    m = amat(group, g) - amat(group, group.inv(g))
    m.setflags(write=False)
    return SkewObject(group, int(g), m)


def act_row(x: GroupRingElement, m) -> GroupRingElement:
    """Row vector times matrix: out[j] = sum_i x[i] m[i, j]."""
    m = np.asarray(m)
    n = x.group.order
    if m.shape != (n, n):
        raise InvalidParameterError(f"matrix shape {m.shape} does not match group order {n}")
    out = x.coeffs @ m
    if x.mode is FieldMode.REAL and np.iscomplexobj(m) and np.any(m.imag != 0):
        raise InvalidParameterError("complex matrix applied to a REAL-mode element")
    return GroupRingElement(x.group, out, x.mode)


def extend_automorphism(phi: Automorphism, x: GroupRingElement) -> GroupRingElement:
    """Linear extension of a group automorphism: out[phi(g)] = x[g]."""
    if phi.group is not x.group and not phi.group.same_table(x.group):
        raise IncompatibleOperandsError("automorphism and element belong to different groups")
    out = np.empty_like(x.coeffs)
    out[phi.perm] = x.coeffs
    return GroupRingElement(x.group, out, x.mode)


def random_element(group: FiniteGroup, rng: np.random.Generator, mode=FieldMode.COMPLEX, unit: bool = False) -> GroupRingElement:
    mode = _coerce_mode(mode)
    c = rng.standard_normal(group.order)
    if mode is FieldMode.COMPLEX:
        c = c + 1j * rng.standard_normal(group.order)
    if unit:
        c = c / np.linalg.norm(c)
    return GroupRingElement(group, c, mode)
