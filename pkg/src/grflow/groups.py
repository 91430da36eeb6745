"""Finite groups stored as Cayley tables.

Elements are integer ids ``0 .. order-1`` and id 0 is always the identity.
Every constructor validates the group axioms eagerly; associativity is checked
exhaustively up to order 64 and by random sampling above that.
"""
from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import GroupAxiomError, InvalidParameterError, SpecSyntaxError

EXHAUSTIVE_ASSOC_LIMIT = 64


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table.

    ``cayley[i, j]`` is the id of ``g_i * g_j``. ``spec`` is the group-spec
    string that rebuilds this group (see :func:`parse_group_spec`).
    """

    cayley: np.ndarray
    names: tuple[str, ...]
    spec: str = ""
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        table = _frozen(self.cayley)
        object.__setattr__(self, "cayley", table)
        object.__setattr__(self, "names", tuple(str(s) for s in self.names))
        object.__setattr__(self, "inverse", _validate(table, len(self.names)))

    @property
    def order(self) -> int:
        return self.cayley.shape[0]

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup({self.spec or '<table>'}, order={self.order})"

    def mul(self, i: int, j: int) -> int:
        return int(self.cayley[i, j])

    def inv(self, i: int) -> int:
        return int(self.inverse[i])

    def power(self, g: int, n: int) -> int:
        """g**n for any integer n (negative powers go through the inverse)."""
        if n < 0:
            g, n = self.inv(g), -n
        out, base = 0, g
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != 0:
            x = self.mul(x, g)
            k += 1
        return k

    def order_census(self) -> Counter:
        return Counter(self.element_order(g) for g in range(self.order))

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.cayley, self.cayley.T))

    def index(self, name: str) -> int:
        return self.names.index(name)

    def same_table(self, other: "FiniteGroup") -> bool:
        return bool(np.array_equal(self.cayley, other.cayley))


def _validate(table: np.ndarray, n_names: int) -> np.ndarray:
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise GroupAxiomError("closure", f"table must be a non-empty square array, got shape {table.shape}")
    n = table.shape[0]
    if n_names != n:
        raise InvalidParameterError(f"expected {n} element names, got {n_names}")
    if table.min() < 0 or table.max() >= n:
        raise GroupAxiomError("closure", "entries must be ids in [0, |G|)")
    ids = np.arange(n)
    if not (np.array_equal(table[0], ids) and np.array_equal(table[:, 0], ids)):
        raise GroupAxiomError("identity", "id 0 must act as the identity on both sides")
    srt = np.sort(table, axis=1)
    if not (srt == ids).all():
        bad = int(np.flatnonzero(~(srt == ids).all(axis=1))[0])
        raise GroupAxiomError("inverse", f"row {bad} is not a permutation (no unique right inverse)")
    srt = np.sort(table, axis=0)
    if not (srt == ids[:, None]).all():
        bad = int(np.flatnonzero(~(srt == ids[:, None]).all(axis=0))[0])
        raise GroupAxiomError("inverse", f"column {bad} is not a permutation (no unique left inverse)")
    right_inv = np.argmax(table == 0, axis=1)
    left_inv = np.argmax(table == 0, axis=0)
    if not np.array_equal(right_inv, left_inv):
        bad = int(np.flatnonzero(right_inv != left_inv)[0])
        raise GroupAxiomError("inverse", f"element {bad} has different left and right inverses")
    if n <= EXHAUSTIVE_ASSOC_LIMIT:
        lhs = table[table[:, :, None], ids[None, None, :]]  # (ij)k
        rhs = table[ids[:, None, None], table[None, :, :]]  # i(jk)
        ok = lhs == rhs
        if not ok.all():
            i, j, k = (int(v) for v in np.argwhere(~ok)[0])
            raise GroupAxiomError("associativity", f"({i}*{j})*{k} != {i}*({j}*{k})")
    else:
        rng = np.random.default_rng(0)
        m = 10 * n * n
        i, j, k = rng.integers(0, n, size=(3, m))
        ok = table[table[i, j], k] == table[i, table[j, k]]
        if not ok.all():
            t = int(np.flatnonzero(~ok)[0])
            raise GroupAxiomError("associativity", f"({i[t]}*{j[t]})*{k[t]} != {i[t]}*({j[t]}*{k[t]})")
    return _frozen(right_inv)


# -- constructors -------------------------------------------------------------

def make_cyclic(n: int) -> FiniteGroup:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidParameterError(f"cyclic group order must be a positive integer, got {n!r}")
    n = int(n)
    ids = np.arange(n)
    table = (ids[:, None] + ids[None, :]) % n
    return FiniteGroup(table, tuple(str(i) for i in range(n)), spec=f"Z{n}")


def make_direct_product(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    """Componentwise product; element (i, j) gets id ``i*|G2| + j``."""
    n1, n2 = g1.order, g2.order
    a = np.arange(n1 * n2)
    i, j = a // n2, a % n2
    table = g1.cayley[i[:, None], i[None, :]] * n2 + g2.cayley[j[:, None], j[None, :]]
    names = tuple(f"({g1.names[p]},{g2.names[q]})" for p in range(n1) for q in range(n2))
    spec = f"{g1.spec}x{g2.spec}" if g1.spec and g2.spec and not g1.spec.startswith("@") and not g2.spec.startswith("@") else ""
    return FiniteGroup(table, names, spec=spec)


def make_dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n: ids 0..n-1 are r^k, ids n..2n-1 are r^k s."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidParameterError(f"dihedral group needs n >= 2, got {n!r}")
    n = int(n)
    # (r^a s^f)(r^b s^h) = r^(a + (-1)^f b) s^(f+h)
    a = np.arange(2 * n)
    rot, flip = a % n, a // n
    sign = np.where(flip == 1, -1, 1)
    new_rot = (rot[:, None] + sign[:, None] * rot[None, :]) % n
    new_flip = (flip[:, None] + flip[None, :]) % 2
    table = new_flip * n + new_rot

    def rname(k):
        return "" if k == 0 else ("r" if k == 1 else f"r^{k}")

    names = ["e"] + [rname(k) for k in range(1, n)] + [rname(k) + "s" for k in range(n)]
    return FiniteGroup(table, tuple(names), spec=f"D{n}")


def make_symmetric(n: int) -> FiniteGroup:
    """S_n with permutations in lexicographic order; ``(p*q)(x) = p(q(x))``."""
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= 5:
        raise InvalidParameterError(f"symmetric group needs n in [1, 5], got {n!r}")
    perms = list(itertools.permutations(range(n)))
    pos = {p: k for k, p in enumerate(perms)}
    table = [[pos[tuple(p[q[x]] for x in range(n))] for q in perms] for p in perms]
    names = ["e"] + ["".join(map(str, p)) for p in perms[1:]]
    return FiniteGroup(np.array(table), tuple(names), spec=f"S{n}")


def group_from_table(table: Sequence[Sequence[int]], names: Sequence[str] | None = None, spec: str = "") -> FiniteGroup:
    table = np.asarray(table, dtype=np.int64)
    if names is None:
        names = ["e"] + [f"g{k}" for k in range(1, table.shape[0])]
    return FiniteGroup(table, tuple(names), spec=spec)


# -- subgroups and cosets -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self):
        mem = tuple(sorted(set(int(m) for m in self.members)))
        object.__setattr__(self, "members", mem)
        s = set(mem)
        if 0 not in s:
            raise InvalidParameterError("subgroup must contain the identity")
        if any(self.parent.inv(m) not in s for m in mem) or any(
            self.parent.mul(a, b) not in s for a in mem for b in mem
        ):
            raise InvalidParameterError("members are not closed under the group operation")

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, g) -> bool:
        return int(g) in self.members


def cyclic_subgroup(group: FiniteGroup, g: int) -> Subgroup:
    members, x = [0], int(g)
    while x != 0:
        members.append(x)
        x = group.mul(x, g)
    return Subgroup(group, tuple(members))


def subgroup_of_square(group: FiniteGroup, g: int) -> Subgroup:
    """H(g) = <g^2>, the cyclic subgroup generated by g*g."""
    _check_id(group, g)
    return cyclic_subgroup(group, group.mul(g, g))


def right_cosets(group: FiniteGroup, h: Subgroup) -> list[tuple[int, ...]]:
    """Right cosets Hg as sorted tuples, ordered by their smallest member."""
    seen = np.zeros(group.order, dtype=bool)
    blocks = []
    mem = np.array(h.members)
    for k in range(group.order):
        if seen[k]:
            continue
        block = np.unique(group.cayley[mem, k])
        seen[block] = True
        blocks.append(tuple(int(b) for b in block))
    return blocks


# -- automorphisms ------------------------------------------------------------

def check_automorphism(group: FiniteGroup, perm: Sequence[int]) -> bool:
    p = np.asarray(perm, dtype=np.int64)
    if p.shape != (group.order,):
        raise InvalidParameterError(f"permutation length {p.size} does not match group order {group.order}")
    if not np.array_equal(np.sort(p), np.arange(group.order)):
        raise InvalidParameterError("not a permutation of the element ids")
    if p[0] != 0:
        return False
    return bool(np.array_equal(p[group.cayley], group.cayley[p[:, None], p[None, :]]))


@dataclass(frozen=True, eq=False)
class Automorphism:
    group: FiniteGroup
    perm: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "perm", _frozen(self.perm))
        if not check_automorphism(self.group, self.perm):
            raise InvalidParameterError("permutation is not a group automorphism")

    def __call__(self, g: int) -> int:
        return int(self.perm[g])

    @classmethod
    def identity(cls, group: FiniteGroup) -> "Automorphism":
        return cls(group, np.arange(group.order))

    @classmethod
    def inversion(cls, group: FiniteGroup) -> "Automorphism":
        """g -> g^-1; only an automorphism when the group is abelian."""
        return cls(group, group.inverse)

    @classmethod
    def conjugation(cls, group: FiniteGroup, h: int) -> "Automorphism":
        """Inner automorphism g -> h g h^-1."""
        perm = group.cayley[group.cayley[h, :], group.inv(h)]
        return cls(group, perm)


# -- group-spec mini-language -------------------------------------------------

_FACTOR = re.compile(r"([ZDS])(\d+)$")


def parse_group_spec(text: str) -> FiniteGroup:
    """Build a group from ``Z<n>``, ``D<n>``, ``S<n>``, ``AxB`` products or ``@file:<path>``."""
    text = text.strip()
    if text.startswith("@file:"):
        path = text[len("@file:"):]
        return read_cayley_file(path, spec=text)
    if not text:
        raise SpecSyntaxError("empty group spec")
    groups = []
    for part in text.split("x"):
        m = _FACTOR.match(part)
        if m is None:
            raise SpecSyntaxError(f"cannot parse group factor {part!r} in {text!r}")
        kind, n = m.group(1), int(m.group(2))
        groups.append({"Z": make_cyclic, "D": make_dihedral, "S": make_symmetric}[kind](n))
    out = groups[0]
    for g in groups[1:]:
        out = make_direct_product(out, g)
    return out


def render_group_spec(group: FiniteGroup) -> str:
    if not group.spec:
        raise InvalidParameterError("group has no spec string; write it with write_cayley_file")
    return group.spec


def read_cayley_file(path: str | Path, spec: str = "") -> FiniteGroup:
    """Read an explicit table.

    Format: optional ``#`` comments, a first line ``|G| = n``, an optional
    names line (prefixed ``names:`` or simply the extra line before the
    table), then n rows of n whitespace-separated zero-based ids.
    """
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise InvalidParameterError(f"cannot read Cayley table file {path}: {exc}") from exc
    lines = [ln.strip() for ln in raw.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise SpecSyntaxError(f"{path}: empty table file")
    m = re.fullmatch(r"\|G\|\s*=\s*(\d+)", lines[0])
    if m:
        n = int(m.group(1))
        lines = lines[1:]
    else:
        n = len(lines[0].split())
    names = None
    if lines and lines[0].startswith("names:"):
        names = lines[0][len("names:"):].split()
        lines = lines[1:]
    elif len(lines) == n + 1:
        names = lines[0].split()
        lines = lines[1:]
    if len(lines) != n:
        raise SpecSyntaxError(f"{path}: expected {n} table rows, found {len(lines)}")
    try:
        rows = [[int(tok) for tok in ln.split()] for ln in lines]
    except ValueError as exc:
        raise SpecSyntaxError(f"{path}: non-integer table entry ({exc})") from exc
    if any(len(r) != n for r in rows):
        raise SpecSyntaxError(f"{path}: every row must have {n} entries")
    return group_from_table(rows, names, spec=spec or f"@file:{path}")


def write_cayley_file(group: FiniteGroup, path: str | Path) -> None:
    body = [f"|G| = {group.order}", "names: " + " ".join(group.names)]
    body += [" ".join(str(int(v)) for v in row) for row in group.cayley]
    Path(path).write_text("\n".join(body) + "\n")


def _check_id(group: FiniteGroup, g) -> None:
    if not 0 <= int(g) < group.order:
        raise InvalidParameterError(f"element id {g} out of range for group of order {group.order}")


def corpus() -> list[FiniteGroup]:
    """Groups used by the exact nullity and inclusion checks."""
    specs = [f"Z{n}" for n in range(2, 13)] + ["Z2xZ2", "Z2xZ4", "D3", "D4", "S3", "S4"]
    return [parse_group_spec(s) for s in specs]


def gcd_nullity(m: int, n: int) -> int:
    """Closed form for cyclic groups: gcd(2m, n), with gcd(0, n) = n."""
    return math.gcd(2 * m, n)
