import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from grflow import dynamics as dyn
from grflow import equilibria as eq
from grflow.errors import InvalidParameterError, UnsupportedModeError, WitnessUndefinedError
from grflow.groups import corpus, gcd_nullity, make_cyclic, parse_group_spec, subgroup_of_square
from grflow.ring import skew

CORPUS = corpus()
CORPUS_IDS = [g.spec for g in CORPUS]
ONES3 = np.ones(3)
LABEL_TWO_Z3 = [ONES3 / np.sqrt(3), np.array([1.0, -1.0, 0.0]) / np.sqrt(2)]


def real_ens(spec, rows, kappa=1.0):
    return dyn.Ensemble(parse_group_spec(spec), np.asarray(rows, dtype=float), kappa, "real")


# -- null spaces ----------------------------------------------------------------

def test_null_space_examples():
    z6 = make_cyclic(6)
    ns = eq.null_space(z6, 1)
    assert ns.cosets == ((0, 2, 4), (1, 3, 5))
    assert ns.nullity == 2
    assert ns.basis == [[1, 0, 1, 0, 1, 0], [0, 1, 0, 1, 0, 1]]
    assert eq.null_space(make_cyclic(5), 1).nullity == 1
    for g in CORPUS:
        assert eq.null_space(g, 0).nullity == g.order


def test_contains():
    ns = eq.null_space(make_cyclic(6), 1)
    assert ns.contains([2, -1, 2, -1, 2, -1])
    assert not ns.contains([1, 0, 0, 0, 0, 0])


@pytest.mark.parametrize("group", CORPUS, ids=CORPUS_IDS)
def test_coset_nullity_matches_elimination(group):
    for g in range(group.order):
        ns = eq.null_space(group, g)
        assert ns.nullity == eq.nullity_bruteforce(group, g)
        assert ns.nullity == group.order // subgroup_of_square(group, g).order
        assert eq.annihilates(group, ns.basis, g)


def test_gcd_table():
    for n in range(2, 13):
        g = make_cyclic(n)
        assert [eq.nullity_bruteforce(g, m) for m in range(n)] == [gcd_nullity(m, n) for m in range(n)]
    assert [gcd_nullity(m, 6) for m in range(6)] == [6, 2, 2, 6, 2, 2]


def test_elementary_abelian_two_groups_have_full_nullity():
    for spec in ["Z2", "Z2xZ2", "Z2xZ2xZ2"]:
        g = parse_group_spec(spec)
        assert all(skew(g, x).is_zero for x in range(g.order))
        assert all(eq.nullity_bruteforce(g, x) == g.order for x in range(g.order))


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_prime_cyclic_has_one_partition(p):
    g = make_cyclic(p)
    for m in range(1, p):
        assert eq.null_space(g, m).cosets == (tuple(range(p)),)


@pytest.mark.parametrize("group", CORPUS, ids=CORPUS_IDS)
def test_null_inclusion_over_powers(group):
    for g in range(group.order):
        for n in range(-6, 7):
            assert eq.null_inclusion_check(group, g, n)


def test_null_space_members_are_annihilated_numerically(rng):
    d4 = parse_group_spec("D4")
    for g in range(8):
        ns = eq.null_space(d4, g)
        x = rng.standard_normal(ns.nullity) @ np.array(ns.basis, dtype=float)
        assert ns.contains(x, 1e-12)
        assert np.abs(x @ skew(d4, g).matrix).max() <= 1e-12


# -- residual and classification ----------------------------------------------

def test_residual_examples():
    assert eq.residual(real_ens("Z3", [[1, 0, 0], [0, 1, 0]])) > 0
    assert eq.residual(real_ens("Z3", [[1, 0, 0], [1, 0, 0]])) == 0
    assert eq.residual(real_ens("Z4", [[1, 2, 0, 1], [-1, -2, 0, -1]])) == 0


def test_global_zero_label():
    rep = eq.classify(real_ens("Z5", [[1, 2, 0, 1, 3], [-1, -2, 0, -1, -3]]))
    assert rep.global_zero and rep.is_equilibrium
    assert set(rep.labels.values()) == {"0-global"}


def test_all_ones_centroid_is_label_one():
    rep = eq.classify(real_ens("Z3", [[1, 1, 1], [1, 1, 1]]))
    assert rep.is_equilibrium
    assert rep.labels == {"0": "1", "1": "1", "2": "1"}


def test_identity_is_always_label_one(rng):
    for spec in ["Z5", "S3", "D4"]:
        ens = dyn.random_ensemble(parse_group_spec(spec), 4, mode="real", rng=rng)
        assert eq.classify(ens).records[0].label is eq.Label.ONE


def test_random_states_are_not_equilibria():
    z5 = make_cyclic(5)
    rng = np.random.default_rng(7)
    for _ in range(1000):
        ens = dyn.random_ensemble(z5, 4, mode="real", rng=rng)
        rep = eq.classify(ens)
        assert not rep.is_equilibrium
        assert rep.residual > eq.ANALYTIC_TOL
        assert eq.Label.NONE in {r.label for r in rep.records}


def _ones_centroid_state(rng, group, n_agents):
    # centroid along (1,...,1) plus perturbations that cancel in the mean
    pert = rng.standard_normal((n_agents, group.order))
    pert -= pert.mean(axis=0)
    return dyn.Ensemble(group, rng.standard_normal() * np.ones(group.order) + pert, 1.0, "real")


@pytest.mark.parametrize("spec", ["Z3", "Z5", "Z6", "S3", "D4"])
def test_constructed_equilibria_agree_with_residual(spec, rng):
    g = parse_group_spec(spec)
    for _ in range(50):
        ens = _ones_centroid_state(rng, g, 5)
        rep = eq.classify(ens)
        assert rep.is_equilibrium
        assert rep.residual <= 1e-12
        assert all(r.label is eq.Label.ONE for r in rep.records)


def test_label_two_with_witness():
    # both agents on the great circle through (1,1,1); the centroid is off that axis
    ens = real_ens("Z3", LABEL_TWO_Z3)
    rep = eq.classify(ens)
    assert rep.is_equilibrium and rep.residual <= 1e-15
    assert [r.label for r in rep.records] == [eq.Label.ONE, eq.Label.TWO, eq.Label.TWO]
    w = eq.hyperplane_witness(ens, 1)
    assert np.abs(ens.states.real @ w.vector).max() <= 1e-15
    assert w.sphere_dim == 1 and w.radius == pytest.approx(1.0)
    with pytest.raises(WitnessUndefinedError):
        eq.hyperplane_witness(ens, 0)


def test_complex_classify_rejected():
    ens = dyn.random_ensemble(make_cyclic(3), 3, mode="complex", seed=1)
    with pytest.raises(UnsupportedModeError):
        eq.classify(ens)
    assert eq.residual(ens) > 0


def test_report_json_round_trip():
    import json

    rep = eq.classify(real_ens("Z3", LABEL_TWO_Z3))
    doc = json.loads(rep.to_json())
    assert doc["is_equilibrium"] is True
    assert [e["label"] for e in doc["elements"]] == [r.label.value for r in rep.records]
    assert "witness" in doc["elements"][1]


@st.composite
def real_states(draw):
    spec = draw(st.sampled_from(["Z3", "Z4", "Z5", "S3", "D4"]))
    g = parse_group_spec(spec)
    n = draw(st.integers(1, 5))
    floats = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
    rows = draw(hnp.arrays(np.float64, (n, g.order), elements=floats))
    return dyn.Ensemble(g, rows, 1.0, "real")


@given(real_states())
def test_residual_equals_witness_defects(ens):
    # over the reals the g-component of each defect is v_g . x^i
    X = ens.states.real
    D = np.stack([X @ eq.witness_vector(ens, g) for g in range(ens.group.order)], axis=1)
    expect = np.linalg.norm(D, axis=1).max()
    assert abs(eq.residual(ens) - expect) <= 1e-12 * (1 + expect)


@given(real_states())
def test_labels_imply_small_residual(ens):
    rep = eq.classify(ens, tol=1e-8)
    if rep.is_equilibrium:
        # each component |v_g . x^i| is within tol * max(1, ||x^i||)
        scale = max(1.0, float(ens.norms().max()))
        assert rep.residual <= math.sqrt(ens.group.order) * 1e-8 * scale + 1e-15


# -- Z3 picture -------------------------------------------------------------------

def _great_circle_state(rng, n):
    w = rng.standard_normal(3)
    w -= w.mean()
    w /= np.linalg.norm(w)
    th = rng.uniform(0, 2 * np.pi, n)
    return np.cos(th)[:, None] * ONES3 / np.sqrt(3) + np.sin(th)[:, None] * w


def _angle_between_lines(u, v):
    return math.atan2(np.linalg.norm(np.cross(u, v)), abs(u @ v))


def test_z3_classes(rng):
    z3 = make_cyclic(3)
    x = rng.standard_normal(3)
    e1 = dyn.Ensemble(z3, np.stack([x, -x]), 1.0, "real")
    assert eq.z3_classify(e1) is eq.Z3Class.E1

    e3 = _ones_centroid_state(rng, z3, 4)
    assert eq.z3_classify(e3) is eq.Z3Class.E3

    e2 = dyn.Ensemble(z3, _great_circle_state(rng, 4), 1.0, "real")
    assert eq.z3_classify(e2) is eq.Z3Class.E2
    for ens in (e1, e2, e3):
        assert eq.residual(ens) <= 1e-10
        assert eq.classify(ens).is_equilibrium

    far = dyn.random_ensemble(z3, 4, mode="real", seed=3)
    assert eq.z3_classify(far) is eq.Z3Class.NONE


def test_z3_witness_is_cross_product(rng):
    z3 = make_cyclic(3)
    for _ in range(20):
        ens = dyn.Ensemble(z3, _great_circle_state(rng, 3), 1.0, "real")
        pc = ens.states.real.mean(axis=0)
        y = np.cross(ONES3, pc)
        w = eq.hyperplane_witness(ens, 1)
        assert w.sphere_dim == 1
        assert np.allclose(w.vector, -y, atol=1e-12)
        assert _angle_between_lines(w.vector, y) <= 1e-8


def test_z3_classify_needs_z3():
    with pytest.raises(InvalidParameterError):
        eq.z3_classify(real_ens("Z4", [[1, 0, 0, 0]]))
