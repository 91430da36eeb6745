"""Build members of the three Z3 equilibrium classes and inspect them.

Coordinates are phi(x) = (x_e, x_a, x_{a^2}) in R^3.
"""
import numpy as np

from grflow import dynamics as dyn
from grflow import equilibria as eq
from grflow.groups import make_cyclic

ONES = np.ones(3)


def show(name, rows):
    ens = dyn.Ensemble(make_cyclic(3), rows, 1.0, "real")
    rep = eq.classify(ens)
    print(f"{name}: class {eq.z3_classify(ens).value}, residual {rep.residual:.1e}, labels {rep.labels}")
    if rep.records[1].label is eq.Label.TWO:
        w = eq.hyperplane_witness(ens, 1)
        y = np.cross(ONES, rows.mean(axis=0))
        cos = abs(w.vector @ y) / (np.linalg.norm(w.vector) * np.linalg.norm(y))
        print(f"  witness {np.round(w.vector, 6)}, (1,1,1) x phi(x^c) = {np.round(y, 6)}, |cos| = {cos:.12f}")
        print(f"  agents lie on a {w.sphere_dim}-sphere of radius {w.radius:.6f}")


def main():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((2, 3))
    show("zero centroid", np.vstack([x, -x]))

    w = np.array([1.0, -1.0, 0.0]) / np.sqrt(2)
    th = rng.uniform(0, 2 * np.pi, 4)
    show("great circle through (1,1,1)", np.cos(th)[:, None] * ONES / np.sqrt(3) + np.sin(th)[:, None] * w)

    pert = rng.standard_normal((4, 3))
    show("centroid along (1,1,1)", 0.4 * ONES + pert - pert.mean(axis=0))

    # a random start flows into one of the classes
    start = dyn.random_ensemble(make_cyclic(3), 6, 1.0, "real", seed=1)
    end = dyn.simulate(start, dyn.SimConfig(dt=1e-2, t_final=100.0, keep_states=False)).final
    show("flowed from random data", end.states.real)


if __name__ == "__main__":
    main()
