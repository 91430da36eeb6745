"""Seeded random runs over R[Z5]: final residual, R2 and equilibrium labels.

    python scripts/z5_convergence.py --runs 20 --t-final 200
"""
import argparse
import time
from collections import Counter

from grflow import dynamics as dyn
from grflow import equilibria as eq
from grflow.groups import parse_group_spec


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--group", default="Z5")
    p.add_argument("--n-agents", type=int, default=8)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--dt", type=float, default=5e-3)
    p.add_argument("--t-final", type=float, default=200.0)
    args = p.parse_args()

    G = parse_group_spec(args.group)
    cfg = dyn.SimConfig(dt=args.dt, t_final=args.t_final, record_every=10, keep_states=False)
    patterns = Counter()
    t0 = time.perf_counter()
    for seed in range(args.runs):
        traj = dyn.simulate(dyn.random_ensemble(G, args.n_agents, 1.0, "real", seed=seed), cfg)
        last = traj.records[-1]
        rep = eq.classify(traj.final, eq.SIMULATED_TOL)
        labels = " ".join(rep.labels.values())
        patterns[labels] += 1
        print(f"seed {seed:3d}  R2 {last.R2:.6f}  residual {last.residual:.2e}  "
              f"converged_at {traj.converged_at if traj.converged_at is None else round(traj.converged_at, 6)}  labels [{labels}]  equilibrium {rep.is_equilibrium}")
    print(f"{args.runs} runs in {time.perf_counter() - t0:.1f}s")
    for labels, n in patterns.most_common():
        print(f"  {n:3d} x [{labels}]")


if __name__ == "__main__":
    main()
