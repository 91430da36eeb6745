"""Compare the flow on C[Z1] with the identical-oscillator Kuramoto model.

    python scripts/kuramoto_check.py --n-agents 5 --t-final 10
"""
import argparse

import numpy as np

from grflow import dynamics as dyn
from grflow.groups import make_cyclic


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-agents", type=int, default=5)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-final", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    theta0 = rng.uniform(0, 2 * np.pi, args.n_agents)
    ens = dyn.Ensemble(make_cyclic(1), np.exp(1j * theta0)[:, None], args.kappa, "complex")
    traj = dyn.simulate(ens, dyn.SimConfig(dt=args.dt, t_final=args.t_final))
    phases = dyn.kuramoto_reduce(ens, args.t_final, args.dt)
    gap = np.abs(dyn.wrap_phase(np.angle(traj.states[:, :, 0]) - phases))

    print("t        R2            max phase gap")
    for k in np.linspace(0, len(phases) - 1, 11).astype(int):
        print(f"{traj.times[k]:<8.3g} {traj.records[k].R2:<13.10f} {gap[k].max():.2e}")

    if args.n_agents == 2:
        # tan(delta/2) decays like exp(-2 kappa t)
        d0 = theta0[1] - theta0[0]
        d = np.angle(traj.final.states[1, 0] / traj.final.states[0, 0])
        expect = np.tan(d0 / 2) * np.exp(-2 * args.kappa * args.t_final)
        print(f"two-oscillator closed form: tan(delta/2) = {np.tan(d / 2):.12g}, expected {expect:.12g}")


if __name__ == "__main__":
    main()
