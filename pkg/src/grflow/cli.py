"""Command-line front end: ``grflow {simulate,classify,group-info,verify,sweep}``.

Exit codes: 0 success / equilibrium, 1 usage or input error, 2 divergence,
3 state is not an equilibrium.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import dynamics as dyn
from . import equilibria as eq
from . import io, verify
from .errors import DivergenceError, GRFError
from .groups import (
    FiniteGroup,
    gcd_nullity,
    make_cyclic,
    parse_group_spec,
    right_cosets,
    subgroup_of_square,
)
from .ring import FieldMode

EXIT_OK, EXIT_USAGE, EXIT_DIVERGED, EXIT_NOT_EQUILIBRIUM = 0, 1, 2, 3

log = logging.getLogger("grflow")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _setup_logging() -> None:
    level = os.environ.get("GRF_LOG", "").lower()
    if level in ("debug", "info"):
        logging.basicConfig(stream=sys.stderr, level=getattr(logging, level.upper()),
                            format="%(levelname)s %(name)s: %(message)s")


# -- simulate -----------------------------------------------------------------

def _add_sim_flags(p: argparse.ArgumentParser, sweep: bool = False) -> None:
    p.add_argument("--group", help="group spec, e.g. Z3, D4, Z2xZ2, @file:table.txt")
    p.add_argument("--n-agents", type=int)
    if not sweep:
        p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-final", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--field", choices=["real", "complex"], default="complex")
    p.add_argument("--renormalize", action="store_true")
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--residual-tol", type=float, default=eq.SIMULATED_TOL)


def _initial_ensemble(args) -> tuple[dyn.Ensemble, dict]:
    if getattr(args, "init", None):
        ens, doc = io.read_state(args.init)
        if args.kappa is not None:
            ens = dyn.Ensemble(ens.group, ens.states, args.kappa, ens.mode)
        return ens, {"init": str(args.init)}
    if not args.group or not args.n_agents:
        raise UsageError("--group and --n-agents are required unless --init is given")
    if args.kappa is None:
        raise UsageError("--kappa is required")
    group = parse_group_spec(args.group)
    ens = dyn.random_ensemble(group, args.n_agents, args.kappa, args.field, seed=args.seed)
    return ens, {"init": "random-unit-sphere"}


def _sim_config(args, **over) -> dyn.SimConfig:
    return dyn.SimConfig(
        dt=args.dt, t_final=args.t_final, renormalize=args.renormalize,
        record_every=args.record_every, seed=args.seed, residual_tol=args.residual_tol,
        keep_states=False, **over,
    )


def cmd_simulate(args) -> int:
    if args.kappa is not None and args.kappa < 0:
        raise UsageError(f"coupling strength kappa must be nonnegative, got {args.kappa}")
    ens, meta = _initial_ensemble(args)
    cfg = _sim_config(args)
    log.info("simulating %s, N=%d, kappa=%g, %d steps", ens.group.spec, ens.n_agents, ens.kappa, cfg.n_steps)
    traj = dyn.simulate(ens, cfg)
    io.write_trajectory_csv(args.out, traj.records)
    if args.snapshot_out:
        meta.update(seed=args.seed, dt=args.dt, t_final=args.t_final, renormalize=args.renormalize,
                    n_agents=ens.n_agents, converged_at=traj.converged_at, created_by="grflow simulate")
        io.write_state(args.snapshot_out, traj.final, meta)
    last = traj.records[-1]
    print(f"t={last.t:g} R2={last.R2:.12g} V={last.V:.12g} residual={last.residual:.3e} "
          f"converged_at={traj.converged_at}")
    return EXIT_OK


# -- classify -----------------------------------------------------------------

def _is_z3(group: FiniteGroup) -> bool:
    return group.order == 3 and group.same_table(make_cyclic(3))


def cmd_classify(args) -> int:
    ens, _ = io.read_state(args.state)
    tol = args.tol
    if ens.mode is FieldMode.COMPLEX:
        r = eq.residual(ens)
        doc = {
            "residual": r,
            "tolerance": tol,
            "is_equilibrium": r <= tol,
            "note": "per-element classes are defined for REAL states only; report is residual-based",
        }
        if args.format == "json":
            print(json.dumps(doc, indent=1))
        else:
            print(f"residual: {r:.6e} (tol {tol:g})")
            print(f"equilibrium: {'yes' if r <= tol else 'no'}")
            print("note: " + doc["note"])
        return EXIT_OK if r <= tol else EXIT_NOT_EQUILIBRIUM

    rep = eq.classify(ens, tol)
    z3 = eq.z3_classify(ens, tol).value if _is_z3(ens.group) else None
    if args.format == "json":
        doc = rep.to_dict()
        if z3 is not None:
            doc["z3_class"] = z3
        print(json.dumps(doc, indent=1))
    else:
        print(f"residual: {rep.residual:.6e} (tol {tol:g})")
        print(f"equilibrium: {'yes' if rep.is_equilibrium else 'no'}")
        print(f"global zero centroid: {rep.global_zero}")
        for r in rep.records:
            print(f"  g={r.g_name:>8}  label={r.label.value:<8}  |x^c(A^g-A^g^-1)|={r.null_check_value:.3e}"
                  f"  max|v.x^i|={r.max_orthogonality_defect:.3e}")
        if z3 is not None:
            print(f"Z3 class: {z3}")
    return EXIT_OK if rep.is_equilibrium else EXIT_NOT_EQUILIBRIUM


# -- group-info ---------------------------------------------------------------

def cmd_group_info(args) -> int:
    G = parse_group_spec(args.group)
    names = G.names
    w = max(len(s) for s in names)
    print(f"group {G.spec}  order {G.order}  abelian {G.is_abelian()}")
    print("Cayley table:")
    print(" " * (w + 3) + " ".join(s.rjust(w) for s in names))
    for i in range(G.order):
        print(f"{names[i].rjust(w)} | " + " ".join(names[j].rjust(w) for j in G.cayley[i]))
    print("elements:")
    disagree = False
    nullities = []
    for g in range(G.order):
        H = subgroup_of_square(G, g)
        cos = right_cosets(G, H)
        formula = G.order // H.order
        brute = eq.nullity_bruteforce(G, g)
        nullities.append(formula)
        flag = "" if formula == brute == len(cos) else "  MISMATCH"
        disagree |= bool(flag)
        hs = "{" + ", ".join(names[m] for m in H.members) + "}"
        cs = " ".join("{" + ",".join(names[m] for m in c) + "}" for c in cos)
        print(f"  {names[g]}: inverse={names[G.inv(g)]} H(g)={hs} |H(g)|={H.order} cosets={cs} "
              f"nullity={formula} bruteforce={brute}{flag}")
    print("nullity by element:")
    cyclic = G.same_table(make_cyclic(G.order))
    for g in range(G.order):
        if cyclic:
            print(f"  m={g}: {nullities[g]}  (gcd(2m,n)={gcd_nullity(g, G.order)})")
        else:
            print(f"  {names[g]}: {nullities[g]}")
    if all(eq.skew(G, g).is_zero for g in range(G.order)):
        print("all skew objects A^g - A^{g^-1} are zero: every state is an equilibrium")
    return EXIT_USAGE if disagree else EXIT_OK


# -- verify -------------------------------------------------------------------

def cmd_verify(args) -> int:
    G = parse_group_spec(args.group)
    results = verify.run(G, args.suite, args.trials, args.seed)
    for suite, check in results:
        print(f"{suite:>10} {check.line()}")
    ok = all(c.passed for _, c in results)
    print("all checks passed" if ok else "SOME CHECKS FAILED")
    return EXIT_OK if ok else EXIT_USAGE


# -- sweep --------------------------------------------------------------------

def parse_range(text: str) -> list[float]:
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"range must look like lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise UsageError(f"empty range {text!r}")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 12) for k in range(n)]


def _sweep_one(job):
    spec, states, mode, kappa, trial, cfg, out_path = job
    group = parse_group_spec(spec)
    ens = dyn.Ensemble(group, states, kappa, mode)
    traj = dyn.simulate(ens, cfg)
    io.write_trajectory_csv(out_path, traj.records)
    last = traj.records[-1]
    return kappa, trial, last.R2, last.V, last.residual, traj.converged_at


def cmd_sweep(args) -> int:
    kappas = parse_range(args.kappa)
    if any(k < 0 for k in kappas):
        raise UsageError("coupling strength kappa must be nonnegative")
    if not args.group or not args.n_agents:
        raise UsageError("--group and --n-agents are required")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    group = parse_group_spec(args.group)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = _sim_config(args)
    jobs = []
    for trial in range(args.trials):
        # one initial state per trial, shared across kappa
        init = dyn.random_ensemble(group, args.n_agents, 1.0, args.field, seed=args.seed + trial)
        for k in kappas:
            path = out / f"traj_kappa{k:g}_trial{trial}.csv"
            jobs.append((group.spec, init.states, init.mode, k, trial, cfg, str(path)))
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kappa", "trial", "final_R2", "final_V", "final_residual", "converged_at_t"])
        for k, trial, r2, v, res, conv in sorted(rows, key=lambda r: (r[0], r[1])):
            w.writerow([repr(k), trial, repr(r2), repr(v), repr(res), "" if conv is None else repr(conv)])
    print(f"wrote {len(rows)} trajectories and summary.csv to {out}")
    return EXIT_OK


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="grflow", description="Aggregation dynamics on group rings K[G].")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="integrate the flow and write a trajectory CSV")
    _add_sim_flags(s)
    s.add_argument("--init", help="start from a state envelope instead of random data")
    s.add_argument("--out", required=True, help="trajectory CSV path")
    s.add_argument("--snapshot-out", help="final-state JSON envelope path")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("classify", help="classify a stored state against the equilibrium set")
    c.add_argument("--state", required=True)
    c.add_argument("--tol", type=float, default=eq.ANALYTIC_TOL)
    c.add_argument("--format", choices=["json", "text"], default="text")
    c.set_defaults(func=cmd_classify)

    g = sub.add_parser("group-info", help="Cayley table, H(g), cosets and nullities")
    g.add_argument("--group", required=True)
    g.set_defaults(func=cmd_group_info)

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("--group", required=True)
    v.add_argument("--suite", choices=["ring", "dynamics", "equilibria", "all"], default="all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=None)
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("sweep", help="simulate over a kappa grid and several seeds")
    _add_sim_flags(w, sweep=True)
    w.add_argument("--kappa", required=True, help="lo:hi:step (inclusive)")
    w.add_argument("--trials", type=int, default=1)
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--out", required=True, help="output directory")
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"grflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"grflow: diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except GRFError as exc:
        print(f"grflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
