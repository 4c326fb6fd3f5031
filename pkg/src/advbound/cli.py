"""Command-line front end.

Subcommands cover single bound evaluations, the two case studies, block
decomposition dumps, circuit simulation with per-query checks, the tensor
product identities, and the full invariant suite.  Reports go to stdout or
to ``--output`` as JSON/CSV; case-study and simulation outputs also render
figures next to the delimited file unless ``--no-figures`` is given.

Exit status: 0 when all asserted checks pass, 1 when a check fails, 2 for
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from advbound import blocks, bounds, problems, report, simulator, symmetry, verify, young
from advbound.config import DEFAULT_SEED


class ConfigError(ValueError):
    pass


def _default_seed() -> int:
    env = os.environ.get("ADVBOUND_SEED")
    if env is not None:
        try:
            return int(env, 0)
        except ValueError as exc:
            raise ConfigError(f"ADVBOUND_SEED={env!r} is not an integer") from exc
    return DEFAULT_SEED


def _load_problem(args) -> problems.OracleProblem:
    if args.problem == "search":
        if args.n is None:
            raise ConfigError("--n is required for search")
        return problems.build_search(args.n)
    if args.problem == "index-erasure":
        if args.n is None or args.m is None:
            raise ConfigError("--n and --m are required for index erasure")
        return problems.build_index_erasure(args.n, args.m)
    if args.problem == "file":
        if args.problem_file is None:
            raise ConfigError("--problem-file is required with --problem file")
        return problems.load_problem(args.problem_file)
    raise ConfigError(f"unknown problem {args.problem!r}")


def _figures_wanted(args) -> bool:
    return args.output is not None and not args.no_figures


def _emit(reports, args, config) -> None:
    text = report.emit_report(reports, fmt=args.format, path=args.output, config=config)
    if args.output is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {args.output}")


def _adversary_for(args, problem, seed, base_gamma=None):
    """Adversary and thresholds for the requested method on this problem."""
    if args.problem == "search":
        base = bounds.search_adversary(problem.n_inputs, base_gamma)
    elif args.problem == "index-erasure":
        action = symmetry.full_product_action(problem)
        decomp = symmetry.isotypic_decomposition(action, seed=seed)
        base, _ = bounds.erasure_adversary(decomp)
    else:
        if args.adversary is None:
            raise ConfigError("custom problems need --adversary with a matrix file")
        with Path(args.adversary).open() as fh:
            doc = json.load(fh)
        raw = np.asarray(doc["matrix"], dtype=np.complex128)
        return bounds.AdversaryMatrix(matrix=raw, kind=doc.get("kind", "additive"))
    return base


def cmd_bound(args) -> int:
    seed = args.seed
    problem = _load_problem(args)
    # For the multiplicative family the --gamma flag scales the family, not
    # the base block weight.
    base_gamma = args.gamma if args.method != "multiplicative" else None
    base = _adversary_for(args, problem, seed, base_gamma)
    params = {"n": problem.n_inputs, "m": problem.n_outputs, "seed": seed}
    if args.method == "additive":
        rep = bounds.additive_bound(base, problem, args.epsilon, jobs=args.jobs)
    elif args.method == "hybrid":
        rep = bounds.hybrid_bound(base, problem, args.epsilon, args.lambda_tilde, jobs=args.jobs)
    elif args.method == "multiplicative":
        gamma = args.gamma if args.gamma is not None else 1.0
        fam = bounds.multiplicative_family(base, gamma) if base.kind == "additive" else base
        lam = args.threshold if args.threshold is not None else 1 + gamma
        rep = bounds.multiplicative_bound(fam, problem, args.epsilon, lam, jobs=args.jobs)
        params["gamma"] = gamma
    else:
        raise ConfigError(f"unknown method {args.method!r}")
    rep.params.update(params)
    _emit([rep], args, {"command": "bound", "seed": seed})
    return 0


def cmd_case_study_search(args) -> int:
    seed = args.seed
    n = args.n
    problem = problems.build_search(n)
    adv = bounds.search_adversary(n)
    epsilons = [float(e) for e in args.epsilons.split(",")]
    reports = []
    for eps in sorted(epsilons):
        add_rep = bounds.additive_bound(adv, problem, eps, jobs=args.jobs)
        hyb_rep = bounds.hybrid_bound(adv, problem, eps, 0.0, jobs=args.jobs)
        closed_add, closed_hyb, madv_ref = bounds.search_closed_forms(n, eps)
        beta = math.sqrt(1 - eps) - 1 / math.sqrt(n)
        gamma = 1 + 1 / beta**2
        fam = bounds.multiplicative_family(adv, gamma)
        mult_rep = bounds.multiplicative_bound(fam, problem, eps, 1 + gamma, jobs=args.jobs)
        for rep in (add_rep, hyb_rep, mult_rep):
            rep.params.update({"n": n, "seed": seed})
        mult_rep.params["gamma"] = gamma
        add_rep.params["closed_form"] = closed_add
        hyb_rep.params["closed_form"] = closed_hyb
        mult_rep.params["closed_form_scaling"] = madv_ref
        reports.extend([add_rep, hyb_rep, mult_rep])
    _emit(reports, args, {"command": "case-study-search", "n": n, "seed": seed})
    if _figures_wanted(args):
        rows = [report.report_row(r) for r in reports]
        fig = report.figure_epsilon_scan(
            rows, Path(args.output).with_suffix("") .as_posix() + "_scan.png",
            title=f"three methods on search over {n} elements",
        )
        print(f"wrote {fig}")
    return 0


def cmd_case_study_erasure(args) -> int:
    seed = args.seed
    problem = problems.build_index_erasure(args.n, args.m)
    census = young.erasure_census(args.n, args.m)
    action = symmetry.full_product_action(problem)
    decomp = symmetry.isotypic_decomposition(action, seed=seed)
    adv, weights = bounds.erasure_adversary(decomp)
    rep = bounds.hybrid_bound(adv, problem, args.epsilon, 0.0, jobs=args.jobs)
    rep.params.update({"n": args.n, "m": args.m, "seed": seed})

    gaps = []
    if problem.size <= 200:
        for x in range(problem.n_inputs):
            restricted = blocks.restrict(decomp, action, x, seed=seed)
            blks = blocks.progress_blocks(weights, restricted, problem, x, "additive")
            gap = blocks.verify_block_norms(blks, adv, problem, x, "additive")
            gaps.append({"x": x, "direct": gap.direct, "from_blocks": gap.from_blocks, "gap": gap.gap})

    _emit([rep], args, {"command": "case-study-index-erasure", "seed": seed})
    if args.output is not None:
        stem = Path(args.output).with_suffix("")
        census_path = Path(f"{stem}_census.csv")
        lines = ["input_shape,output_shape,bad,dim"]
        for e in census:
            lines.append(
                f"\"{e.lam_n.parts}\",\"{e.lam_m.parts}\",{int(e.is_bad)},{e.dim}"
            )
        census_path.write_text("\n".join(lines) + "\n")
        print(f"wrote {census_path}")
        if gaps:
            gap_path = Path(f"{stem}_block_gaps.json")
            gap_path.write_text(json.dumps(gaps, sort_keys=True, indent=2) + "\n")
            print(f"wrote {gap_path}")
        if _figures_wanted(args):
            fig = report.figure_census(census, f"{stem}_census.png")
            print(f"wrote {fig}")
    return 0


def cmd_decompose(args) -> int:
    seed = args.seed
    problem = _load_problem(args)
    if args.problem == "search":
        action = symmetry.input_action(problem)
    else:
        action = symmetry.full_product_action(problem)
    decomp = symmetry.isotypic_decomposition(action, seed=seed)
    doc = {
        "problem": problem.name,
        "multiplicity_free": symmetry.is_multiplicity_free(action),
        "blocks": [
            {
                "index": i,
                "dim": b.dim,
                "label": None
                if b.label is None
                else [list(b.label[0].parts), list(b.label[1].parts)],
                "orbit_values": [round(v, 10) for v in b.orbit_values],
                "fingerprint": [round(v, 6) for v in b.fingerprint],
            }
            for i, b in enumerate(decomp.blocks)
        ],
    }
    if args.x is not None:
        restricted = blocks.restrict(decomp, action, args.x, seed=seed)
        doc["restricted"] = {
            "x": args.x,
            "copies": [
                {
                    "parent": c.parent,
                    "dim": c.dim,
                    "irrep_class": c.irrep_class,
                }
                for c in restricted.copies
            ],
        }
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_simulate(args) -> int:
    seed = args.seed
    problem = _load_problem(args)
    if args.circuit is not None:
        circuit = simulator.load_circuit(args.circuit, problem)
    elif args.problem == "search":
        circuit = simulator.grover_for_search(problem.n_inputs, args.iterations)
    else:
        raise ConfigError("only search has a built-in circuit; pass --circuit")
    traj = simulator.run(circuit, problem)
    gamma = args.gamma if args.gamma is not None else None
    adv = bounds.search_adversary(problem.n_inputs, gamma) if args.problem == "search" else None
    success = simulator.success_probability(traj, problem)
    doc = {
        "problem": problem.name,
        "oracle_calls": len(traj.oracle_calls),
        "success_probability": success,
        "seed": seed,
    }
    ok = True
    if adv is not None:
        per_query = simulator.check_per_query(traj, adv, problem, "additive")
        w_series = simulator.progress_trajectory(traj, adv)
        eps_obs = 1 - success
        final_budget = bounds.success_term(eps_obs)
        rho_gap = simulator.rho_update_gap(traj, problem)
        ok = per_query.passed and w_series[-1] <= final_budget + 1e-6 and rho_gap <= 1e-8
        doc.update(
            {
                "per_query_allowed": per_query.allowed_forward,
                "per_query_observed_max": max(per_query.observed, default=0.0),
                "per_query_passed": per_query.passed,
                "progress_series": [float(w) for w in w_series],
                "final_progress_budget": final_budget,
                "rho_update_gap": rho_gap,
                "checks_passed": ok,
            }
        )
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
        if _figures_wanted(args) and adv is not None:
            fig = report.figure_progress(
                doc["progress_series"],
                doc["per_query_allowed"],
                Path(args.output).with_suffix("").as_posix() + "_progress.png",
            )
            print(f"wrote {fig}")
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def cmd_sdpt(args) -> int:
    from advbound import products

    problem = problems.build_search(args.n)
    fam = bounds.multiplicative_family(bounds.search_adversary(args.n), args.gamma)
    lam = args.threshold if args.threshold is not None else 1 + args.gamma
    factor = products.verify_factor_norm_identity(fam, problem, args.k)
    inclusion = products.bad_subspace_inclusion(fam, problem, lam, args.k)
    ok = factor.passed(1e-8) and inclusion.inclusion_holds
    doc = {
        "base": problem.name,
        "k": args.k,
        "gamma": args.gamma,
        "lambda": lam,
        "factor_norm_gap": factor.max_gap,
        "factor_norm_base": factor.base_value,
        "inclusion_holds": inclusion.inclusion_holds,
        "eta_base": inclusion.eta_base,
        "eta_power": inclusion.eta_power,
        "passed": ok,
    }
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def cmd_verify(args) -> int:
    checks = verify.run_suite(args.suite, seed=args.seed)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name} (observed {c.observed:.3e}, budget {c.budget:.3e})")
    text = verify.suite_to_json(checks, {"suite": args.suite, "seed": args.seed})
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    passed = all(c.passed for c in checks)
    print(f"{'all checks passed' if passed else 'some checks FAILED'} ({len(checks)} checks)")
    return 0 if passed else 1


def _add_common(sub, with_problem=True) -> None:
    sub.add_argument("--seed", type=int, default=_default_seed(), help="decomposition seed")
    sub.add_argument("--jobs", type=int, default=1, help="parallel workers for per-input norms")
    sub.add_argument("--output", type=str, default=None, help="report path (stdout if omitted)")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    if with_problem:
        sub.add_argument("--problem", choices=("search", "index-erasure", "file"), required=True)
        sub.add_argument("--n", type=int, default=None, help="input alphabet size")
        sub.add_argument("--m", type=int, default=None, help="output alphabet size")
        sub.add_argument("--problem-file", type=str, default=None)
        sub.add_argument("--adversary", type=str, default=None, help="adversary matrix JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="advbound",
        description="adversary lower bounds for enumerable oracle problems",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    b = subs.add_parser("bound", help="evaluate one method on one problem")
    _add_common(b)
    b.add_argument("--method", choices=("additive", "hybrid", "multiplicative"), required=True)
    b.add_argument("--epsilon", type=float, default=0.0)
    b.add_argument("--gamma", type=float, default=None, help="off-block weight / family parameter")
    b.add_argument("--lambda-tilde", dest="lambda_tilde", type=float, default=0.0)
    b.add_argument("--lambda", dest="threshold", type=float, default=None)
    b.set_defaults(func=cmd_bound)

    cs = subs.add_parser("case-study", help="full reproductions with reference values")
    cs_subs = cs.add_subparsers(dest="case", required=True)
    s = cs_subs.add_parser("search", help="three methods against closed forms over an error grid")
    _add_common(s, with_problem=False)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--epsilons", type=str, default="0,0.04,0.1,0.2,0.3,0.4,0.5")
    s.set_defaults(func=cmd_case_study_search)
    e = cs_subs.add_parser("index-erasure", help="census, adversary and hybrid bound")
    _add_common(e, with_problem=False)
    e.add_argument("--N", dest="n", type=int, required=True)
    e.add_argument("--M", dest="m", type=int, required=True)
    e.add_argument("--epsilon", type=float, default=0.1)
    e.set_defaults(func=cmd_case_study_erasure)

    d = subs.add_parser("decompose", help="dump the invariant block decomposition")
    _add_common(d)
    d.add_argument("--x", type=int, default=None, help="also restrict to this input's stabilizer")
    d.set_defaults(func=cmd_decompose)

    sim = subs.add_parser("simulate", help="run a circuit and check per-query inequalities")
    _add_common(sim)
    sim.add_argument("--iterations", type=int, default=1)
    sim.add_argument("--circuit", type=str, default=None, help="circuit JSON file")
    sim.add_argument("--gamma", type=float, default=None)
    sim.set_defaults(func=cmd_simulate)

    sd = subs.add_parser("sdpt", help="tensor-power identities")
    _add_common(sd, with_problem=False)
    sd.add_argument("--n", type=int, default=3)
    sd.add_argument("--gamma", type=float, default=2.0)
    sd.add_argument("--k", type=int, default=2)
    sd.add_argument("--lambda", dest="threshold", type=float, default=None)
    sd.set_defaults(func=cmd_sdpt)

    v = subs.add_parser("verify", help="run the invariant suite")
    _add_common(v, with_problem=False)
    v.add_argument("--suite", type=str, default="all")
    v.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, problems.ProblemError, bounds.BoundError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
