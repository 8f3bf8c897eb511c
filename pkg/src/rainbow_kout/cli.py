"""Command-line front end: sample coloured k-out instances, decide rainbow
spanning trees on interchange files, and run sweeps, lemma checks and
structure probes with seeded reproducibility.

Exit codes: 0 success (or: a tree exists), 1 no tree, 2 invalid input,
3 internal inconsistency (a failed solver self-check).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass

from .intersect import InternalInconsistencyError, find_rst, result_dict
from .lemma_lab import run_connectivity_lemma, run_gamma_cycles_lemma, run_mono_parallel_lemma
from .model import (
    Seed,
    assign_balanced_colouring,
    balanced_profile,
    generate_kout,
    read_interchange,
    write_interchange,
)
from .experiments import (
    resolve_q,
    rpm_exact,
    rhc_exact,
    sweep_rst,
    write_probes_csv,
    write_probes_json,
    write_table_csv,
    write_table_json,
)

__all__ = ["main", "RunConfig"]


@dataclass
class RunConfig:
    """Resolved invocation, echoed on every run for auditability."""

    subcommand: str
    n: object
    k: int | None
    q: object
    trials: int | None
    seed: int
    workers: int
    out: str | None
    format: str | None

    def echo(self, to_stderr: bool) -> None:
        stream = sys.stderr if to_stderr else sys.stdout
        print("# config " + json.dumps(asdict(self)), file=stream)

    def echo_profile(self, n: int, k: int, q: int, to_stderr: bool) -> None:
        stream = sys.stderr if to_stderr else sys.stdout
        rho, num_popular = balanced_profile(n * k, q)
        print(f"# profile n={n} k={k} q={q} rho={rho} num_popular={num_popular}", file=stream)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("RKOUT_SEED")
    if env is not None:
        return int(env)
    return 0


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def cmd_gen(args) -> int:
    seed = _resolve_seed(args)
    config = RunConfig("gen", args.n, args.k, args.q, None, seed, 1, args.out, None)
    config.echo(to_stderr=args.out is None)
    config.echo_profile(args.n, args.k, args.q, to_stderr=args.out is None)
    g = generate_kout(args.n, args.k, Seed(seed))
    c = assign_balanced_colouring(g, args.q, Seed(seed, 1))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            write_interchange(fp, g, c)
    else:
        write_interchange(sys.stdout, g, c)
    return 0


def cmd_solve(args) -> int:
    with open(args.input, "r", encoding="utf-8") as fp:
        g, c = read_interchange(fp)
    config = RunConfig("solve", g.n, g.k, c.q, None, 0, 1, args.out, None)
    config.echo(to_stderr=False)
    config.echo_profile(g.n, g.k, c.q, to_stderr=False)
    result = find_rst(g, c)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            json.dump(result_dict(result), fp, indent=1)
            fp.write("\n")
    print(f"status: {result.status}")
    if result.certificate is not None:
        cert = result.certificate
        print(f"certificate: |I|={len(cert.colours)} kappa={cert.kappa_value} deficiency={cert.deficiency}")
    return 0 if result.is_tree else 1


def cmd_sweep(args) -> int:
    seed = _resolve_seed(args)
    n_values = _int_list(args.n)
    if not n_values:
        raise ValueError("sweep needs at least one n value")
    config = RunConfig("sweep", n_values, args.k, args.q_rule, args.trials, seed, args.workers, args.out, args.format)
    to_stderr = args.out is None
    config.echo(to_stderr)
    for n in n_values:
        config.echo_profile(n, args.k, resolve_q(args.q_rule, n, args.k), to_stderr)
    table = sweep_rst(n_values, args.k, args.q_rule, args.trials, Seed(seed), workers=args.workers)
    writer = write_table_csv if args.format == "csv" else lambda fp, t: write_table_json(fp, t, asdict(config))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fp:
            writer(fp, table)
    else:
        writer(sys.stdout, table)
    return 0


def cmd_lemmas(args) -> int:
    seed = _resolve_seed(args)
    config = RunConfig("lemmas", args.n, args.k, args.q, args.trials, seed, 1, args.out, "json")
    to_stderr = args.out is None
    config.echo(to_stderr)
    if args.name == "gamma-cycles":
        config.echo_profile(args.n, 2, args.n - 1, to_stderr)  # matched sides
        report = run_gamma_cycles_lemma(args.n, args.samples, Seed(seed), args.z_threshold)
    elif args.name == "mono-parallel":
        q = args.q if args.q is not None else args.n - 1
        config.echo_profile(args.n, args.k, q, to_stderr)
        report = run_mono_parallel_lemma(args.n, args.k, q, args.trials, Seed(seed), args.z_threshold)
    elif args.name == "connectivity":
        report = run_connectivity_lemma(args.n, args.k, args.trials, Seed(seed), args.z_threshold)
    else:
        raise ValueError(f"unknown lemma {args.name!r}")
    payload = json.dumps(report.to_dict(), indent=1) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            fp.write(payload)
    else:
        sys.stdout.write(payload)
    return 0 if report.passed else 1


def cmd_probe(args) -> int:
    seed = _resolve_seed(args)
    q_values = _int_list(args.q)
    if not q_values:
        raise ValueError("probe needs at least one q value")
    k = 2 if args.kind == "rpm" else 3
    config = RunConfig(f"probe:{args.kind}", args.n, k, q_values, args.trials, seed, 1, args.out, args.format)
    to_stderr = args.out is None
    config.echo(to_stderr)
    for q in q_values:
        config.echo_profile(args.n, k, q, to_stderr)
    probe = rpm_exact if args.kind == "rpm" else rhc_exact
    results = [probe(args.n, q, args.trials, Seed(seed)) for q in q_values]
    writer = write_probes_csv if args.format == "csv" else lambda fp, rs: write_probes_json(fp, rs, asdict(config))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fp:
            writer(fp, results)
    else:
        writer(sys.stdout, results)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rainbow-kout", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand")

    gen = sub.add_parser("gen", help="sample a coloured k-out instance and write the interchange file")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--q", type=int, required=True)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="decide rainbow spanning tree existence for an interchange file")
    solve.add_argument("input")
    solve.add_argument("--out", default=None, help="result file (status, tree edges, certificate)")
    solve.set_defaults(func=cmd_solve)

    sweep = sub.add_parser("sweep", help="tree-existence frequency over seeded trials")
    sweep.add_argument("--n", required=True, help="comma-separated vertex counts, e.g. 100,300,1000")
    sweep.add_argument("--k", type=int, default=2)
    sweep.add_argument("--q-rule", default="n-1", help="n-1, n-2, kn, or a fixed integer")
    sweep.add_argument("--trials", type=int, default=200)
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    sweep.set_defaults(func=cmd_sweep)

    lemmas = sub.add_parser("lemmas", help="check one auxiliary fact and emit a JSON report")
    lemmas.add_argument("--name", required=True, choices=["gamma-cycles", "mono-parallel", "connectivity"])
    lemmas.add_argument("--n", type=int, required=True)
    lemmas.add_argument("--k", type=int, default=2)
    lemmas.add_argument("--q", type=int, default=None, help="mono-parallel only; defaults to n-1")
    lemmas.add_argument("--samples", type=int, default=1000, help="gamma-cycles sample count")
    lemmas.add_argument("--trials", type=int, default=200)
    lemmas.add_argument("--z-threshold", type=float, default=3.0)
    lemmas.add_argument("--seed", type=int, default=None)
    lemmas.add_argument("--out", default=None)
    lemmas.set_defaults(func=cmd_lemmas)

    probe = sub.add_parser("probe", help="exact small-n structure probes")
    probe.add_argument("kind", choices=["rpm", "rhc"])
    probe.add_argument("--n", type=int, required=True)
    probe.add_argument("--q", required=True, help="comma-separated colour counts")
    probe.add_argument("--trials", type=int, default=200)
    probe.add_argument("--seed", type=int, default=None)
    probe.add_argument("--out", default=None)
    probe.add_argument("--format", choices=["csv", "json"], default="json")
    probe.set_defaults(func=cmd_probe)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except InternalInconsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
