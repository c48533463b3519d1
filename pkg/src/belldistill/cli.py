"""Command-line front end.

Subcommands: gen, bell, ppt, coeffs, splits, lemma. Every command prints a
JSON report on stdout; diagnostics go to stderr.

Exit codes: 0 success, 1 usage error, 2 numeric-contract violation,
3 lemma counterexample, 4 ``bell --expect-violation`` without a violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from belldistill import bell, ghz_family, io, linalg, states
from belldistill.errors import BellDistillError, ContractError
from belldistill.ghz_family import BipartiteSplit, LemmaCounterexample

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONTRACT = 2
EXIT_COUNTEREXAMPLE = 3
EXIT_NO_VIOLATION = 4

GEN_MAX_N = 12
PPT_MAX_N = 10
GEN_KINDS = ("ghz", "dur", "random", "random-ghz-diagonal", "mixed")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _max_dim(max_n: int, default: int) -> int:
    if max_n > default:
        gib = (1 << (2 * max_n)) * 16 / 2**30
        print(
            f"warning: raising the dense cap to N={max_n}; one matrix needs ~{gib:.2f} GiB",
            file=sys.stderr,
        )
    return 1 << max_n


def _phase_arg(text: str):
    if text == states.MATCHED:
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"phase must be a number or 'matched', got {text!r}") from None


def cmd_gen(args) -> dict:
    n = args.n
    max_dim = _max_dim(args.max_n, GEN_MAX_N)
    if n < 1 or (args.kind == "dur" and n < 2) or (args.kind == "random-ghz-diagonal" and n < 2):
        raise UsageError(f"gen {args.kind}: n = {n} is too small")
    if args.kind != "random-ghz-diagonal" and (1 << n) > max_dim:
        raise UsageError(f"gen {args.kind}: N={n} exceeds the dense cap N={args.max_n} (raise --max-n)")
    meta = {"generator": args.kind}
    if args.kind == "ghz":
        phase = states.resolve_phase(args.phase, n)
        state = io.StateFile("pure", n, states.ghz(n, phase, max_dim), {**meta, "frame_phase": phase})
    elif args.kind == "dur":
        phase = states.resolve_phase(args.phase, n)
        state = io.StateFile("dense", n, states.dur_state(n, phase, max_dim), {**meta, "frame_phase": phase})
    elif args.kind == "random":
        state = io.StateFile("dense", n, states.random_density_matrix(n, args.seed, max_dim), {**meta, "seed": args.seed})
    elif args.kind == "mixed":
        state = io.StateFile("dense", n, states.maximally_mixed(n, max_dim), meta)
    else:
        floor = ghz_family.auto_delta_floor(n) if args.delta_floor == "auto" else float(args.delta_floor)
        coeffs = states.random_ghz_diagonal(n, args.seed, floor)
        state = io.StateFile("ghz-diagonal", n, coeffs, {**meta, "seed": args.seed, "delta_floor": floor})
    io.save(state, args.out)
    return {"written": str(args.out), "kind": state.kind, "n_parties": n, "metadata": state.metadata}


def _load(args):
    state, digest = io.load(args.state)
    return state, {"path": str(args.state), "sha256": digest, "kind": state.kind, "n_parties": state.n_parties}


def cmd_bell(args) -> dict:
    state, source = _load(args)
    n = state.n_parties
    max_dim = _max_dim(args.max_n, GEN_MAX_N)
    beta = bell.beta_n(n) if args.beta is None else args.beta
    if args.settings:
        with open(args.settings, encoding="utf-8") as fh:
            settings = bell.MeasurementSettings.from_dict(json.load(fh))
        if (1 << n) > max_dim:
            raise linalg.DimensionLimitError(
                f"N={n} exceeds the dense cap for general settings; use --xy or a ghz-diagonal state"
            )
        report = bell.bell_report(state.density(max_dim), settings)
        mode = {"settings": settings.to_dict()}
    else:
        if state.kind == "ghz-diagonal":
            value = ghz_family.bell_value(state.data)
        elif state.kind == "pure":
            psi = state.data
            value = 2.0 * bell.quantum_max(n) * float((np.exp(1j * beta) * psi[0] * np.conj(psi[-1])).real)
        else:
            value = bell.xy_expectation(state.data, beta)
        report = bell.BellReport(value, n)
        mode = {"settings": "xy", "beta": beta}
    return {"input": source, **mode, **report.to_dict()}


def _cuts(n: int, args) -> list[tuple[str, linalg.PartySubset]]:
    if args.split:
        split = BipartiteSplit.from_bits(args.split)
        if split.n_parties != n:
            raise UsageError(f"split {args.split!r} has {split.n_parties - 1} bits; expected {n - 1}")
        return [(split.bits, linalg.PartySubset(n, frozenset(split.groups()[1])))]
    if args.scan == "single":
        return [(f"T{i}", linalg.PartySubset.of(n, i)) for i in range(1, n + 1)]
    return [(s.bits, linalg.PartySubset(n, frozenset(s.groups()[1]))) for s in ghz_family.enumerate_splits(n)]


def cmd_ppt(args) -> dict:
    state, source = _load(args)
    n = state.n_parties
    max_dim = _max_dim(args.max_n, PPT_MAX_N)
    if (1 << n) > max_dim:
        raise linalg.DimensionLimitError(f"N={n} exceeds the PPT dense cap N={args.max_n} (raise --max-n)")
    rho = state.density(max_dim)
    cuts = _cuts(n, args)

    def min_eig(cut):
        return linalg.min_eigenvalue(linalg.partial_transpose(rho, cut[1]))

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        mins = list(pool.map(min_eig, cuts))
    rows = []
    for (label, subset), lo in zip(cuts, mins):
        rows.append(
            {
                "cut": label,
                "transposed_parties": sorted(subset.parties),
                "min_eigenvalue": lo,
                "ppt": lo >= -linalg.PSD_TOL,
            }
        )
    return {
        "input": source,
        "backend": linalg.BACKEND,
        "cuts": rows,
        "all_ppt": all(r["ppt"] for r in rows),
        "tolerances": {"ppt_min_eigenvalue": -linalg.PSD_TOL},
    }


def _coefficients(state: io.StateFile, frame_phase):
    n = state.n_parties
    if state.kind == "ghz-diagonal":
        return state.data, state.frame_phase or 0.0
    if frame_phase is None:
        frame_phase = state.frame_phase or 0.0
    else:
        frame_phase = states.resolve_phase(frame_phase, n)
    return ghz_family.extract_coefficients(state.data, phase=frame_phase), frame_phase


def cmd_coeffs(args, with_splits: bool = False) -> dict:
    state, source = _load(args)
    if state.n_parties < 2:
        raise UsageError("coefficient reports need at least two parties")
    coeffs, frame = _coefficients(state, args.frame_phase)
    n = coeffs.n_parties
    table = []
    for report in ghz_family.split_scan(coeffs):
        row = report.to_dict()
        row["lambda_j"] = coeffs.lambda_(report.split.label)
        if not with_splits:
            del row["distillable"], row["delta"]
        table.append(row)
    out = {
        "input": source,
        "frame_phase": frame,
        "lambda0_plus": coeffs.lambda0_plus,
        "lambda0_minus": coeffs.lambda0_minus,
        "delta": coeffs.delta,
        "threshold": ghz_family.violation_threshold(n),
        "violates_threshold": ghz_family.violates_threshold(coeffs),
        "normalization": coeffs.normalization,
        "lambdas": table,
        "tolerances": {"strict_slack": ghz_family.STRICT_SLACK},
    }
    if with_splits:
        witnesses = [r["label"] for r in table if r["distillable"]]
        out["distillable_splits"] = witnesses
        out["lemma_applicable"] = out["violates_threshold"]
        if out["violates_threshold"] and not witnesses:
            raise LemmaCounterexample(f"{args.state}: violating family without a distillable split")
    return out


def cmd_lemma(args) -> dict:
    if args.n < 3:
        raise UsageError("lemma: N must be > 2 (the pigeonhole bound is below one at N = 2)")
    if args.trials < 1:
        raise UsageError("lemma: --trials must be >= 1")
    campaign = ghz_family.verify_lemma(args.n, args.trials, args.seed, args.delta_floor)
    out = campaign.to_dict()
    out["pigeonhole_bound"] = ghz_family.pigeonhole_bound(args.n)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="belldistill", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a state file")
    p.add_argument("kind", choices=GEN_KINDS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--phase", type=_phase_arg, default=0.0, help="GHZ phase in radians or 'matched'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta-floor", default="auto")
    p.add_argument("--max-n", type=int, default=GEN_MAX_N)
    p.add_argument("-o", "--out", required=True)

    p = sub.add_parser("bell", help="Mermin-Klyshko value and violation flag")
    p.add_argument("state")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--xy", action="store_true", help="sigma_x/sigma_y settings (default)")
    group.add_argument("--settings", help="JSON file of per-party unit vectors")
    p.add_argument("--beta", type=float, default=None, help="phase of the xy operator (default pi*(N-1)/4)")
    p.add_argument("--expect-violation", action="store_true", help="exit 4 unless the bound is violated")
    p.add_argument("--max-n", type=int, default=GEN_MAX_N)

    p = sub.add_parser("ppt", help="partial-transpose positivity across cuts")
    p.add_argument("state")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--split", help="split bits j1..j_{N-1}")
    group.add_argument("--scan", choices=("single", "all"))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--max-n", type=int, default=PPT_MAX_N)

    for name, text in (("coeffs", "GHZ-diagonal coefficients"), ("splits", "per-split distillability table")):
        p = sub.add_parser(name, help=text)
        p.add_argument("state")
        p.add_argument("--frame-phase", type=_phase_arg, default=None)

    p = sub.add_parser("lemma", help="seeded zero-counterexample campaign")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta-floor", default="auto")
    return parser


COMMANDS = {
    "gen": cmd_gen,
    "bell": cmd_bell,
    "ppt": cmd_ppt,
    "coeffs": cmd_coeffs,
    "splits": lambda args: cmd_coeffs(args, with_splits=True),
    "lemma": cmd_lemma,
}


def run(argv=None) -> tuple[int, dict | None]:
    """Parse and execute; returns ``(exit_code, report)`` without printing the report."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE, None
    start = time.perf_counter()
    try:
        results = COMMANDS[args.command](args)
    except LemmaCounterexample as exc:
        print(f"lemma counterexample: {exc}", file=sys.stderr)
        return EXIT_COUNTEREXAMPLE, None
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT, None
    except (UsageError, BellDistillError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    report = {
        "command": args.command,
        "argv": list(sys.argv[1:] if argv is None else argv),
        "seed": getattr(args, "seed", None),
        "results": results,
        "wall_time_s": time.perf_counter() - start,
    }
    code = EXIT_OK
    if args.command == "lemma" and results["counterexamples"]:
        code = EXIT_COUNTEREXAMPLE
    elif args.command == "bell" and args.expect_violation and not results["violates"]:
        code = EXIT_NO_VIOLATION
    return code, report


def main(argv=None) -> int:
    code, report = run(argv)
    if report is not None:
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
