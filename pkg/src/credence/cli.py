"""Command-line front end.

Single results and profiles are emitted as JSON with a fixed key order; sweeps
are CSV.  Every float goes through :func:`fmt` (12 significant digits), so
identical inputs give byte-identical output.

Exit status: 0 success, 1 validation or usage error, 2 verification failure,
3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .alt_games import SignalPricingPair, path_probabilities, relabeled_paths, transform_nonsignalling
from .binary import qhat, services_value, solve_above, solve_below
from .envelope import benefit_test, qcav
from .equilibrium import loads_profile, profile_to_dict, solve_equilibrium, verify_p_equilibrium
from .errors import BracketFailure, CredenceError, ModelError, SolverFailure
from .model import as_belief, load_model
from .oracle import SimplexGrid, default_mesh, grid_tolerance, qcav_grid_oracle
from .profits import profit_summary

EXIT_OK, EXIT_INVALID, EXIT_VERIFY, EXIT_SOLVER = 0, 1, 2, 3
DIGITS = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x) -> float:
    return float(f"{float(x):.{DIGITS}g}")


def _vec(xs):
    return [fmt(x) for x in xs]


def _floats(text, flag):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None


def _splitting_doc(split, indices):
    return [
        {"weight": fmt(w), "posterior": _vec(mu), "index": int(i)}
        for (w, mu), i in zip(split, indices)
    ]


def _load(args, need_prior=True):
    if not args.model:
        raise UsageError("--model is required")
    model, prior = load_model(args.model)
    if args.prior is not None:
        prior = as_belief(_floats(args.prior, "--prior"), model.n)
    if need_prior and prior is None:
        raise UsageError("--prior is required (the model file has no prior)")
    return model, prior


# -- subcommands ----------------------------------------------------------------


def cmd_profits(args):
    model, prior = _load(args)
    summary = profit_summary(model, prior)
    return {
        "prior": _vec(prior.weights),
        "pi": _vec(summary.per_treatment),
        "pi_bar": fmt(summary.best),
        "argmax": sorted(summary.argmax_indices),
    }, EXIT_OK


def cmd_qcav(args):
    model, prior = _load(args)
    env = qcav(model, prior)
    return {
        "prior": _vec(prior.weights),
        "value": fmt(env.value),
        "splitting": _splitting_doc(env.splitting, env.indices),
    }, EXIT_OK


def cmd_solve(args):
    model, prior = _load(args)
    return profile_to_dict(solve_equilibrium(model, prior), DIGITS), EXIT_OK


def cmd_verify(args):
    model, prior = _load(args, need_prior=False)
    if not args.profile:
        raise UsageError("--profile is required")
    profile = loads_profile(Path(args.profile).read_text())
    if args.prior is None and profile.prior is not None:
        prior = as_belief(profile.prior, model.n)
    if prior is None:
        raise UsageError("--prior is required (neither model nor profile has one)")
    if profile.n != model.n:
        raise ModelError(f"profile has {profile.n} prices, model has {model.n} treatments")
    report = verify_p_equilibrium(model, prior, profile)
    doc = {
        "passed": report.passed,
        "failures": report.failures(),
        "checks": {
            name: {"passed": c.passed, "slack": fmt(c.slack), "detail": c.detail}
            for name, c in report.checks.items()
        },
        "expert_payoff": fmt(report.expert_payoff),
        "client_payoff": fmt(report.client_payoff),
    }
    return doc, EXIT_OK if report.passed else EXIT_VERIFY


def cmd_binary(args):
    model, prior = _load(args)
    q = float(prior.weights[1]) if model.n == 2 else None
    threshold = qhat(model)
    if q >= threshold - 1e-9:
        result = solve_above(model, q)
    else:
        if args.spec is None:
            raise UsageError("--spec is required below the threshold")
        result = solve_below(model, q, _floats(args.spec, "--spec"))
    equilibria = []
    for profile in result.equilibria:
        entry = profile_to_dict(profile, DIGITS)
        entry["services_value"] = fmt(services_value(model, q, profile))
        equilibria.append(entry)
    return {
        "q": fmt(q),
        "qhat": fmt(threshold),
        "regime": result.regime.value,
        "value_interval": _vec(result.value_interval),
        "equilibria": equilibria,
    }, EXIT_OK


def cmd_benefit(args):
    model, prior = _load(args)
    res = benefit_test(model, prior)
    doc = {
        "prior": _vec(prior.weights),
        "verdict": res.verdict.value,
        "pi_bar": fmt(res.profit),
        "second_surplus": fmt(res.second_surplus),
    }
    if res.witness is not None:
        doc["witness"] = {
            "value": fmt(res.witness.value),
            "splitting": _splitting_doc(res.witness.splitting, res.witness.indices),
        }
    return doc, EXIT_OK


def cmd_sweep(args):
    model, _ = _load(args, need_prior=False)
    mesh = args.mesh if args.mesh is not None else 20
    if mesh < 2:
        raise UsageError("--mesh must be at least 2 for sweeps")
    rows = []
    for prior in SimplexGrid(model.n, mesh).points:
        env = qcav(model, prior)
        res = benefit_test(model, prior)
        rows.append(list(_vec(prior)) + [fmt(res.profit), fmt(env.value), res.verdict.value])
    header = [f"w{i}" for i in range(1, model.n + 1)] + ["pi_bar", "qcav", "benefit"]
    return {"header": header, "rows": rows}, EXIT_OK


def _read_pair(path):
    doc = json.loads(Path(path).read_text())
    try:
        signalling = {int(t): {str(m): float(p) for m, p in dist.items()} for t, dist in doc["signalling"].items()}
        pricing = {(int(e["type"]), str(e["message"])): tuple(float(x) for x in e["prices"]) for e in doc["pricing"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed pair document: {exc}") from None
    return SignalPricingPair(signalling, pricing)


def cmd_transform(args):
    if not args.pair:
        raise UsageError("--pair is required")
    pair = _read_pair(args.pair)
    out = transform_nonsignalling(pair)
    preserved = relabeled_paths(pair, out) == path_probabilities(pair)
    labels = sorted({lab for dist in out.signalling.values() for lab in dist})
    doc = {
        "signalling": {
            str(t): [{"label": list(lab), "probability": fmt(p)} for lab, p in sorted(dist.items())]
            for t, dist in sorted(out.signalling.items())
        },
        "pricing": [{"label": list(lab), "prices": _vec(out.pricing[(out.types[0], lab)])} for lab in labels],
        "paths_preserved": preserved,
    }
    return doc, EXIT_OK if preserved else EXIT_VERIFY


def cmd_oracle(args):
    model, prior = _load(args)
    mesh = args.mesh if args.mesh is not None else default_mesh(model.n)
    engine = qcav(model, prior).value
    grid = qcav_grid_oracle(model, prior, mesh)
    eps = grid_tolerance(model, mesh)
    agree = abs(engine - grid) <= 2 * eps
    return {
        "prior": _vec(prior.weights),
        "mesh": mesh,
        "engine": fmt(engine),
        "oracle": fmt(grid),
        "eps_grid": fmt(eps),
        "agree": agree,
    }, EXIT_OK if agree else EXIT_VERIFY


COMMANDS = {
    "profits": (cmd_profits, "profit hyperplanes and their envelope at the prior"),
    "qcav": (cmd_qcav, "envelope value with an equal-level splitting"),
    "solve": (cmd_solve, "silent or client-worst equilibrium profile"),
    "verify": (cmd_verify, "check a serialized profile"),
    "binary": (cmd_binary, "two-type equilibrium catalogue"),
    "benefit": (cmd_benefit, "does talk raise the expert's payoff"),
    "sweep": (cmd_sweep, "grid of priors as CSV rows"),
    "transform": (cmd_transform, "make a pricing strategy non-signalling"),
    "oracle": (cmd_oracle, "grid-oracle cross-check of the envelope"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="credence", description="Credence-goods cheap-talk solver.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--model")
        p.add_argument("--prior")
        p.add_argument("--format", choices=["json", "csv"])
        p.add_argument("--mesh", type=int)
        p.add_argument("--spec")
        p.add_argument("--profile")
        p.add_argument("--pair")
        p.add_argument("--out")
    return parser


def _render(doc, fmt_name, command) -> str:
    if fmt_name is None:
        fmt_name = "csv" if command == "sweep" else "json"
    if fmt_name == "json":
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if command == "sweep":
        writer.writerow(doc["header"])
        writer.writerows(doc["rows"])
    else:
        writer.writerow(["key", "value"])
        for key, value in doc.items():
            writer.writerow([key, json.dumps(value) if isinstance(value, (list, dict)) else value])
    return buf.getvalue()


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        doc, status = COMMANDS[args.command][0](args)
        text = _render(doc, args.format, args.command)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_INVALID
    except (SolverFailure, BracketFailure) as exc:
        print(f"solver failure: {exc}", file=stderr)
        return EXIT_SOLVER
    except (CredenceError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"invalid input: {exc}", file=stderr)
        return EXIT_INVALID
    if args.out:
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
