"""Command-line driver: ``gmn classical-bound | comm-search | run | reproduce-paper``.

Exit codes: 0 success, 2 usage or domain error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import statistics
import sys

import numpy as np

from . import classical, harness, protocol, qsim
from .errors import DomainError
from .noise import NoiseModel, calibrate_visibility

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3

PUBLISHED_FIGURES = {
    "p": 0.851,
    "sigma": 0.002,
    "z": 52,
    "per_variation_z": 9,
    "counts": [28768, 5032],
}
REPRODUCE_ROUNDS = 1056  # 33792 rounds in total, the closest equal split of 33800

RUN_DEFAULTS = {
    "rounds_per_variation": 1000,
    "visibility": 1.0,
    "white_noise": 0.0,
    "efficiency": "1,1,1",
    "workers": 1,
    "format": "json",
    "out": None,
}


class UsageError(Exception):
    pass


def read_config_file(path: str) -> dict:
    """Parse flat ``key = value`` lines; keys mirror flag names (dashes or underscores)."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def resolve_seed(value):
    if value is None:
        value = os.environ.get("GMN_SEED")
    if value is None:
        return 0
    try:
        seed = int(value)
    except ValueError:
        raise UsageError(f"seed must be an integer, got {value!r}") from None
    if not 0 <= seed < 2**64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    return seed


def parse_efficiency(text) -> tuple[float, ...]:
    try:
        values = tuple(float(x) for x in str(text).split(","))
    except ValueError:
        raise UsageError(f"--efficiency expects three comma-separated numbers, got {text!r}") from None
    if len(values) == 1:
        values = values * 3
    if len(values) != 3:
        raise UsageError("--efficiency expects one value or three comma-separated values")
    return values


def _print_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def cmd_classical_bound(args) -> int:
    cert = classical.certificate(list_maximizers=args.list_maximizers, answer_rule=args.answer_rule)
    if args.mixtures:
        rng = np.random.default_rng(resolve_seed(args.seed))
        values = classical.random_mixtures(args.mixtures, rng, support=5)
        cert["mixtures"] = {
            "count": args.mixtures,
            "max_value": max(values),
            "within_bound": max(values) <= 0.75 + 1e-12,
        }
    _print_json(cert)
    return EXIT_OK


def cmd_comm_search(args) -> int:
    value, witness = classical.best_comm_protocol(args.alice_bits, args.bob_bits, args.answer_rule)
    _print_json(
        {
            "alice_bits": args.alice_bits,
            "bob_bits": args.bob_bits,
            "answer_rule": args.answer_rule,
            "probability": str(value.probability),
            "wins": value.wins,
            "example": witness.to_dict(),
        }
    )
    return EXIT_OK


def _run_settings(args) -> dict:
    settings = dict(RUN_DEFAULTS)
    if args.config:
        try:
            settings.update(read_config_file(args.config))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
    for key in RUN_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    seed = args.seed if args.seed is not None else settings.get("seed")
    settings["seed"] = resolve_seed(seed)
    unknown = set(settings) - set(RUN_DEFAULTS) - {"seed"}
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return settings


def cmd_run(args) -> int:
    s = _run_settings(args)
    try:
        config = harness.RunConfig(
            rounds_per_variation=int(s["rounds_per_variation"]),
            noise=NoiseModel(
                visibility=float(s["visibility"]),
                white_noise=float(s["white_noise"]),
                detector_efficiency=parse_efficiency(s["efficiency"]),
            ),
            master_seed=s["seed"],
            workers=int(s["workers"]),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if s["format"] not in ("json", "csv"):
        raise UsageError(f"--format must be json or csv, got {s['format']!r}")
    data = harness.emit_report(harness.run_experiment(config), s["format"])
    if s["out"]:
        try:
            with open(s["out"], "wb") as fh:
                fh.write(data)
        except OSError as exc:
            print(f"gmn: cannot write {s['out']}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK


def pipeline_checks() -> dict:
    """Rotation identity over all variations and the beam-splitter preparation."""
    identity_ok = all(
        qsim.equal_up_to_global_phase(
            protocol.rotate_for_variation(protocol.ghz(), v), protocol.ghz_transform_oracle(v)
        )
        for v in protocol.enumerate_valid_variations()
    )
    state, p_pbs, p_trigger = protocol.prepare_ghz_via_pbs()
    return {
        "rotation_identity": identity_ok,
        "preparation": {
            "fidelity": qsim.fidelity(state, protocol.prepare_ghz_direct()),
            "pbs_probability": p_pbs,
            "trigger_probability": p_trigger,
        },
    }


def cmd_reproduce_paper(args) -> int:
    seed = resolve_seed(args.seed)
    visibility = calibrate_visibility(PUBLISHED_FIGURES["p"])
    config = harness.RunConfig(REPRODUCE_ROUNDS, NoiseModel(visibility), seed, workers=args.workers)
    report = harness.run_experiment(config)
    incorrect = report.pooled_total - report.pooled_correct
    summary = {
        "paper": PUBLISHED_FIGURES,
        "simulated": {
            "p": report.pooled_probability,
            "sigma": report.pooled_std_error,
            "z": report.pooled_zscore,
            "per_variation_z": statistics.median(s.zscore_vs_classical for s in report.per_variation),
            "counts": [report.pooled_correct, incorrect],
            "visibility": visibility,
            "rounds_per_variation": REPRODUCE_ROUNDS,
            "seed": seed,
        },
        "checks": pipeline_checks(),
        "classical_bound": str(classical.optimal_classical()[0].probability),
    }
    _print_json(summary)
    return EXIT_OK


def _bit_budget(text: str) -> int:
    if text not in ("0", "1"):
        raise argparse.ArgumentTypeError(f"bit budget must be 0 or 1, got {text!r}")
    return int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classical-bound", help="certify the best local win probability")
    p.add_argument("--list-maximizers", action="store_true")
    p.add_argument("--mixtures", type=int, default=0, metavar="N", help="also score N random shared-randomness mixtures")
    p.add_argument("--seed", default=None)
    p.add_argument("--answer-rule", choices=classical.ANSWER_RULES, default="xor")
    p.set_defaults(func=cmd_classical_bound)

    p = sub.add_parser("comm-search", help="best protocol with one-bit messages to Charlie")
    p.add_argument("--alice-bits", type=_bit_budget, required=True)
    p.add_argument("--bob-bits", type=_bit_budget, required=True)
    p.add_argument("--answer-rule", choices=classical.ANSWER_RULES, default="xor")
    p.set_defaults(func=cmd_comm_search)

    p = sub.add_parser("run", help="Monte Carlo replay of the experiment")
    p.add_argument("--config", default=None, help="flat key = value file; explicit flags win")
    p.add_argument("--rounds-per-variation", dest="rounds_per_variation", type=int, default=None)
    p.add_argument("--visibility", type=float, default=None)
    p.add_argument("--white-noise", dest="white_noise", type=float, default=None)
    p.add_argument("--efficiency", default=None, help="a,b,c detector efficiencies")
    p.add_argument("--seed", default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("reproduce-paper", help="calibrated replay compared with the published figures")
    p.add_argument("--seed", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_reproduce_paper)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"gmn: {exc}", file=sys.stderr)
        return EXIT_USAGE
