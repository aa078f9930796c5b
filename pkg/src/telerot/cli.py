"""Command line front end.

Four subcommands: ``enumerate`` (every branch of a scenario), ``run`` (one
sampled pass with pre- and post-recovery fidelities), ``fidelity-sweep``
(average-fidelity statistics, Monte Carlo or exact), and ``secret-share``
(full cooperative run, or a withholding sweep).

Exit codes: 0 on success, 1 for usage or config problems, 2 when an internal
invariant breaks. Reports are JSON with sorted keys and floats rounded to 12
significant digits, so a given (command, config, seed) always produces the
same bytes. The document shapes are pinned by docs/schemas/*.schema.json.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .analysis import BlochState, average_fidelity
from .parties import MESSAGE_FAMILIES, non_cooperation_average, run_secret_sharing
from .protocol import (
    Branch,
    ScenarioConfig,
    enumerate_branches,
    recovery_plan,
    run_sampled,
)
from .qsim import apply_single, fidelity_up_to_phase

REPORT_FORMAT = "telerot-report/1"
DEFAULT_SWEEP_SAMPLES = 100_000


class UsageError(Exception):
    pass


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="telerot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", required=True, metavar="PATH", help="scenario JSON")
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        p.add_argument("--output", metavar="PATH", default=None, help="report path (default stdout)")

    p_enum = sub.add_parser("enumerate", help="list every branch with exact probabilities")
    add_common(p_enum)

    p_run = sub.add_parser("run", help="one sampled protocol pass")
    add_common(p_run)

    p_sweep = sub.add_parser("fidelity-sweep", help="average rotation fidelity")
    add_common(p_sweep, config=False)
    p_sweep.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count")
    p_sweep.add_argument("--fix-varphi", type=float, default=None, help="hold the azimuth fixed")
    p_sweep.add_argument("--quadrature", action="store_true", help="exact value, no sampling")

    p_share = sub.add_parser("secret-share", help="cooperative run or withholding sweep")
    add_common(p_share)
    p_share.add_argument("--bob", type=int, default=0,
                         help="reconstructing receiver, zero-based (default 0)")
    p_share.add_argument("--withhold", type=int, default=None,
                         help="receiver that keeps quiet, zero-based")
    p_share.add_argument("--trials", type=int, default=None, help="withholding sweep size")
    return parser


def _parse_message(raw: object) -> tuple[complex, complex] | str:
    """Amplitude pair from the config's message block, or a family name."""
    if not isinstance(raw, dict):
        raise ConfigError("message must be an object")
    if "family" in raw:
        family = raw["family"]
        if family not in MESSAGE_FAMILIES or family == "fixed":
            raise ConfigError(f"unknown message family {family!r}")
        return family
    if "bloch" in raw:
        bloch = raw["bloch"]
        if not isinstance(bloch, dict) or set(bloch) != {"vartheta", "varphi"}:
            raise ConfigError("bloch message needs vartheta and varphi")
        try:
            return BlochState(float(bloch["vartheta"]), float(bloch["varphi"])).amplitudes()
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad bloch angles: {exc}") from exc
    if set(raw) == {"alpha", "beta"}:
        pair = []
        for key in ("alpha", "beta"):
            value = raw[key]
            if (
                not isinstance(value, (list, tuple))
                or len(value) != 2
                or not all(isinstance(x, (int, float)) for x in value)
            ):
                raise ConfigError(f"{key} must be a [re, im] pair")
            pair.append(complex(value[0], value[1]))
        return pair[0], pair[1]
    raise ConfigError("message must give alpha/beta pairs, bloch angles, or a family")


def load_config(path: str) -> tuple[dict, ScenarioConfig, str | None]:
    """Parse and validate a scenario file.

    Returns the raw document (echoed into reports), the scenario, and the
    message family name when the config declares a distribution instead of a
    concrete message (the scenario then carries a |0> placeholder).
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - {"message", "n", "thetas", "mode", "seed"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("message", "n", "thetas"):
        if key not in raw:
            raise ConfigError(f"config is missing {key!r}")
    message = _parse_message(raw["message"])
    family = message if isinstance(message, str) else None
    alpha, beta = (1.0, 0.0) if family else message
    if not isinstance(raw["n"], int):
        raise ConfigError("n must be an integer")
    if not isinstance(raw["thetas"], list) or not all(
        isinstance(t, (int, float)) for t in raw["thetas"]
    ):
        raise ConfigError("thetas must be a list of numbers")
    mode = raw.get("mode", "enumerate")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    try:
        config = ScenarioConfig(alpha, beta, raw["n"], tuple(raw["thetas"]), mode, seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return raw, config, family


def _round12(value):
    """Floats to 12 significant digits, recursively, leaving other types alone."""
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _round12(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round12(v) for v in value]
    return value


def _branch_dict(branch: Branch) -> dict:
    return {
        "receiver_outcomes": branch.receiver_outcomes,
        "m": branch.m,
        "alice_outcome": branch.alice_outcome,
        "probability": branch.probability,
        "phi": branch.phi,
        "final_state": [[a.real, a.imag] for a in branch.final_state.amplitudes],
        "recovery": recovery_plan(branch.phi, branch.alice_outcome).description,
    }


def _render(payload: dict) -> str:
    return json.dumps(_round12(payload), sort_keys=True, indent=2) + "\n"


def _base_report(command: str, seed: int | None) -> dict:
    return {"format": REPORT_FORMAT, "command": command, "version": __version__, "seed": seed}


def _require_concrete(family: str | None) -> None:
    if family:
        raise ConfigError(
            "this command needs a concrete message, not a family; "
            "families only steer secret-share withholding sweeps"
        )


def cmd_enumerate(args) -> dict:
    raw, config, family = load_config(args.config)
    _require_concrete(family)
    seed = args.seed if args.seed is not None else config.seed
    branches = enumerate_branches(replace(config, mode="enumerate"))
    report = _base_report("enumerate", seed)
    report.update(
        config=raw,
        branches=[_branch_dict(b) for b in branches],
        branch_count=len(branches),
        probability_sum=math.fsum(b.probability for b in branches),
    )
    return report


def cmd_run(args) -> dict:
    raw, config, family = load_config(args.config)
    _require_concrete(family)
    seed = args.seed if args.seed is not None else config.seed
    config = replace(config, mode="sample", seed=seed)
    branch = run_sampled(config)
    message = config.message_state()
    plan = recovery_plan(branch.phi, branch.alice_outcome)
    recovered = apply_single(branch.final_state, 0, plan.unitary)
    report = _base_report("run", seed)
    report.update(
        config=raw,
        branch=_branch_dict(branch),
        recovery=plan.description,
        pre_recovery_fidelity=fidelity_up_to_phase(branch.final_state, message),
        post_recovery_fidelity=fidelity_up_to_phase(recovered, message),
    )
    return report


def cmd_fidelity_sweep(args) -> dict:
    if args.quadrature and args.samples is not None:
        raise UsageError("--quadrature computes an exact value; --samples conflicts with it")
    seed = args.seed if args.seed is not None else 0
    if args.quadrature:
        stats = average_fidelity(method="quadrature", fixed_varphi=args.fix_varphi)
        method = "quadrature"
    else:
        samples = args.samples if args.samples is not None else DEFAULT_SWEEP_SAMPLES
        if samples < 1:
            raise UsageError("--samples must be positive")
        stats = average_fidelity(samples=samples, seed=seed, fixed_varphi=args.fix_varphi)
        method = "monte_carlo"
    report = _base_report("fidelity-sweep", seed)
    report.update(
        method=method,
        samples=stats.samples,
        fixed_varphi=args.fix_varphi,
        mean=stats.mean,
        std_error=stats.std_error,
    )
    return report


def cmd_secret_share(args) -> dict:
    raw, config, family = load_config(args.config)
    seed = args.seed if args.seed is not None else config.seed
    config = replace(config, seed=seed)
    if not 0 <= args.bob < config.n:
        raise UsageError(f"--bob {args.bob} out of range, receivers are indexed 0..{config.n - 1}")
    if args.withhold is None:
        _require_concrete(family)
        if args.trials is not None:
            raise UsageError("--trials only applies together with --withhold")
        transcript = run_secret_sharing(config, args.bob)
        report = _base_report("secret-share", seed)
        report.update(
            config=raw,
            bob=args.bob,
            withheld=None,
            trials=None,
            message_family=None,
            stats=None,
            transcript=transcript.to_dict(),
            fidelity=transcript.fidelity,
        )
        return report
    if not 0 <= args.withhold < config.n:
        raise UsageError(
            f"--withhold {args.withhold} out of range, receivers are indexed 0..{config.n - 1}"
        )
    if args.withhold == args.bob:
        raise UsageError("the reconstructing receiver cannot be the withholder")
    if args.trials is None or args.trials < 1:
        raise UsageError("--withhold needs a positive --trials")
    stats = non_cooperation_average(
        config,
        withholder=args.withhold,
        trials=args.trials,
        seed=seed,
        bob=args.bob,
        message_family=family or "fixed",
    )
    transcript_dict = None
    if family is None:
        cooperating = [i for i in range(config.n) if i != args.withhold]
        transcript_dict = run_secret_sharing(config, args.bob, cooperating).to_dict()
    report = _base_report("secret-share", seed)
    report.update(
        config=raw,
        bob=args.bob,
        withheld=args.withhold,
        trials=args.trials,
        message_family=family or "fixed",
        stats={"mean": stats.mean, "std_error": stats.std_error, "samples": stats.samples},
        transcript=transcript_dict,
        fidelity=None,
    )
    return report


_COMMANDS = {
    "enumerate": cmd_enumerate,
    "run": cmd_run,
    "fidelity-sweep": cmd_fidelity_sweep,
    "secret-share": cmd_secret_share,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.seed is not None and args.seed < 0:
            raise UsageError("--seed must be nonnegative")
        payload = _COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"telerot: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - the invariant-violation exit path
        print(f"telerot: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text = _render(payload)
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            print(f"telerot: error: cannot write {args.output}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
