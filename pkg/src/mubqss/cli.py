"""Command-line front end.

    mubqss run        --d 5 --t 2 --n 3 --secret 4 --seed 42 --out t.json
    mubqss attack     --type intercept-resend --d 5 --t 3 --trials 10000 --seed 7
    mubqss sweep      --ds 3,5,7 --ts 2 --attacks intercept-resend --trials 2000
    mubqss mub-verify --d 7 --tol 1e-9

Exit codes: 0 success, 1 aborted session or MUB violation, 2 invalid
parameters, 3 I/O failure.  Machine-readable output goes to stdout or --out;
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from typing import Sequence

import numpy as np

from mubqss.adversary import ATTACK_KINDS, AttackConfig, ci3, run_attack
from mubqss.errors import ParameterError
from mubqss.field import SchemeParams
from mubqss.protocol import run_session
from mubqss.qudit import verify_mub_family

EXIT_OK, EXIT_ABORTED, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3
SWEEP_HEADER = ["d", "t", "attack", "metric", "value", "ci3sigma", "trials", "seed"]
ATTACK_ALIASES = {"dishonest": "dishonest-participant"}
SWEEP_METRICS = {
    "intercept-resend": ("eve_basis_match_rate", "eve_secret_guess_rate", "detection_rate"),
    "entangle-measure": ("eve_secret_guess_rate", "detection_rate"),
    "dishonest-participant": ("detection_rate", "cheater_identified_rate"),
    "collusion": ("eve_secret_guess_rate",),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_scheme(p: argparse.ArgumentParser, t_default: int | None = None) -> None:
    p.add_argument("--d", type=int, required=True, help="odd prime dimension")
    p.add_argument("--t", type=int, default=t_default, required=t_default is None, help="threshold")
    p.add_argument("--n", type=int, help="number of participants (default t)")
    p.add_argument("--points", type=_int_list, help="public points x_1..x_n (default 1..n)")
    p.add_argument("--secret", type=int, help="secret S (default: uniform from the seed)")
    p.add_argument("--seed", type=int, help="master seed (default $QSS_SEED or 0)")
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mubqss", description="Verifiable qudit secret sharing simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one session and emit its transcript")
    _add_scheme(run)
    run.add_argument("--recovery-set", type=_int_list, help="ordered t participant indices (default 1..t)")
    run.add_argument("--dump-states", action="store_true", help="include state vectors in the transcript")

    att = sub.add_parser("attack", help="run an attack experiment and emit its statistics")
    _add_scheme(att)
    att.add_argument("--type", required=True, choices=sorted([*ATTACK_KINDS, *ATTACK_ALIASES]))
    att.add_argument("--position", type=_int_list,
                     help="hop (channel attacks), cheater index, or colluder indices")
    att.add_argument("--trials", type=int, default=1000)

    sw = sub.add_parser("sweep", help="attack rates over a grid of (d, t)")
    sw.add_argument("--ds", type=_int_list, required=True)
    sw.add_argument("--ts", type=_int_list, default=[2])
    sw.add_argument("--attacks", default="intercept-resend")
    sw.add_argument("--trials", type=int, default=1000)
    sw.add_argument("--secret", type=int, default=0)
    sw.add_argument("--seed", type=int)
    sw.add_argument("--out")

    mv = sub.add_parser("mub-verify", help="exhaustively check the MUB family for one d")
    mv.add_argument("--d", type=int, required=True)
    mv.add_argument("--tol", type=float, default=1e-9)
    return parser


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QSS_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ParameterError(f"QSS_SEED must be an integer, got {env!r}") from None


def _params(args) -> SchemeParams:
    n = args.n if args.n is not None else args.t
    return SchemeParams(args.d, args.t, n, tuple(args.points or ()))


def _secret(args, d: int, seed: int) -> int:
    if args.secret is not None:
        if not 0 <= args.secret < d:
            raise ParameterError(f"secret must lie in [0, {d})")
        return args.secret
    return int(np.random.default_rng(np.random.SeedSequence([seed, 1])).integers(d))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_run(args) -> int:
    params = _params(args)
    seed = _seed(args)
    secret = _secret(args, params.d, seed)
    rs = args.recovery_set or list(range(1, params.t + 1))
    tr = run_session(params, secret, rs, None, seed, dump_states=args.dump_states)
    _emit(tr.to_json() + "\n", args.out)
    if tr.aborted is None and tr.recovered and all(v == secret for v in tr.recovered.values()):
        return EXIT_OK
    print(f"session aborted in phase {tr.aborted}", file=sys.stderr)
    return EXIT_ABORTED


def _default_position(kind: str, t: int):
    if kind == "collusion":
        return list(range(1, t))
    if kind == "dishonest-participant":
        return 1
    return 0


def _attack_config(kind: str, position, trials: int, seed: int, t: int) -> AttackConfig:
    if position is None:
        position = _default_position(kind, t)
    elif kind != "collusion":
        if len(position) != 1:
            raise ParameterError(f"--position takes a single index for {kind}")
        position = position[0]
    return AttackConfig(kind=kind, position=position, trials=trials, seed=seed)


def cmd_attack(args) -> int:
    params = _params(args)
    seed = _seed(args)
    secret = _secret(args, params.d, seed)
    kind = ATTACK_ALIASES.get(args.type, args.type)
    config = _attack_config(kind, args.position, args.trials, seed, params.t)
    stats = run_attack(config, params, secret)
    _emit(stats.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    kinds = [ATTACK_ALIASES.get(k.strip(), k.strip()) for k in args.attacks.split(",") if k.strip()]
    if not args.ds or not args.ts or not kinds:
        raise ParameterError("sweep needs non-empty --ds, --ts and --attacks")
    for k in kinds:
        if k not in SWEEP_METRICS:
            raise ParameterError(f"unknown attack kind {k!r}")
    seed = _seed(args)
    grid = []
    for d in args.ds:
        for t in args.ts:
            params = SchemeParams(d, t, t)  # validates every cell before any work
            grid.append(params)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for params in grid:
        for kind in kinds:
            trials = 1 if kind == "collusion" else args.trials
            stats = run_attack(_attack_config(kind, None, trials, seed, params.t), params, args.secret % params.d)
            for metric in SWEEP_METRICS[kind]:
                value = getattr(stats, metric)
                half = 0.0 if kind == "collusion" else ci3(value, stats.trials)
                writer.writerow([params.d, params.t, kind, metric, f"{value:.6f}", f"{half:.6f}", stats.trials, seed])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_mub_verify(args) -> int:
    violations, summary = verify_mub_family(args.d, args.tol)
    if violations:
        print(f"mub-verify d={args.d}: FAIL: {violations[0]}")
        return EXIT_ABORTED
    print(
        f"mub-verify d={args.d}: OK, {summary['bases']} bases (computational + {args.d}) "
        f"orthonormal, mutually unbiased, shift law exact; max deviation "
        f"{max(v for k, v in summary.items() if k.startswith('max_')):.2e} <= tol {args.tol:g}"
    )
    return EXIT_OK


COMMANDS = {"run": cmd_run, "attack": cmd_attack, "sweep": cmd_sweep, "mub-verify": cmd_mub_verify}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
