"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 contract violation (an error-free
decode failure or a proven bound exceeded), 4 instance construction failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .codecs import decode_max_q, encode_error_free, encode_positive_error
from .errors import (
    ConfigError,
    ContractViolationError,
    DecodeError,
    InstanceConstructionError,
    InvalidDistributionError,
    PriorcodeError,
)
from .harness import (
    ExperimentConfig,
    codeword_from_doc,
    codeword_to_doc,
    distribution_from_doc,
    distribution_to_doc,
    hard_instance_to_doc,
    load_json,
    redundancy_report,
    run_experiment,
    save_json,
    sweep,
    write_sweep_csv,
    write_sweep_long_csv,
)
from .instances import hard_instance, random_close_pair
from .randomness import StreamSeed

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_CONTRACT_VIOLATION = 3
EXIT_INSTANCE_FAILURE = 4


def _seed_arg(value: str) -> StreamSeed:
    try:
        return StreamSeed(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _load_sender_prior(path: str):
    doc = load_json(path)
    return distribution_from_doc(doc["P"] if "P" in doc else doc)


def _load_receiver_prior(path: str):
    doc = load_json(path)
    return distribution_from_doc(doc["Q"] if "Q" in doc else doc)


def _cmd_gen_instance(args) -> int:
    seed = args.seed if args.seed else StreamSeed.random()
    rng = np.random.default_rng(seed.rng_int(b"instance"))
    if args.kind == "hard":
        inst = hard_instance(args.alpha, rng)
        doc = hard_instance_to_doc(inst, seed.hex)
    else:
        if args.size is None:
            raise ConfigError("--size is required for random instances")
        P, Q = random_close_pair(args.alpha, args.size, rng)
        doc = {
            "P": distribution_to_doc(P),
            "Q": distribution_to_doc(Q),
            "meta": {
                "kind": "random",
                "alpha": args.alpha,
                "size": args.size,
                "seed": seed.hex,
            },
        }
    save_json(doc, args.out)
    print(f"wrote {args.kind} instance (alpha={args.alpha}) to {args.out}")
    return EXIT_OK


def _cmd_encode(args) -> int:
    P = _load_sender_prior(args.dist)
    if args.scheme == "ef":
        trace = encode_error_free(args.message, P, args.alpha, args.seed)
        codeword = trace.codeword
    else:
        if args.epsilon is None:
            raise ConfigError("--epsilon is required for the pe scheme")
        codeword = encode_positive_error(
            args.message, P, args.alpha, args.epsilon, args.seed
        )
    doc = codeword_to_doc(codeword)
    if args.out:
        save_json(doc, args.out)
    else:
        print(json.dumps(doc))
    return EXIT_OK


def _cmd_decode(args) -> int:
    Q = _load_receiver_prior(args.dist)
    codeword = codeword_from_doc(load_json(args.codeword))
    m = decode_max_q(codeword, Q, args.seed)
    out = {"message": m}
    if Q.message_set.labels is not None:
        out["label"] = Q.message_set.labels[m]
    print(json.dumps(out))
    return EXIT_OK


def _cmd_experiment(args) -> int:
    config = ExperimentConfig.from_dict(load_json(args.config))
    result = run_experiment(config)
    report = redundancy_report(result.summary, config.alpha, config.epsilon)
    doc = {"summary": result.summary.to_dict(), "report": report}
    print(json.dumps(doc, indent=2, sort_keys=True))
    if report["upper_bound_violated"]:
        raise ContractViolationError(
            "measured mean length exceeds the proven upper bound beyond the CI"
        )
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = ExperimentConfig.from_dict(load_json(args.config))
    alphas = [float(x) for x in args.alphas.split(",")] if args.alphas else []
    epsilons = (
        [float(x) for x in args.epsilons.split(",")] if args.epsilons else None
    )
    rows = sweep(config, alphas, epsilons)
    out = config.output_path or "."
    import os

    os.makedirs(out, exist_ok=True)
    wide = os.path.join(out, "sweep.csv")
    write_sweep_csv(rows, wide)
    write_sweep_long_csv(rows, os.path.join(out, "sweep_long.csv"))
    failed = sum(1 for r in rows if r["status"] == "failed")
    print(f"{len(rows)} grid points ({failed} failed) -> {wide}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="priorcode",
        description="Coding schemes, hard instances and Monte Carlo experiments "
        "for one-shot compression with mismatched priors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-instance", help="generate a prior pair and save it")
    g.add_argument("--alpha", type=float, required=True)
    g.add_argument("--kind", choices=["hard", "random"], default="hard")
    g.add_argument("--size", type=int, help="message count for random instances")
    g.add_argument("--seed", type=_seed_arg, help="64-hex master seed")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen_instance)

    e = sub.add_parser("encode", help="encode one message")
    e.add_argument("--scheme", choices=["ef", "pe"], required=True)
    e.add_argument("--dist", required=True, help="distribution or instance JSON")
    e.add_argument("--alpha", type=float, required=True)
    e.add_argument("--epsilon", type=float)
    e.add_argument("--message", type=int, required=True)
    e.add_argument("--seed", type=_seed_arg, required=True)
    e.add_argument("--out", help="write the codeword JSON here instead of stdout")
    e.set_defaults(func=_cmd_encode)

    d = sub.add_parser("decode", help="decode a codeword with the receiver prior")
    d.add_argument("--dist", required=True, help="distribution or instance JSON")
    d.add_argument("--codeword", required=True)
    d.add_argument("--seed", type=_seed_arg, required=True)
    d.set_defaults(func=_cmd_decode)

    x = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    x.add_argument("--config", required=True)
    x.set_defaults(func=_cmd_experiment)

    s = sub.add_parser("sweep", help="run experiments over an (alpha, epsilon) grid")
    s.add_argument("--config", required=True)
    s.add_argument("--alphas", required=True, help="comma-separated list")
    s.add_argument("--epsilons", help="comma-separated list (positive-error only)")
    s.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InstanceConstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSTANCE_FAILURE
    except (ContractViolationError, DecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT_VIOLATION
    except (
        ConfigError,
        InvalidDistributionError,
        PriorcodeError,
        ValueError,
        KeyError,
        FileNotFoundError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
