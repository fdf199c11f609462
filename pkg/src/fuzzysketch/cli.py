"""Command-line entry point: ``fuzzysketch <command> ...``.

Exit codes: 0 success / accept, 1 reject, 2 input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import capacity
from .channel import BurstMode, ChannelKind, ChannelModel, TemplateFormatError, empirical_distribution, random_template, read_templates, write_templates
from .codes import ERASED, CodeParameterError
from .evaluate import TrialConfig, evaluate
from .minsum import DEFAULT_MAX_ITERATIONS, ProductCode, min_sum_decode, product_encode
from .sketch import Sketch, SketchFormatError, enroll, verify

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


def percent(x: Fraction) -> str:
    """Percentage with exactly two decimals, rounded half up from the exact fraction."""
    value = Decimal(x.numerator * 100) / Decimal(x.denominator)
    return str(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def parse_code(text: str) -> tuple[int, int]:
    values = parse_int_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"--code expects m1,m2, got {text!r}")
    return values[0], values[1]


def parse_rotations(text: str) -> tuple[int, ...]:
    """``min:step:max`` (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            lo, step, hi = (int(v) for v in text.split(":"))
            if step <= 0 or lo > hi:
                raise ValueError
            return tuple(range(lo, hi + 1, step))
        values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad rotation set {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty rotation set")
    return values


def parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    return lo, hi


def default_seed() -> int:
    env = os.environ.get("FSK_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"FSK_SEED is not an integer: {env!r}") from None


def _seed(args) -> int:
    return args.seed if args.seed is not None else default_seed()


def _product_code(params: tuple[int, int]) -> ProductCode:
    try:
        return ProductCode.from_params(*params)
    except CodeParameterError as exc:
        raise InputError(str(exc)) from None


def _bits_from_text(text: str, allow_erasure: bool = False) -> np.ndarray:
    symbols = {"0": 0, "1": 1}
    if allow_erasure:
        symbols.update({"?": ERASED, "x": ERASED})
    try:
        return np.array([symbols[ch] for ch in text.strip()], dtype=np.int8)
    except KeyError as exc:
        raise InputError(f"unexpected symbol {exc.args[0]!r}") from None


def _load_template(path: str, index: int):
    try:
        templates = read_templates(path)
    except (OSError, TemplateFormatError, CodeParameterError) as exc:
        raise InputError(f"{path}: {exc}") from None
    if not 0 <= index < len(templates):
        raise InputError(f"{path}: no template at index {index}")
    return templates[index]


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="ascii", newline="\n")


def _channel_model(args, kind: ChannelKind, seed: int) -> ChannelModel:
    if kind is ChannelKind.NON_MATCHING:
        return ChannelModel(kind, 0.5, args.erasures, None, seed)
    return ChannelModel(kind, args.p, args.erasures, args.bursts, seed, args.burst_mode)


# commands


def cmd_capacity(args) -> int:
    try:
        n, samples = capacity.read_samples(args.samples)
    except (OSError, UnicodeDecodeError, capacity.CapacityError) as exc:
        raise InputError(f"cannot read sample file: {exc}") from None
    if args.n is not None and args.n != n:
        raise InputError(f"--n {args.n} disagrees with sample file header N={n}")
    if not samples:
        raise InputError("sample file has no samples")
    lines = ["dimension,best_frr_percent"]
    for k in args.dims:
        try:
            frr = capacity.best_theoretical_frr(samples, capacity.CapacityQuery(n, k))
        except capacity.CapacityError as exc:
            raise InputError(str(exc)) from None
        lines.append(f"{k},{percent(frr)}")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    seed = _seed(args)
    kind = ChannelKind(args.kind)
    if args.templates:
        base = _load_template(args.templates, args.index)
    else:
        base = random_template(args.length, np.random.default_rng([seed, 2]))
    try:
        model = _channel_model(args, kind, seed)
        samples = empirical_distribution(model, base, args.trials)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _write(args.out, capacity.format_samples(base.length, samples))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    seed = _seed(args)
    _product_code(args.code)
    templates = ()
    if args.templates:
        try:
            templates = tuple(read_templates(args.templates))
        except (OSError, TemplateFormatError, CodeParameterError) as exc:
            raise InputError(f"{args.templates}: {exc}") from None
    config = TrialConfig(args.code, args.rotations, args.iters, not args.no_interleave, seed, templates)
    nm_trials = args.trials if args.nm_trials is None else args.nm_trials
    try:
        matching = _channel_model(args, ChannelKind.MATCHING, seed)
        non_matching = _channel_model(args, ChannelKind.NON_MATCHING, seed)
        report = evaluate(config, matching, non_matching, args.trials, nm_trials, jobs=args.jobs)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    print(report.summary())
    if args.out:
        Path(args.out).write_text(report.to_csv(), encoding="ascii", newline="\n")
    return EXIT_OK


def cmd_sketch_enroll(args) -> int:
    pc = _product_code(args.code)
    template = _load_template(args.template, args.index)
    if template.length != pc.length:
        raise InputError(f"template has {template.length} bits, code {pc!r} needs {pc.length}")
    sketch = enroll(template, pc, _seed(args), digest_algorithm_id=args.digest)
    Path(args.out).write_bytes(sketch.to_bytes())
    return EXIT_OK


def cmd_sketch_verify(args) -> int:
    try:
        sketch = Sketch.from_bytes(Path(args.sketch).read_bytes())
    except (OSError, SketchFormatError, CodeParameterError) as exc:
        raise InputError(f"{args.sketch}: {exc}") from None
    pc = _product_code(sketch.code_params)
    probe = _load_template(args.probe, args.index)
    if probe.length != pc.length:
        raise InputError(f"probe has {probe.length} bits, sketch needs {pc.length}")
    result = verify(sketch, probe, pc, args.rotations, args.iters)
    if result.accepted:
        print(f"accept rotation={result.rotation} iterations={result.iterations}")
        return EXIT_OK
    print(f"reject attempts={result.attempts}")
    return EXIT_REJECT


def cmd_encode(args) -> int:
    pc = _product_code(args.code)
    msg = _bits_from_text(args.message)
    if msg.size != pc.dimension:
        raise InputError(f"message needs {pc.dimension} bits, got {msg.size}")
    print("".join(map(str, product_encode(pc, msg))))
    return EXIT_OK


def cmd_decode(args) -> int:
    pc = _product_code(args.code)
    received = _bits_from_text(args.received, allow_erasure=True)
    if received.size != pc.length:
        raise InputError(f"received word needs {pc.length} symbols, got {received.size}")
    result = min_sum_decode(received, pc, args.iters)
    word = "".join("?" if s == ERASED else str(s) for s in result.word)
    print(f"status={result.status.value} iterations={result.iterations_used}")
    print(word)
    return EXIT_OK if result.ok else EXIT_REJECT


def cmd_template(args) -> int:
    """Write random full-mask templates, handy for trying the sketch commands."""
    rng = np.random.default_rng(_seed(args))
    write_templates(args.out, [random_template(args.length, rng) for _ in range(args.count)], text=args.text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzysketch", description="Iris fuzzy sketches with min-sum decoded product codes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=None, help="random seed (fallback: $FSK_SEED, then 0)")

    def add_code(p):
        p.add_argument("--code", type=parse_code, default=(6, 5), help="component RM(1,m) orders m1,m2 (default 6,5)")

    def add_decoder(p):
        p.add_argument("--iters", type=int, default=DEFAULT_MAX_ITERATIONS, help="iteration budget (default 20)")
        p.add_argument(
            "--rotations", type=parse_rotations, default=tuple(range(-8, 9, 2)),
            help="shift set min:step:max or a,b,c; write --rotations=-8:2:8 for negative starts",
        )

    def add_channel(p):
        p.add_argument("--p", type=float, default=0.0, help="matching-channel flip probability")
        p.add_argument("--erasures", type=parse_range, default=(0, 0), help="erasure count range lo:hi")
        p.add_argument("--bursts", type=parse_range, default=None, help="burst count:length")
        p.add_argument("--burst-mode", choices=[m.value for m in BurstMode], default=BurstMode.FLIP.value)

    p = sub.add_parser("capacity", help="best theoretical FRR per code dimension")
    p.add_argument("--samples", required=True, help="sample file (N=<int> header, w_n,w_e lines)")
    p.add_argument("--dims", type=parse_int_list, default=[42, 64, 80, 128])
    p.add_argument("--n", type=int, default=None, help="expected code length; must match the file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("simulate", help="write an error/erasure sample file from a channel model")
    add_channel(p)
    add_seed(p)
    p.add_argument("--kind", choices=[k.value for k in ChannelKind], default=ChannelKind.MATCHING.value)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--length", type=int, default=2048)
    p.add_argument("--templates", default=None, help="take the base template from this file")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="FRR/FAR of enroll+verify over simulated channels")
    add_code(p)
    add_decoder(p)
    add_channel(p)
    add_seed(p)
    p.add_argument("--trials", type=int, default=100, help="matching trials")
    p.add_argument("--nm-trials", type=int, default=None, help="non-matching trials (default: --trials)")
    p.add_argument("--templates", default=None, help="enroll templates from this file instead of random ones")
    p.add_argument("--no-interleave", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None, help="per-trial CSV path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sketch", help="enroll or verify with sketch files")
    ssub = p.add_subparsers(dest="action", required=True)
    e = ssub.add_parser("enroll")
    add_code(e)
    add_seed(e)
    e.add_argument("--template", required=True)
    e.add_argument("--index", type=int, default=0)
    e.add_argument("--digest", type=int, default=1, choices=[1, 2, 3], help="1 sha256, 2 sha512, 3 blake2b-256")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_sketch_enroll)
    v = ssub.add_parser("verify")
    add_decoder(v)
    v.add_argument("--sketch", required=True)
    v.add_argument("--probe", required=True)
    v.add_argument("--index", type=int, default=0)
    v.set_defaults(func=cmd_sketch_verify)

    p = sub.add_parser("encode", help="encode a bit-string message with the product code")
    add_code(p)
    p.add_argument("message")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="min-sum decode a received string of 0/1/?")
    add_code(p)
    p.add_argument("--iters", type=int, default=DEFAULT_MAX_ITERATIONS)
    p.add_argument("received")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("template", help="write random full-mask templates")
    add_seed(p)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--length", type=int, default=2048)
    p.add_argument("--text", action="store_true", help="hex text instead of binary records")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_template)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, CodeParameterError) as exc:
        print(f"fuzzysketch: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
