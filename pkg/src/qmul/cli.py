"""Command-line interface: build, simulate, verify and report.

Exit codes: 0 success, 1 verification or bound failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass

from . import __version__
from .analysis import check_bounds, is_power_of_two, render_table, report_passes
from .builders import BuildError, build_multiplier
from .serialize import to_json, to_qasm
from .sim import SimulationError, default_jobs, run_pairs

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXHAUSTIVE_LIMIT = 8
RANDOM_PAIRS = 1000


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    subcommand: str
    n: int | None = None
    n_list: list[int] | None = None
    x: int | None = None
    y: int | None = None
    format: str | None = None
    output_path: str | None = None
    exhaustive: bool = False
    seed: int | None = None
    jobs: int | None = None
    pairs: int = RANDOM_PAIRS
    fused: bool = True

    def __post_init__(self) -> None:
        if self.n is not None:
            for name in ("x", "y"):
                v = getattr(self, name)
                if v is not None and not 0 <= v < 1 << self.n:
                    raise UsageError(f"-{name} {v} is out of range for n={self.n} (0..{(1 << self.n) - 1})")


def _n_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or comma list, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty operand width list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmul", description="Log-depth quantum multiplier toolkit")
    p.add_argument("--version", action="version", version=f"qmul {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, multi: bool = False) -> None:
        sp.add_argument("-n", type=_n_list, required=True,
                        help="operand width" + (" (comma list allowed)" if multi else ""))
        sp.add_argument("--unfused", action="store_true",
                        help="use the separate overlap adder plus incrementer in each tree node")

    b = sub.add_parser("build", help="emit the multiplier circuit")
    common(b)
    b.add_argument("--format", choices=("qasm", "json"), default="qasm")
    b.add_argument("-o", "--output", dest="output_path")

    s = sub.add_parser("simulate", help="multiply two numbers on the simulated circuit")
    common(s)
    s.add_argument("-x", type=int, required=True)
    s.add_argument("-y", type=int, required=True)

    v = sub.add_parser("verify", help="check x*y on many input pairs")
    common(v)
    v.add_argument("--exhaustive", action="store_true", help=f"all pairs (n <= {EXHAUSTIVE_LIMIT})")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--pairs", type=int, default=RANDOM_PAIRS, help="random pair count")
    v.add_argument("--jobs", type=int, default=None, help="worker processes (default $QMUL_JOBS or 1)")

    r = sub.add_parser("report", help="compare measured costs with the closed-form bounds")
    common(r, multi=True)
    r.add_argument("--format", choices=("markdown", "json"), default="markdown")
    r.add_argument("-o", "--output", dest="output_path")
    return p


def config_from_args(ns: argparse.Namespace) -> CliConfig:
    ns_dict = vars(ns)
    n_list = ns_dict.get("n")
    if ns.subcommand != "report" and len(n_list) != 1:
        raise UsageError(f"{ns.subcommand} takes a single -n value")
    for n in n_list:
        if n < 1:
            raise UsageError(f"operand width must be >= 1, got {n}")
    return CliConfig(
        subcommand=ns.subcommand,
        n=n_list[0] if len(n_list) == 1 else None,
        n_list=n_list,
        x=ns_dict.get("x"),
        y=ns_dict.get("y"),
        format=ns_dict.get("format"),
        output_path=ns_dict.get("output_path"),
        exhaustive=ns_dict.get("exhaustive", False),
        seed=ns_dict.get("seed"),
        jobs=ns_dict.get("jobs"),
        pairs=ns_dict.get("pairs") or RANDOM_PAIRS,
        fused=not ns_dict.get("unfused", False),
    )


def _write(cfg: CliConfig, text: str) -> None:
    if cfg.output_path is None:
        sys.stdout.write(text)
        return
    try:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {cfg.output_path}: {exc.strerror}") from exc


def cmd_build(cfg: CliConfig) -> int:
    plan = build_multiplier(cfg.n, fused=cfg.fused)
    if cfg.format == "json":
        text = to_json(plan.circuit, plan.registers, {"n": plan.n}, plan.high_water)
    else:
        text = to_qasm(plan.circuit, plan.registers)
    _write(cfg, text)
    return EXIT_OK


def cmd_simulate(cfg: CliConfig) -> int:
    plan = build_multiplier(cfg.n, fused=cfg.fused)
    (res,) = run_pairs(plan.circuit, plan.registers["x"], plan.registers["y"], plan.output,
                       [(cfg.x, cfg.y)], jobs=1)
    print(f"x = {res.x_out}")
    print(f"y = {res.y_out}")
    print(f"product = {res.product}")
    print(f"ancilla clean: {'yes' if res.clean else 'no'}")
    return EXIT_OK if res.ok else EXIT_FAIL


def _pairs(cfg: CliConfig) -> list[tuple[int, int]]:
    n = cfg.n
    if cfg.exhaustive:
        if n > EXHAUSTIVE_LIMIT:
            raise UsageError(
                f"exhaustive verification is limited to n <= {EXHAUSTIVE_LIMIT} "
                f"({1 << 2 * n} pairs requested); drop --exhaustive to check "
                f"{RANDOM_PAIRS} seeded random pairs instead"
            )
        return [(a, b) for a in range(1 << n) for b in range(1 << n)]
    rng = random.Random(cfg.seed)
    return [(rng.getrandbits(n), rng.getrandbits(n)) for _ in range(cfg.pairs)]


def cmd_verify(cfg: CliConfig) -> int:
    pairs = _pairs(cfg)
    plan = build_multiplier(cfg.n, fused=cfg.fused)
    jobs = cfg.jobs if cfg.jobs is not None else default_jobs()
    results = run_pairs(plan.circuit, plan.registers["x"], plan.registers["y"], plan.output,
                        pairs, jobs=jobs)
    bad = [r for r in results if not r.ok]
    for r in bad[:20]:
        why = []
        if r.product != r.x * r.y:
            why.append(f"product {r.product} != {r.x * r.y}")
        if (r.x_out, r.y_out) != (r.x, r.y):
            why.append("inputs changed")
        if not r.clean:
            why.append("ancilla not clean")
        print(f"FAIL x={r.x} y={r.y}: {', '.join(why)}")
    mode = "exhaustive" if cfg.exhaustive else f"random, seed {cfg.seed}"
    print(f"n={cfg.n} ({mode}): {len(results) - len(bad)}/{len(results)} pass")
    return EXIT_FAIL if bad else EXIT_OK


def cmd_report(cfg: CliConfig) -> int:
    ok = True
    chunks = []
    docs = []
    for n in cfg.n_list:
        plan = build_multiplier(n, fused=cfg.fused)
        rows = check_bounds(plan)
        ok &= report_passes(rows)
        if cfg.format == "json":
            docs.append(json.loads(render_table(rows, "json", n=n)))
        else:
            note = "" if is_power_of_two(n) else " (correctness-only: bounds are checked at powers of two)"
            chunks.append(f"## n = {n}{note}\n\n{render_table(rows, 'markdown')}")
    if cfg.format == "json":
        body = docs[0] if len(docs) == 1 else docs
        text = json.dumps(body, indent=2) + "\n"
    else:
        chunks.append(f"Summary: {'all checked rows pass' if ok else 'some bounds FAILED'}\n")
        text = "\n".join(chunks)
    _write(cfg, text)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "build": cmd_build,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.subcommand](cfg)
    except (UsageError, BuildError, SimulationError) as exc:
        print(f"qmul: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
