"""Command-line front end: config ingestion and table emission.

Subcommands: ``analytic`` (closed-form curves over an audience-rating
grid), ``validate`` (Monte Carlo vs. closed forms with a pass/fail
budget), ``snapshot`` (one realization for plotting), and ``schedule``
(periodic broadcast schedules and voting transcripts).

Settings come from a flat ``key = value`` config file, overridden by
command-line flags, falling back to documented defaults. All tables are
comma-delimited with a header row; floats are printed with 10
significant digits. Outputs are byte-identical for identical
(config, seed).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import montecarlo
from .analytic import ModelParams, avg_saved, avg_wasted
from .economics import EconParams, cost_reduction, decide
from .errors import ConfigError, ParameterError
from .geometry import (
    MIN_EXPECTED_CELLS,
    PointPattern,
    Role,
    Window,
    assign_nearest,
    sample_ppp,
    snapshot_export,
)
from .montecarlo import SimPlan, format_sweep, sweep_alpha
from .scheduler import (
    Content,
    format_schedule,
    format_voting_transcript,
    run_voting,
    schedule_efficiency,
    schedule_equal,
    schedule_weighted,
    zipf_rank_weights,
)
from .streams import substream

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3

# CLI-level stream indices (distinct from per-replication streams).
_SNAPSHOT_BS, _SNAPSHOT_MU, _VOTING = 0, 1, 2


@dataclass
class RunConfig:
    """Merged settings: flag > config file > default."""

    seed: int = 0
    alpha: list[float] | None = None
    lambda_b: float = 1.0
    lambda_u: float = 3.0  # default density ratio of 3
    vr: float | None = None  # monetary knobs carry no defaults
    cb: float | None = None
    beta: float = 1.0
    window: float = 32.0
    reps: int = 100
    out: str | None = None
    override_window: bool = False
    scheme: str = "equal"
    top_n: int = 5
    period_slots: int = 5
    catalog: list[float] | None = None
    catalog_size: int = 20
    voters: int = 10000
    rounds: int = 100
    zipf_exponent: float = 1.0
    exclude_winner: bool = False
    demand: list[float] | None = None


DEFAULT_ALPHA_GRID = "0:1:0.05"


def parse_alpha_grid(text: str, where: str) -> list[float]:
    """Parse a rating grid: one value, a comma list, or start:stop:step."""
    text = text.strip()
    try:
        if ":" in text:
            start_s, stop_s, step_s = text.split(":")
            start, stop, step = float(start_s), float(stop_s), float(step_s)
            if step <= 0 or stop < start:
                raise ValueError("need start <= stop and step > 0")
            count = int((stop - start) / step + 1e-9) + 1
            values = [start + i * step for i in range(count)]
            # arithmetic drift can push the last point just past stop
            values = [stop if v > stop and v - stop < 1e-9 else v for v in values]
        elif "," in text:
            values = [float(v) for v in text.split(",")]
        else:
            values = [float(text)]
    except ValueError as exc:
        raise ConfigError(f"{where}: bad alpha grid {text!r} ({exc})") from None
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ConfigError(f"{where}: alpha {v:g} outside [0, 1]")
    return values


def _parse_bool(text: str, where: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{where}: expected a boolean, got {text!r}")


def _parse_float_list(text: str, where: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"{where}: bad number list ({exc})") from None


# key -> (converter, validator message or None)
def _convert(key: str, raw: str, where: str):
    def as_float(check=None, what=""):
        try:
            v = float(raw)
        except ValueError:
            raise ConfigError(f"{where}: {key} must be a number, got {raw!r}") from None
        if check is not None and not check(v):
            raise ConfigError(f"{where}: {key} must be {what}, got {raw}")
        return v

    def as_int(check=None, what=""):
        try:
            v = int(raw)
        except ValueError:
            raise ConfigError(f"{where}: {key} must be an integer, got {raw!r}") from None
        if check is not None and not check(v):
            raise ConfigError(f"{where}: {key} must be {what}, got {raw}")
        return v

    if key == "seed":
        return as_int(lambda v: 0 <= v < 2**64, "a u64")
    if key == "alpha":
        return parse_alpha_grid(raw, where)
    if key == "lambda_b":
        return as_float(lambda v: v > 0, "positive")
    if key == "lambda_u":
        return as_float(lambda v: v >= 0, "non-negative")
    if key == "vr":
        return as_float(lambda v: v > 0, "positive")
    if key == "cb":
        return as_float(lambda v: v >= 0, "non-negative")
    if key == "beta":
        return as_float(lambda v: 0 <= v <= 1, "in [0, 1]")
    if key == "window":
        return as_float(lambda v: v > 0, "positive")
    if key in ("reps", "rounds"):
        return as_int(lambda v: v >= 1, ">= 1")
    if key in ("top_n", "period_slots", "catalog_size"):
        return as_int(lambda v: v >= 1, ">= 1")
    if key == "voters":
        return as_int(lambda v: v >= 0, ">= 0")
    if key == "zipf_exponent":
        return as_float(lambda v: v >= 0, ">= 0")
    if key in ("override_window", "exclude_winner"):
        return _parse_bool(raw, where)
    if key in ("catalog", "demand"):
        return _parse_float_list(raw, where)
    if key == "scheme":
        if raw not in ("equal", "weighted", "vote"):
            raise ConfigError(f"{where}: scheme must be equal|weighted|vote, got {raw!r}")
        return raw
    if key == "out":
        return raw
    raise ConfigError(f"{where}: unknown key {key!r}")


def load_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; errors carry ``path:line``."""
    values: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        values[key] = _convert(key, raw, f"{path}:{lineno}")
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        for key, value in load_config_file(args.config).items():
            setattr(cfg, key, value)
    flag_map = {
        "seed": "seed",
        "alpha": "alpha",
        "lambda_b": "lambda_b",
        "lambda_u": "lambda_u",
        "vr": "vr",
        "cb": "cb",
        "beta": "beta",
        "window": "window",
        "reps": "reps",
        "out": "out",
    }
    for attr, key in flag_map.items():
        raw = getattr(args, attr, None)
        if raw is not None:
            setattr(cfg, key, _convert(key, str(raw), f"flag --{attr.replace('_', '-')}"))
    if getattr(args, "override_window", False):
        cfg.override_window = True
    return cfg


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require_econ(cfg: RunConfig) -> EconParams:
    if cfg.vr is None or cfg.cb is None:
        raise ConfigError("vr and cb must be set (no defaults for monetary values)")
    return EconParams(v_r=cfg.vr, c_b=cfg.cb, beta=cfg.beta)


def cmd_analytic(cfg: RunConfig) -> int:
    """Closed-form saved/wasted curves plus the broadcast decision."""
    econ = _require_econ(cfg)
    alphas = cfg.alpha or parse_alpha_grid(DEFAULT_ALPHA_GRID, "default")
    lines = ["alpha,analytic_saved,analytic_wasted,cr,decision"]
    for a in alphas:
        params = ModelParams(lambda_b=cfg.lambda_b, lambda_u=cfg.lambda_u, alpha=a)
        d = decide(params, econ)
        lines.append(
            f"{a:.10g},{avg_saved(params):.10g},{avg_wasted(params):.10g},"
            f"{d.cost_reduction:.10g},{d.mode.value}"
        )
    _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    """Monte Carlo sweep vs. closed forms; fails when out of budget."""
    alphas = cfg.alpha or parse_alpha_grid(DEFAULT_ALPHA_GRID, "default")
    params = ModelParams(lambda_b=cfg.lambda_b, lambda_u=cfg.lambda_u, alpha=alphas[0])
    plan = SimPlan(
        params=params,
        window=Window(cfg.window),
        replications=cfg.reps,
        master_seed=cfg.seed,
        allow_small_window=cfg.override_window,
    )
    if cfg.override_window and cfg.lambda_b * plan.window.area < MIN_EXPECTED_CELLS:
        print(
            f"warning: window holds under {MIN_EXPECTED_CELLS:.0f} expected cells; "
            "estimates will be noisy",
            file=sys.stderr,
        )
    rows = sweep_alpha(plan, alphas)
    _emit(format_sweep(rows), cfg.out)

    all_ok = True
    for row in rows:
        saved_err = abs(row.report.saved_mean - row.analytic_saved)
        wasted_err = abs(row.report.wasted_mean - row.analytic_wasted)
        ok = saved_err <= montecarlo.SAVED_TOLERANCE and wasted_err <= montecarlo.WASTED_TOLERANCE
        all_ok &= ok
        print(
            f"alpha={row.alpha:.10g}: saved err {saved_err:.4g} "
            f"(tol {montecarlo.SAVED_TOLERANCE}), wasted err {wasted_err:.4g} "
            f"(tol {montecarlo.WASTED_TOLERANCE}): {'PASS' if ok else 'FAIL'}"
        )
    print("validation " + ("PASS" if all_ok else "FAIL"))
    return EXIT_OK if all_ok else EXIT_VALIDATION


def cmd_snapshot(cfg: RunConfig) -> int:
    """One realization (all stations and users) for external plotting."""
    window = Window(cfg.window)
    if cfg.lambda_b * window.area < MIN_EXPECTED_CELLS:
        print(
            f"warning: window holds under {MIN_EXPECTED_CELLS:.0f} expected cells",
            file=sys.stderr,
        )
    bs_rng = substream(cfg.seed, _SNAPSHOT_BS)
    bss = sample_ppp(cfg.lambda_b, window, bs_rng, role=Role.BS)
    while len(bss) == 0:
        bss = sample_ppp(cfg.lambda_b, window, bs_rng, role=Role.BS)
    if cfg.lambda_u > 0:
        users = sample_ppp(cfg.lambda_u, window, substream(cfg.seed, _SNAPSHOT_MU), role=Role.MU)
    else:
        users = PointPattern(points=np.empty((0, 2)), role=Role.MU, window=window)
    census = assign_nearest(users, bss)
    _emit(snapshot_export(bss, users, census), cfg.out)
    return EXIT_OK


def _build_catalog(cfg: RunConfig) -> list[Content]:
    if cfg.catalog is not None:
        return [Content(id=i, popularity=w) for i, w in enumerate(cfg.catalog)]
    weights = zipf_rank_weights(cfg.catalog_size, cfg.zipf_exponent)
    return [Content(id=i, popularity=float(w)) for i, w in enumerate(weights)]


def _demand_map(cfg: RunConfig, catalog: list[Content]) -> dict[int, float] | None:
    if cfg.demand is None:
        return None
    if len(cfg.demand) != len(catalog):
        raise ConfigError(
            f"demand lists {len(cfg.demand)} ratings for {len(catalog)} contents"
        )
    return {c.id: r for c, r in zip(catalog, cfg.demand)}


def cmd_schedule(cfg: RunConfig) -> int:
    """Build a schedule or voting transcript; value it if demand given."""
    catalog = _build_catalog(cfg)
    demand = _demand_map(cfg, catalog)

    if cfg.scheme in ("equal", "weighted"):
        build = schedule_equal if cfg.scheme == "equal" else schedule_weighted
        schedule = build(catalog, cfg.top_n, cfg.period_slots)
        _emit(format_schedule(schedule), cfg.out)
        played = schedule
    else:
        transcript = run_voting(
            catalog,
            cfg.voters,
            cfg.rounds,
            cfg.zipf_exponent,
            substream(cfg.seed, _VOTING),
            exclude_previous_winner=cfg.exclude_winner,
        )
        _emit(format_voting_transcript(transcript), cfg.out)
        played = [winner for _, winner in transcript]

    if demand is not None:
        econ = _require_econ(cfg)
        model = ModelParams(lambda_b=cfg.lambda_b, lambda_u=cfg.lambda_u, alpha=0.0)
        value = schedule_efficiency(played, demand, model, econ)
        for i, (cid, cr) in enumerate(value.per_slot):
            print(f"slot_cr,{i},{cid},{cr:.10g}")
        print(f"total_cr,{value.total:.10g}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a key = value config file")
    common.add_argument("--seed", help="master seed (u64)")
    common.add_argument("--alpha", help="audience rating grid: x | a,b,c | start:stop:step")
    common.add_argument("--lambda-b", dest="lambda_b", help="station density")
    common.add_argument("--lambda-u", dest="lambda_u", help="user density")
    common.add_argument("--vr", help="monetary value of one radio resource")
    common.add_argument("--cb", help="broadcast implementation cost")
    common.add_argument("--beta", help="broadcast adoption fraction in [0, 1]")
    common.add_argument("--window", help="square window side length")
    common.add_argument("--reps", help="number of replications")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument(
        "--override-window",
        action="store_true",
        help="allow windows below the 100-expected-cell rule",
    )

    parser = argparse.ArgumentParser(
        prog="cellcast",
        description="Broadcast vs. unicast cost effectiveness in PPP cellular networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analytic", parents=[common], help="closed-form curves over a rating grid")
    sub.add_parser("validate", parents=[common], help="Monte Carlo cross-validation")
    sub.add_parser("snapshot", parents=[common], help="export one spatial realization")
    sub.add_parser("schedule", parents=[common], help="periodic broadcast scheduling")
    return parser


_COMMANDS = {
    "analytic": cmd_analytic,
    "validate": cmd_validate,
    "snapshot": cmd_snapshot,
    "schedule": cmd_schedule,
}


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        return _COMMANDS[args.command](cfg)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
