"""Command line interface.

Four subcommands: ``sweep`` classifies a whole parameter grid, ``classify``
reports the witnesses of a single map, ``tomo`` simulates a tomography run
end to end, and ``dump-map`` prints a map as JSON.  A key=value config
file can supply any option; explicit flags win over the file.

Exit codes: 0 on success, 2 for configuration or input errors, 3 when a
numerical contract is violated.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .families import family_map
from .linalg import NumericalContractError
from .model import CausalMap, q_from_delay
from .sweep import SweepConfig, rows_to_json_dicts, run_sweep, write_sweep_csv
from .tomography import simulate_records, tomography_report, write_counts_csv
from .witnesses import EPSILON_DEFAULT, classify

_INT_KEYS = {"steps", "p_steps", "shots", "seed", "grid_points", "n_boot"}
_FLOAT_KEYS = {"theta", "p", "q", "tau", "tau_coh", "eta", "epsilon", "p_max"}
_STR_KEYS = {"family", "out", "format", "map"}


def _read_config_file(path: str) -> dict:
    """Parse key=value lines; blank lines and # comments are skipped."""
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, text = line.partition("=")
            key, text = key.strip(), text.strip()
            if key in _INT_KEYS:
                values[key] = int(text)
            elif key in _FLOAT_KEYS:
                values[key] = float(text)
            elif key in _STR_KEYS:
                values[key] = text
            else:
                raise ValueError(f"{path}:{lineno}: unknown option {key!r}")
    return values


class _Options:
    """Flag values merged over config-file values merged over defaults."""

    def __init__(self, args: argparse.Namespace):
        self._args = args
        self._config = _read_config_file(args.config) if getattr(args, "config", None) else {}

    def get(self, key: str, default=None):
        value = getattr(self._args, key, None)
        if value is None:
            value = self._config.get(key, default)
        return value


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key=value file with option defaults")
    sub.add_argument("--epsilon", type=float, help="decision threshold")
    sub.add_argument("--out", help="output path (default stdout)")


def _add_point(sub: argparse.ArgumentParser, with_map: bool = True) -> None:
    if with_map:
        sub.add_argument("--map", help="load a causal map JSON file instead of building one")
    sub.add_argument("--theta", type=float, help="partial swap angle in radians")
    sub.add_argument("--p", type=float, help="dephasing strength in [0, 1]")
    sub.add_argument("--q", type=float, help="delay weight of the coherent swap")
    sub.add_argument("--tau", type=float, help="delay time, used with --tau-coh")
    sub.add_argument("--tau-coh", type=float, dest="tau_coh", help="coherence time")
    sub.add_argument("--eta", type=float, help="dephasing-axis angle in [0, pi/4]")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalmaps",
        description="Build, classify, sweep, and tomograph two-qubit causal maps.")
    commands = parser.add_subparsers(dest="command", required=True)

    sweep = commands.add_parser("sweep", help="classify a parameter grid")
    sweep.add_argument("--family", choices=("delay", "theta_p", "eta"))
    sweep.add_argument("--theta", type=float, help="base swap angle")
    sweep.add_argument("--steps", type=int, help="grid points on the swept axis")
    sweep.add_argument("--tau-coh", type=float, dest="tau_coh",
                       help="sweep the delay family over tau in [0, 5 tau_coh]")
    sweep.add_argument("--shots", type=int, help="simulate counts instead of exact maps")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--format", choices=("csv", "json"))
    _add_common(sweep)
    sweep.set_defaults(func=_cmd_sweep)

    cls = commands.add_parser("classify", help="witness report for one map")
    _add_point(cls)
    _add_common(cls)
    cls.set_defaults(func=_cmd_classify)

    tomo = commands.add_parser("tomo", help="simulate a full tomography run")
    _add_point(tomo)
    tomo.add_argument("--shots", type=int, help="shots per measurement setting")
    tomo.add_argument("--seed", type=int)
    _add_common(tomo)
    tomo.set_defaults(func=_cmd_tomo)

    dump = commands.add_parser("dump-map", help="print a built map as JSON")
    _add_point(dump, with_map=False)
    _add_common(dump)
    dump.set_defaults(func=_cmd_dump_map)
    return parser


def _point_map(opts: _Options) -> CausalMap:
    map_path = opts.get("map")
    if map_path is not None:
        with open(map_path) as fh:
            return CausalMap.from_json(fh.read())
    theta = opts.get("theta", math.pi / 2)
    p = opts.get("p", 0.0)
    eta = opts.get("eta")
    q = opts.get("q")
    tau = opts.get("tau")
    if q is not None and tau is not None:
        raise ValueError("give either --q or --tau, not both")
    if tau is not None:
        tau_coh = opts.get("tau_coh")
        if tau_coh is None:
            raise ValueError("--tau requires --tau-coh")
        q = q_from_delay(tau, tau_coh)
    return family_map(theta, p=p, q=1.0 if q is None else q, eta=eta)


def _write_text(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _cmd_sweep(args: argparse.Namespace) -> int:
    opts = _Options(args)
    family = opts.get("family")
    if family is None:
        raise ValueError("sweep needs --family (delay, theta_p, or eta)")
    config = SweepConfig(
        family=family,
        theta=opts.get("theta", math.pi / 2),
        steps=opts.get("steps"),
        p_steps=opts.get("p_steps"),
        p_max=opts.get("p_max", 0.3),
        tau_coh=opts.get("tau_coh"),
        epsilon=opts.get("epsilon", EPSILON_DEFAULT),
        shots=opts.get("shots"),
        seed=opts.get("seed", 0),
        grid_points=opts.get("grid_points", 400))
    rows = run_sweep(config)
    out = opts.get("out")
    if opts.get("format", "csv") == "json":
        _write_text(out, _json_text(rows_to_json_dicts(rows)))
    else:
        if out is None:
            write_sweep_csv(rows, sys.stdout)
        else:
            with open(out, "w", newline="") as fh:
                write_sweep_csv(rows, fh)
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    opts = _Options(args)
    report = classify(_point_map(opts),
                      epsilon=opts.get("epsilon", EPSILON_DEFAULT),
                      grid_points=opts.get("grid_points", 400))
    _write_text(opts.get("out"), _json_text(report.to_json_dict()))
    return 0


def _cmd_tomo(args: argparse.Namespace) -> int:
    opts = _Options(args)
    shots = opts.get("shots")
    if shots is None:
        raise ValueError("tomo needs --shots")
    prefix = opts.get("out")
    if prefix is None:
        raise ValueError("tomo needs --out, used as a file prefix")
    cmap = _point_map(opts)
    records = simulate_records(cmap, shots, seed=opts.get("seed", 0))
    write_counts_csv(records, f"{prefix}_counts.csv")
    result = tomography_report(records,
                               epsilon=opts.get("epsilon"),
                               grid_points=opts.get("grid_points", 400),
                               n_boot=opts.get("n_boot", 200),
                               seed=opts.get("seed", 0))
    _write_text(f"{prefix}_map.json", result["map"].to_json() + "\n")
    payload = {"witnesses": result["witnesses"].to_json_dict(),
               "bootstrap_se": result["bootstrap_se"],
               "epsilon_effective": result["epsilon_effective"]}
    _write_text(f"{prefix}_report.json", _json_text(payload))
    return 0


def _cmd_dump_map(args: argparse.Namespace) -> int:
    opts = _Options(args)
    cmap = _point_map(opts)
    _write_text(opts.get("out"), _json_text(cmap.to_json_dict()))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
