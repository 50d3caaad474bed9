"""Parameter sweeps over the built-in causal map families.

Three one-parameter families are swept: the delay weight q of the partial
swap (optionally parametrized by a physical delay time), the swap angle
theta crossed with a dephasing strength p, and the dephasing-axis angle
eta.  Each grid point is built exactly, classified, and emitted as one
row; with a shot budget the point is instead simulated, reconstructed
from counts, and classified at the user's threshold.

Rows are written with nine significant digits, so a sweep is
byte-reproducible for a fixed configuration and seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .families import family_map
from .model import q_from_delay
from .tomography import reconstruct, simulate_records
from .witnesses import EPSILON_DEFAULT, WitnessReport, classify

FAMILIES = ("delay", "theta_p", "eta")

SWEEP_HEADER = ("param_name", "theta", "p", "q", "eta", "c_cd",
                "neg_bd_plus", "neg_bd_minus", "neg_cb_plus", "neg_cb_minus",
                "neg_cd_plus", "neg_cd_minus", "class")

DEFAULT_GRIDS = {
    "delay": {"steps": 41},
    "theta_p": {"steps": 25, "p_steps": 16, "p_max": 0.3},
    "eta": {"steps": 21},
}


@dataclass(frozen=True)
class SweepConfig:
    """Which family to sweep and how."""

    family: str
    theta: float = math.pi / 2
    steps: int | None = None
    p_steps: int | None = None
    p_max: float = 0.3
    tau_coh: float | None = None
    epsilon: float = EPSILON_DEFAULT
    shots: int | None = None
    seed: int = 0
    grid_points: int = 400

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        for name in ("steps", "p_steps", "shots"):
            value = getattr(self, name)
            if value is not None and value < 2 and name != "shots":
                raise ValueError(f"{name} must be at least 2, got {value!r}")
            if name == "shots" and value is not None and value < 1:
                raise ValueError(f"shots must be positive, got {value!r}")
        if self.tau_coh is not None and self.tau_coh <= 0:
            raise ValueError(f"tau_coh must be positive, got {self.tau_coh!r}")
        if not 0 < self.p_max <= 1:
            raise ValueError(f"p_max must be in (0, 1], got {self.p_max!r}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")


@dataclass(frozen=True)
class SweepRow:
    """One classified grid point."""

    param_name: str
    theta: float
    p: float
    q: float
    eta: float
    c_cd: float
    neg_bd_plus: float
    neg_bd_minus: float
    neg_cb_plus: float
    neg_cb_minus: float
    neg_cd_plus: float
    neg_cd_minus: float
    class_label: str

    def to_json_dict(self) -> dict:
        return {
            "param_name": self.param_name,
            "theta": self.theta, "p": self.p, "q": self.q, "eta": self.eta,
            "c_cd": self.c_cd,
            "neg_bd_plus": self.neg_bd_plus, "neg_bd_minus": self.neg_bd_minus,
            "neg_cb_plus": self.neg_cb_plus, "neg_cb_minus": self.neg_cb_minus,
            "neg_cd_plus": self.neg_cd_plus, "neg_cd_minus": self.neg_cd_minus,
            "class": self.class_label,
        }


def _grid_values(config: SweepConfig) -> list[tuple[str, float, float, float, float | None]]:
    """(param_name, theta, p, q, eta) for every grid point, sweep order."""
    defaults = DEFAULT_GRIDS[config.family]
    steps = config.steps or defaults["steps"]
    if config.family == "delay":
        if config.tau_coh is not None:
            taus = np.linspace(0.0, 5.0 * config.tau_coh, steps)
            return [("tau", config.theta, 0.0, q_from_delay(t, config.tau_coh), None)
                    for t in taus]
        return [("q", config.theta, 0.0, float(q), None)
                for q in np.linspace(0.0, 1.0, steps)]
    if config.family == "theta_p":
        p_steps = config.p_steps or defaults["p_steps"]
        thetas = np.linspace(0.0, math.pi, steps)
        ps = np.linspace(0.0, config.p_max, p_steps)
        return [("theta_p", float(th), float(p), 1.0, None)
                for th in thetas for p in ps]
    etas = np.linspace(0.0, math.pi / 4, steps)
    return [("eta", config.theta, 1.0, 1.0, float(e)) for e in etas]


def _point_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _classify_point(config: SweepConfig, index: int, theta: float, p: float,
                    q: float, eta: float | None) -> WitnessReport:
    cmap = family_map(theta, p=p, q=q, eta=eta)
    if config.shots is not None:
        records = simulate_records(cmap, config.shots,
                                   seed=_point_seed(config.seed, index))
        cmap = reconstruct(records)
    return classify(cmap, epsilon=config.epsilon, grid_points=config.grid_points)


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    """Classify every grid point of the configured family."""
    rows = []
    for index, (name, theta, p, q, eta) in enumerate(_grid_values(config)):
        report = _classify_point(config, index, theta, p, q, eta)
        rows.append(SweepRow(
            param_name=name, theta=theta, p=p, q=q,
            eta=0.0 if eta is None else eta,
            c_cd=report.c_cd,
            neg_bd_plus=report.neg_bd_plus, neg_bd_minus=report.neg_bd_minus,
            neg_cb_plus=report.neg_cb_plus, neg_cb_minus=report.neg_cb_minus,
            neg_cd_plus=report.neg_cd_plus, neg_cd_minus=report.neg_cd_minus,
            class_label=report.class_label))
    return rows


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def write_sweep_csv(rows: Iterable[SweepRow], fh) -> None:
    """Write rows with nine significant digits; fh is an open text file."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow([
            row.param_name, _fmt(row.theta), _fmt(row.p), _fmt(row.q),
            _fmt(row.eta), _fmt(row.c_cd),
            _fmt(row.neg_bd_plus), _fmt(row.neg_bd_minus),
            _fmt(row.neg_cb_plus), _fmt(row.neg_cb_minus),
            _fmt(row.neg_cd_plus), _fmt(row.neg_cd_minus),
            row.class_label])


def read_sweep_csv(path: str) -> list[SweepRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != SWEEP_HEADER:
            raise ValueError(f"unexpected sweep header {header!r}")
        for raw in reader:
            if not raw:
                continue
            if len(raw) != len(SWEEP_HEADER):
                raise ValueError(f"malformed sweep row {raw!r}")
            rows.append(SweepRow(param_name=raw[0],
                                 theta=float(raw[1]), p=float(raw[2]),
                                 q=float(raw[3]), eta=float(raw[4]),
                                 c_cd=float(raw[5]),
                                 neg_bd_plus=float(raw[6]), neg_bd_minus=float(raw[7]),
                                 neg_cb_plus=float(raw[8]), neg_cb_minus=float(raw[9]),
                                 neg_cd_plus=float(raw[10]), neg_cd_minus=float(raw[11]),
                                 class_label=raw[12]))
    return rows


def rows_to_json_dicts(rows: Sequence[SweepRow]) -> list[dict]:
    return [row.to_json_dict() for row in rows]
