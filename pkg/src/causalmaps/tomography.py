"""Simulated process tomography for two-qubit causal maps.

A tomography run measures C and B in the three Pauli bases while feeding
the six Pauli eigenstates into the input wire D, 54 settings in all.
Counts are multinomial samples of the predicted outcome distributions.
Reconstruction inverts the linear relation between the map's Pauli
coordinates and the outcome probabilities, then projects the estimate
onto the physical set (positive, trace one, trace preserving).

The model-based fits assume the circuit fragment behind the map: an
initial two-qubit state on C, E followed by a partial swap.  They stay
useful for data that is close to, but not exactly inside, that family;
a residual above ``RESIDUAL_WARN`` triggers a warning.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .linalg import NumericalContractError, kron, partial_trace
from .model import (BlochVector, CausalMap, FragmentSpec, X_AXIS, Y_AXIS,
                    Z_AXIS, I2, PAULI_X, PAULI_Y, PAULI_Z, build_causal_map,
                    delay_gate, eta_axes, q_from_delay)

AXES = {"x": X_AXIS, "y": Y_AXIS, "z": Z_AXIS}
BASIS_LETTERS = ("x", "y", "z")
D_PREPS = ("x+", "x-", "y+", "y-", "z+", "z-")
OUTCOME_ORDER = ((+1, +1), (+1, -1), (-1, +1), (-1, -1))

COUNTS_HEADER = ("setting_c", "setting_d", "setting_b", "c", "b", "count", "shots")
RESIDUAL_WARN = 0.02

_PAULI_1Q = (I2, PAULI_X, PAULI_Y, PAULI_Z)
_PAULI_3Q = np.stack([kron(kron(a, b), c)
                      for a in _PAULI_1Q for b in _PAULI_1Q for c in _PAULI_1Q])
_PAULI_2Q = np.stack([kron(a, b) for a in _PAULI_1Q for b in _PAULI_1Q])


@dataclass(frozen=True, order=True)
class TomographySetting:
    """One choice of C basis, D input eigenstate, and B basis."""

    c_basis: str
    d_prep: str
    b_basis: str

    def __post_init__(self) -> None:
        if self.c_basis not in BASIS_LETTERS or self.b_basis not in BASIS_LETTERS:
            raise ValueError(f"bases must be one of {BASIS_LETTERS}")
        if self.d_prep not in D_PREPS:
            raise ValueError(f"d_prep must be one of {D_PREPS}")

    def sort_key(self) -> tuple[int, int, int]:
        return (BASIS_LETTERS.index(self.c_basis), D_PREPS.index(self.d_prep),
                BASIS_LETTERS.index(self.b_basis))

    def c_projectors(self) -> tuple[np.ndarray, np.ndarray]:
        return AXES[self.c_basis].projectors()

    def b_projectors(self) -> tuple[np.ndarray, np.ndarray]:
        return AXES[self.b_basis].projectors()

    def d_state(self) -> np.ndarray:
        plus, minus = AXES[self.d_prep[0]].projectors()
        return plus if self.d_prep[1] == "+" else minus


def standard_settings() -> tuple[TomographySetting, ...]:
    """All 54 settings in canonical (C basis, D prep, B basis) nested order."""
    return tuple(TomographySetting(c, d, b)
                 for c in BASIS_LETTERS for d in D_PREPS for b in BASIS_LETTERS)


@dataclass(frozen=True)
class CountRecord:
    """One outcome row of a tomography run.

    count is kept as a float so that exact probability tables can flow
    through the same pipeline as sampled integer counts.
    """

    setting: TomographySetting
    c: int
    b: int
    count: float
    shots: int

    def sort_key(self) -> tuple[int, int, int, int]:
        return self.setting.sort_key() + (OUTCOME_ORDER.index((self.c, self.b)),)


def outcome_probabilities(cmap: CausalMap,
                          setting: TomographySetting) -> dict[tuple[int, int], float]:
    """Joint outcome distribution for one setting, in OUTCOME_ORDER."""
    c_proj = setting.c_projectors()
    b_proj = setting.b_projectors()
    rho_d_t = setting.d_state().T
    probs: dict[tuple[int, int], float] = {}
    for c, b in OUTCOME_ORDER:
        effect = kron(kron(c_proj[0] if c > 0 else c_proj[1],
                           b_proj[0] if b > 0 else b_proj[1]), rho_d_t)
        probs[(c, b)] = float(np.trace(effect @ cmap.tau).real) * 2.0
    total = sum(probs.values())
    if abs(total - 1.0) > 1e-8:
        raise NumericalContractError(
            f"outcome probabilities sum to {total!r} for {setting}")
    return {k: max(v, 0.0) / total for k, v in probs.items()}


def sample_counts(probabilities: dict[tuple[int, int], float], shots: int,
                  seed) -> dict[tuple[int, int], int]:
    """Multinomial counts for one setting; seed may be an int or a sequence."""
    rng = np.random.default_rng(seed)
    p = np.array([probabilities[o] for o in OUTCOME_ORDER])
    drawn = rng.multinomial(shots, p / p.sum())
    return dict(zip(OUTCOME_ORDER, (int(n) for n in drawn)))


def pseudo_records(cmap: CausalMap,
                   settings: Sequence[TomographySetting] | None = None) -> list[CountRecord]:
    """Noiseless records: exact probabilities as fractional counts of one shot."""
    records = []
    for setting in settings or standard_settings():
        probs = outcome_probabilities(cmap, setting)
        for (c, b), p in probs.items():
            records.append(CountRecord(setting, c, b, p, 1))
    return records


def simulate_records(cmap: CausalMap, shots: int, seed: int,
                     settings: Sequence[TomographySetting] | None = None) -> list[CountRecord]:
    """Sampled records; setting i uses the independent stream (seed, i)."""
    if shots <= 0:
        raise ValueError(f"shots must be positive, got {shots!r}")
    records = []
    for i, setting in enumerate(settings or standard_settings()):
        probs = outcome_probabilities(cmap, setting)
        counts = sample_counts(probs, shots, seed=[seed, i])
        for (c, b), n in counts.items():
            records.append(CountRecord(setting, c, b, float(n), shots))
    return records


def _format_count(count: float) -> str:
    if float(count).is_integer():
        return str(int(count))
    return repr(float(count))


def write_counts_csv(records: Iterable[CountRecord], path: str) -> None:
    rows = sorted(records, key=CountRecord.sort_key)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COUNTS_HEADER)
        for r in rows:
            writer.writerow([r.setting.c_basis, r.setting.d_prep,
                             r.setting.b_basis, r.c, r.b,
                             _format_count(r.count), r.shots])


def read_counts_csv(path: str) -> list[CountRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != COUNTS_HEADER:
            raise ValueError(f"unexpected counts header {header!r}")
        for row in reader:
            if not row:
                continue
            if len(row) != 7:
                raise ValueError(f"malformed counts row {row!r}")
            setting = TomographySetting(row[0], row[1], row[2])
            records.append(CountRecord(setting, int(row[3]), int(row[4]),
                                       float(row[5]), int(row[6])))
    return records


def _pauli_coords_3q(tau: np.ndarray) -> np.ndarray:
    return np.einsum("nij,ji->n", _PAULI_3Q, tau).real


def _tau_from_coords(coords: np.ndarray) -> np.ndarray:
    return np.tensordot(coords.astype(complex), _PAULI_3Q, axes=([0], [0])) / 8.0


def _single_qubit_coords(op: np.ndarray) -> np.ndarray:
    return np.array([np.trace(op @ s).real for s in _PAULI_1Q])


@lru_cache(maxsize=8)
def _design_matrix(settings: tuple[TomographySetting, ...]) -> np.ndarray:
    """Rows map the 64 Pauli coordinates of tau to outcome probabilities.

    The effect for outcome (c, b) factorizes over C, B, D, so each row is
    an outer product of three single-qubit coordinate vectors, scaled so
    that p = row . coords with coords_ijk = Tr[tau (s_i x s_j x s_k)].
    """
    rows = []
    for setting in settings:
        c_proj = setting.c_projectors()
        b_proj = setting.b_projectors()
        d_coords = _single_qubit_coords(setting.d_state().T)
        for c, b in OUTCOME_ORDER:
            c_coords = _single_qubit_coords(c_proj[0] if c > 0 else c_proj[1])
            b_coords = _single_qubit_coords(b_proj[0] if b > 0 else b_proj[1])
            rows.append(np.einsum("i,j,k->ijk", c_coords, b_coords,
                                  d_coords).ravel() / 4.0)
    return np.array(rows)


def _frequencies(records: Iterable[CountRecord]) -> tuple[tuple[TomographySetting, ...],
                                                          np.ndarray,
                                                          dict[TomographySetting, int]]:
    """Canonically ordered settings, frequency vector, and shots per setting.

    Duplicate rows for the same setting and outcome are summed, and the
    per-setting total count is the frequency denominator.
    """
    counts: dict[tuple, float] = {}
    totals: dict[TomographySetting, float] = {}
    for r in records:
        key = (r.setting, r.c, r.b)
        counts[key] = counts.get(key, 0.0) + r.count
        totals[r.setting] = totals.get(r.setting, 0.0) + r.count
    if not counts:
        raise ValueError("no tomography records given")
    settings = tuple(sorted(totals, key=TomographySetting.sort_key))
    freqs = []
    shots: dict[TomographySetting, int] = {}
    for setting in settings:
        total = totals[setting]
        if total <= 0:
            raise ValueError(f"no counts recorded for {setting}")
        shots[setting] = int(round(total))
        for c, b in OUTCOME_ORDER:
            freqs.append(counts.get((setting, c, b), 0.0) / total)
    return settings, np.array(freqs), shots


def reconstruct(records: Iterable[CountRecord], atol: float = 1e-9,
                max_iterations: int = 500) -> CausalMap:
    """Linear inversion followed by projection onto the physical set.

    The unconstrained least-squares estimate is alternately projected onto
    the positive unit-trace states and the trace-preserving affine subspace
    until both hold to ``atol``; at finite shots this converges in a few
    dozen rounds.
    """
    settings, freqs, _ = _frequencies(records)
    design = _design_matrix(settings)
    coords, _, rank, _ = np.linalg.lstsq(design, freqs, rcond=None)
    if rank < 64:
        raise NumericalContractError(
            f"settings only constrain {rank} of 64 coordinates; "
            "the map is not identifiable from these records")
    tau = _tau_from_coords(coords)
    tau = (tau + tau.conj().T) / 2.0
    eye_cb = np.eye(4, dtype=complex) / 4.0
    for _ in range(max_iterations):
        eigs, vecs = np.linalg.eigh(tau)
        tp_defect = partial_trace(tau, ("C", "B", "D"), keep=("D",)) - I2 / 2.0
        if eigs[0] >= -atol and np.abs(tp_defect).max() <= atol:
            return CausalMap(tau=tau, provenance="reconstructed").validate(atol=1e-8)
        clipped = np.clip(eigs, 0.0, None)
        tau = (vecs * clipped) @ vecs.conj().T
        tau /= np.trace(tau).real
        tp_defect = partial_trace(tau, ("C", "B", "D"), keep=("D",)) - I2 / 2.0
        tau = tau - kron(eye_cb, tp_defect)
    raise NumericalContractError(
        f"physical projection did not converge in {max_iterations} iterations")


def _golden_section(func, lo: float, hi: float, tol: float = 1e-6) -> float:
    """Minimum of a unimodal function on [lo, hi] to absolute tolerance."""
    inv_phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = func(c), func(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = func(d)
    return (a + b) / 2


def _fragment_tau(rho_ce: np.ndarray, theta: float) -> np.ndarray:
    spec = FragmentSpec(initial_state=rho_ce, gate=delay_gate(theta, 1.0))
    return build_causal_map(spec).tau


def _grid_then_golden(objective, lo: float, hi: float, n_grid: int = 33) -> float:
    grid = np.linspace(lo, hi, n_grid)
    values = [objective(t) for t in grid]
    k = int(np.argmin(values))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, n_grid - 1)]
    return _golden_section(objective, a, b)


@dataclass(frozen=True)
class FitResult:
    """Best swap angle for the ideal family, with a rough standard error."""

    theta: float
    residual: float
    theta_se: float


def fit_theta(records: Iterable[CountRecord]) -> FitResult:
    """Fit the partial-swap angle assuming the maximally entangled C, E state.

    Records are reduced to canonically ordered frequencies first, so the
    result does not depend on their order.  A coarse grid over [0, pi]
    brackets the optimum and golden-section search refines it to 1e-6 rad.
    """
    settings, freqs, shots = _frequencies(records)
    design = _design_matrix(settings)
    phi = _phi_plus_4()

    def objective(theta: float) -> float:
        predicted = design @ _pauli_coords_3q(_fragment_tau(phi, theta))
        return float(np.sum((predicted - freqs) ** 2))

    theta_hat = _grid_then_golden(objective, 0.0, math.pi)
    residual = objective(theta_hat)
    step = 1e-4
    curvature = (objective(theta_hat + step) - 2 * residual
                 + objective(theta_hat - step)) / step ** 2
    dof = max(len(freqs) - 1, 1)
    variance = 2.0 * (residual / dof) / curvature if curvature > 0 else math.inf
    return FitResult(theta=theta_hat, residual=residual,
                     theta_se=math.sqrt(variance))


def _phi_plus_4() -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / math.sqrt(2)
    return np.outer(v, v.conj())


def _project_to_density(rho: np.ndarray) -> np.ndarray:
    rho = (rho + rho.conj().T) / 2.0
    eigs, vecs = np.linalg.eigh(rho)
    clipped = np.clip(eigs, 0.0, None)
    if clipped.sum() <= 0:
        raise NumericalContractError("fitted initial state has no positive part")
    rho = (vecs * clipped) @ vecs.conj().T
    return rho / np.trace(rho).real


def _fit_initial_state(design: np.ndarray, freqs: np.ndarray,
                       theta: float) -> np.ndarray:
    """Least-squares C, E state at fixed swap angle.

    The map is linear in the initial state, so each two-qubit Pauli
    coordinate contributes one column; the identity coordinate is pinned
    to one and the remaining 15 are solved unconstrained, then the result
    is projected back onto density operators.
    """
    eye4 = np.eye(4, dtype=complex)
    tau_eye = _fragment_tau(eye4 / 4.0, theta)
    columns = []
    for i, g in enumerate(_PAULI_2Q):
        if i == 0:
            tau_g = 4.0 * tau_eye
        else:
            tau_g = 4.0 * (_fragment_tau((eye4 + g) / 4.0, theta) - tau_eye)
        columns.append(design @ _pauli_coords_3q(tau_g) / 4.0)
    matrix = np.column_stack(columns)
    target = freqs - matrix[:, 0]
    rest, _, _, _ = np.linalg.lstsq(matrix[:, 1:], target, rcond=None)
    coords = np.concatenate(([1.0], rest))
    rho = np.tensordot(coords.astype(complex), _PAULI_2Q, axes=([0], [0])) / 4.0
    return _project_to_density(rho)


@dataclass(frozen=True)
class Prediction:
    """Fitted base process and the map predicted for modified parameters."""

    map: CausalMap
    theta: float
    rho_ce: np.ndarray
    residual_rms: float


def predict_from_base(records: Iterable[CountRecord], q: float | None = None,
                      tau: float | None = None, tau_coh: float | None = None,
                      p: float = 0.0, eta: float | None = None) -> Prediction:
    """Fit the circuit fragment behind measured records, then modify it.

    The swap angle and the initial C, E state are fitted by alternating
    least squares until the residual stops improving, and the requested
    delay weight, dephasing strength, or dephasing-axis angle is applied
    to the fitted fragment.  The delay may be given directly as q or as a
    time tau with tau_coh.
    """
    if q is not None and tau is not None:
        raise ValueError("give either q or tau, not both")
    if tau is not None:
        if tau_coh is None:
            raise ValueError("tau requires tau_coh")
        q_eff = q_from_delay(tau, tau_coh)
    else:
        q_eff = 1.0 if q is None else q

    settings, freqs, _ = _frequencies(records)
    design = _design_matrix(settings)
    theta_hat = fit_theta(records).theta
    rho_hat = _phi_plus_4()
    best = math.inf
    for _ in range(40):
        rho_hat = _fit_initial_state(design, freqs, theta_hat)

        def objective(theta: float) -> float:
            predicted = design @ _pauli_coords_3q(_fragment_tau(rho_hat, theta))
            return float(np.sum((predicted - freqs) ** 2))

        theta_hat = _grid_then_golden(objective, 0.0, math.pi)
        current = objective(theta_hat)
        if best - current < 1e-14:
            break
        best = current

    predicted = design @ _pauli_coords_3q(_fragment_tau(rho_hat, theta_hat))
    residual_rms = float(np.sqrt(np.mean((predicted - freqs) ** 2)))
    if residual_rms > RESIDUAL_WARN:
        warnings.warn(f"base process fit residual {residual_rms:.3g} exceeds "
                      f"{RESIDUAL_WARN}; the records are far from the circuit "
                      "fragment family and predictions may be unreliable",
                      stacklevel=2)

    n_e, n_d, n_b = eta_axes(eta) if eta is not None else (X_AXIS, Y_AXIS, Z_AXIS)
    pre = {"D": (n_d, p), "E": (n_e, p)} if p > 0 else {}
    post = {"B": (n_b, p)} if p > 0 else {}
    spec = FragmentSpec(initial_state=rho_hat, gate=delay_gate(theta_hat, q_eff),
                        pre_dephasing=pre, post_dephasing=post)
    return Prediction(map=build_causal_map(spec), theta=theta_hat,
                      rho_ce=rho_hat, residual_rms=residual_rms)


def bootstrap_errors(records: Iterable[CountRecord], n_boot: int = 200,
                     seed: int = 0) -> dict[str, float]:
    """Standard errors of the scalar witnesses by multinomial resampling.

    Resample i redraws every setting's counts from its empirical outcome
    distribution with the stream (seed, i), reconstructs, and recomputes
    the covariance witness and the six fixed-basis negativities.
    """
    from .witnesses import c_cd_witness, reference_negativities

    records = list(records)
    if any(not float(r.count).is_integer() for r in records):
        raise ValueError("bootstrap needs sampled integer counts")
    settings, freqs, shots = _frequencies(records)
    samples: dict[str, list[float]] = {}
    n_settings = len(settings)
    for i in range(n_boot):
        resampled = []
        for j, setting in enumerate(settings):
            p = freqs[4 * j:4 * j + 4]
            probs = dict(zip(OUTCOME_ORDER, p))
            counts = sample_counts(probs, shots[setting], seed=[seed, i, j])
            for (c, b), n in counts.items():
                resampled.append(CountRecord(setting, c, b, float(n), shots[setting]))
        cmap = reconstruct(resampled)
        stats = dict(reference_negativities(cmap))
        stats["c_cd"] = c_cd_witness(cmap)
        for key, value in stats.items():
            samples.setdefault(key, []).append(value)
    return {key: float(np.std(vals, ddof=1)) for key, vals in samples.items()}


def tomography_report(records: Iterable[CountRecord], epsilon: float | None = None,
                      grid_points: int = 400, n_boot: int = 200,
                      seed: int = 0) -> dict:
    """Reconstruct, estimate finite-shot uncertainty, and classify.

    With sampled counts the decision threshold is raised to the largest
    bootstrap standard error, so shot noise alone cannot promote a map to
    a stronger class.  Exact probability records skip the bootstrap.
    """
    from .witnesses import EPSILON_DEFAULT, classify

    records = list(records)
    base_epsilon = EPSILON_DEFAULT if epsilon is None else epsilon
    cmap = reconstruct(records)
    sampled = all(float(r.count).is_integer() for r in records) and \
        any(r.shots > 1 for r in records)
    errors = bootstrap_errors(records, n_boot=n_boot, seed=seed) if sampled else {}
    threshold = max([base_epsilon] + list(errors.values()))
    report = classify(cmap, epsilon=threshold, grid_points=grid_points)
    return {"map": cmap, "witnesses": report, "bootstrap_se": errors,
            "epsilon_effective": threshold}
