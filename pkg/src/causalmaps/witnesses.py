"""Witnesses and classification of two-qubit causal maps.

Three negativities and one covariance witness are computed from a causal
map.  Conditioning on the early qubit C probes the cause-effect pathway
(states on B, D), preparing eigenstates at the input D probes the
common-cause pathway (states on C, B), and conditioning on the late qubit
B probes selection-induced correlations between C and D.  A nonzero
covariance witness c_cd certifies a physical rather than probabilistic
mixture of the two pathways; conditional C, D entanglement on top of that
certifies a coherent combination.

All reports are one-sided: values below the decision threshold mean "no
evidence", never "disproved".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .linalg import kron, partial_trace, partial_transpose, trace_norm
from .model import (BlochVector, CausalMap, X_AXIS, Y_AXIS, Z_AXIS,
                    ZeroProbabilityError, apply_map, I2, PAULI_X, PAULI_Y,
                    PAULI_Z)

EPSILON_DEFAULT = 1e-7
NEGATIVITY_CLAMP = 1e-12
PROBABILITY_FLOOR = 1e-12

CLASS_LABELS = ("ProbC", "ProbQ", "PhysC", "PhysQ", "Coh", "undetermined")


@dataclass(frozen=True)
class ProjectivePair:
    """The two projectors of a rank-one qubit measurement."""

    bloch: BlochVector
    plus: np.ndarray
    minus: np.ndarray

    @classmethod
    def from_bloch(cls, axis: BlochVector) -> "ProjectivePair":
        plus, minus = axis.projectors()
        return cls(bloch=axis, plus=plus, minus=minus)

    def outcomes(self) -> tuple[tuple[int, np.ndarray], tuple[int, np.ndarray]]:
        return (+1, self.plus), (-1, self.minus)


@dataclass(frozen=True)
class InducedState:
    """Normalized conditional state together with its outcome probability."""

    state: np.ndarray
    prob: float
    conditioned_on: tuple[str, int]
    labels: tuple[str, str]


def _check_effect(proj: np.ndarray) -> np.ndarray:
    proj = np.asarray(proj, dtype=complex)
    if proj.shape != (2, 2):
        raise ValueError(f"effect must be 2x2, got {proj.shape}")
    if np.abs(proj - proj.conj().T).max() > 1e-9:
        raise ValueError("effect is not Hermitian")
    eigs = np.linalg.eigvalsh(proj)
    if eigs[0] < -1e-9 or eigs[-1] > 1 + 1e-9:
        raise ValueError("effect must satisfy 0 <= proj <= identity")
    return proj


def induced_state(cmap: CausalMap, system: str, proj: np.ndarray,
                  outcome: int = +1) -> InducedState:
    """Condition the map on an outcome at C or B and trace that qubit out."""
    if system not in ("C", "B"):
        raise ValueError(f"can only condition on 'C' or 'B', got {system!r}")
    proj = _check_effect(proj)
    i = cmap.layout.index(system)
    left = np.eye(2 ** i, dtype=complex)
    right = np.eye(2 ** (2 - i), dtype=complex)
    lifted = kron(kron(left, proj), right)
    remaining = tuple(lab for lab in cmap.layout if lab != system)
    reduced = partial_trace(lifted @ cmap.tau, cmap.layout, keep=remaining)
    prob = float(np.trace(reduced).real)
    if prob < PROBABILITY_FLOOR:
        raise ZeroProbabilityError(
            f"outcome probability {prob:.3e} on {system} is numerically zero")
    return InducedState(state=reduced / prob, prob=prob,
                        conditioned_on=(system, outcome), labels=remaining)


def prepared_state_CB(cmap: CausalMap, d_proj: np.ndarray,
                      outcome: int = +1) -> InducedState:
    """Joint C, B state when a projector eigenstate is fed into D.

    Preparations are weighted uniformly, so the recorded probability is 1/2.
    """
    d_proj = _check_effect(d_proj)
    if (abs(np.trace(d_proj).real - 1.0) > 1e-9
            or np.abs(d_proj @ d_proj - d_proj).max() > 1e-9):
        raise ValueError("d_proj must be a rank-one projector")
    state = apply_map(cmap, d_proj)
    return InducedState(state=state, prob=0.5, conditioned_on=("D", outcome),
                        labels=("C", "B"))


def negativity(state: np.ndarray, labels: tuple[str, str], cut_on: str) -> float:
    """Entanglement negativity (trace_norm(partial transpose) - 1) / 2."""
    state = np.asarray(state, dtype=complex)
    if abs(np.trace(state).real - 1.0) > 1e-8:
        raise ValueError(f"state trace is {np.trace(state)!r}, not 1")
    value = (trace_norm(partial_transpose(state, labels, cut_on)) - 1.0) / 2.0
    return float(value) if value >= NEGATIVITY_CLAMP else 0.0


def covariance_xy(induced: InducedState) -> float:
    """cov(sigma_x on C, sigma_y on D) in a conditional C, D state."""
    if induced.labels != ("C", "D"):
        raise ValueError(f"covariance needs a (C, D) state, got {induced.labels}")
    rho = induced.state
    exy = float(np.trace(rho @ kron(PAULI_X, PAULI_Y)).real)
    ex = float(np.trace(rho @ kron(PAULI_X, I2)).real)
    ey = float(np.trace(rho @ kron(I2, PAULI_Y)).real)
    return exy - ex * ey


def c_cd_witness(cmap: CausalMap) -> float:
    """Outcome-weighted covariance witness 2 sum_b b P(b)^2 cov(tau^b_CD).

    Vanishes for every probabilistic mixture of pathways; a nonzero value
    certifies a physical mixture.  Outcomes with vanishing probability
    contribute nothing.
    """
    pair = ProjectivePair.from_bloch(Z_AXIS)
    total = 0.0
    for b, proj in pair.outcomes():
        try:
            induced = induced_state(cmap, "B", proj, outcome=b)
        except ZeroProbabilityError:
            continue
        total += b * induced.prob ** 2 * covariance_xy(induced)
    return 2.0 * total


def _axes_xyz(axes: Sequence[BlochVector]) -> np.ndarray:
    return np.array([[a.x, a.y, a.z] for a in axes], dtype=float)


def _stacked_projectors(axes_xyz: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sig = (axes_xyz[:, 0, None, None] * PAULI_X
           + axes_xyz[:, 1, None, None] * PAULI_Y
           + axes_xyz[:, 2, None, None] * PAULI_Z)
    return (I2 + sig) / 2.0, (I2 - sig) / 2.0


def _scan_min_negativity(cmap: CausalMap, witness: str,
                         axes_xyz: np.ndarray) -> np.ndarray:
    """Min-over-outcomes negativity for a whole stack of basis axes.

    One batched eigvalsh per outcome keeps the basis searches cheap enough
    for sweeps.  Vanishing-probability outcomes contribute zero, and the
    partial transpose always acts on the second remaining label.
    """
    tau6 = cmap.tau.reshape(2, 2, 2, 2, 2, 2)
    per_outcome = []
    for proj in _stacked_projectors(axes_xyz):
        if witness == "cc":
            rho = 2.0 * np.einsum("cbdCBe,nde->ncbCB", tau6, proj)
        elif witness == "ce":
            rho = np.einsum("nce,ebdcBD->nbdBD", proj, tau6)
        elif witness == "berkson":
            rho = np.einsum("nbe,cedCbD->ncdCD", proj, tau6)
        else:
            raise ValueError(f"unknown witness {witness!r}")
        prob = np.einsum("nabab->n", rho).real
        lam = np.linalg.eigvalsh(rho.swapaxes(2, 4).reshape(-1, 4, 4))
        safe = np.maximum(prob, PROBABILITY_FLOOR)
        values = (np.abs(lam).sum(axis=1) / safe - 1.0) / 2.0
        values = np.where(prob < PROBABILITY_FLOOR, 0.0, values)
        per_outcome.append(np.where(values < NEGATIVITY_CLAMP, 0.0, values))
    return np.minimum(per_outcome[0], per_outcome[1])


def _min_outcome_negativity(cmap: CausalMap, witness: str,
                            axis: BlochVector) -> float:
    """Worst-case negativity over the two outcomes of one basis choice."""
    return float(_scan_min_negativity(cmap, witness, _axes_xyz([axis]))[0])


def _hemisphere_grid(n: int) -> list[BlochVector]:
    """Fibonacci lattice on the upper hemisphere (antipodes give the same basis)."""
    golden = (1 + math.sqrt(5)) / 2
    points = []
    for i in range(n):
        z = (i + 0.5) / n
        r = math.sqrt(max(0.0, 1 - z * z))
        phi = 2 * math.pi * i / golden
        points.append(BlochVector.normalized(r * math.cos(phi), r * math.sin(phi), z))
    return points


def _angles_to_bloch(polar: float, azimuth: float) -> BlochVector:
    return BlochVector.normalized(math.sin(polar) * math.cos(azimuth),
                                  math.sin(polar) * math.sin(azimuth),
                                  math.cos(polar))


def _search_basis(cmap: CausalMap, witness: str,
                  grid_points: int = 400) -> tuple[BlochVector, float]:
    """Maximize the min-over-outcomes negativity over measurement axes.

    A hemisphere lattice seeded with the x, y, z reference axes supplies the
    starting point; Nelder-Mead in spherical coordinates refines it.  The
    returned value is never below the best seeded-grid value.
    """
    candidates = [X_AXIS, Y_AXIS, Z_AXIS] + _hemisphere_grid(grid_points)
    values = _scan_min_negativity(cmap, witness, _axes_xyz(candidates))
    k = int(np.argmax(values))
    best_axis, best_value = candidates[k], float(values[k])

    def objective(angles: np.ndarray) -> float:
        return -_min_outcome_negativity(
            cmap, witness, _angles_to_bloch(angles[0], angles[1]))

    polar = math.acos(max(-1.0, min(1.0, best_axis.z)))
    azimuth = math.atan2(best_axis.y, best_axis.x)
    result = minimize(objective, np.array([polar, azimuth]), method="Nelder-Mead",
                      options={"maxiter": 200, "xatol": 1e-8, "fatol": 1e-8})
    if -result.fun > best_value:
        return _angles_to_bloch(result.x[0], result.x[1]), float(-result.fun)
    return best_axis, best_value


def search_pathway_cc(cmap: CausalMap, grid_points: int = 400) -> tuple[BlochVector, float]:
    """Best preparation basis on D for common-cause entanglement between C and B."""
    return _search_basis(cmap, "cc", grid_points)


def search_pathway_ce(cmap: CausalMap, grid_points: int = 400) -> tuple[BlochVector, float]:
    """Best measurement basis on C for cause-effect entanglement between B and D."""
    return _search_basis(cmap, "ce", grid_points)


def search_berkson(cmap: CausalMap, grid_points: int = 400) -> tuple[BlochVector, float]:
    """Best measurement basis on B for selection-induced C, D entanglement."""
    return _search_basis(cmap, "berkson", grid_points)


def entanglement_breaking_flags(cmap: CausalMap,
                                epsilon: float = EPSILON_DEFAULT) -> tuple[bool, bool]:
    """(common-cause, cause-effect) pathways carried by separable marginals?"""
    tau_cb = partial_trace(cmap.tau, cmap.layout, keep=("C", "B"))
    tau_bd = partial_trace(cmap.tau, cmap.layout, keep=("B", "D"))
    cc_breaking = negativity(tau_cb, ("C", "B"), "B") < epsilon
    ce_breaking = negativity(tau_bd, ("B", "D"), "D") < epsilon
    return cc_breaking, ce_breaking


def reference_negativities(cmap: CausalMap) -> dict[str, float]:
    """Per-outcome negativities at the fixed reference bases.

    sigma_x eigenstates on C condition the B, D states; sigma_y eigenstates
    fed into D prepare the C, B states; sigma_z eigenstates on B condition
    the C, D states.  Vanishing-probability outcomes are recorded as zero.
    """
    out: dict[str, float] = {}
    for axis, system, key, cut in ((X_AXIS, "C", "neg_bd", "D"),
                                   (Z_AXIS, "B", "neg_cd", "D")):
        pair = ProjectivePair.from_bloch(axis)
        for outcome, proj in pair.outcomes():
            tag = "plus" if outcome > 0 else "minus"
            try:
                ind = induced_state(cmap, system, proj, outcome=outcome)
                out[f"{key}_{tag}"] = negativity(ind.state, ind.labels, cut)
            except ZeroProbabilityError:
                out[f"{key}_{tag}"] = 0.0
    pair = ProjectivePair.from_bloch(Y_AXIS)
    for outcome, proj in pair.outcomes():
        tag = "plus" if outcome > 0 else "minus"
        ind = prepared_state_CB(cmap, proj, outcome=outcome)
        out[f"neg_cb_{tag}"] = negativity(ind.state, ind.labels, "B")
    return out


@dataclass(frozen=True)
class WitnessReport:
    """Flat summary of every witness, search result, flag, and the class label."""

    c_cd: float
    neg_bd_plus: float
    neg_bd_minus: float
    neg_cb_plus: float
    neg_cb_minus: float
    neg_cd_plus: float
    neg_cd_minus: float
    cc_basis: BlochVector
    cc_min_negativity: float
    ce_basis: BlochVector
    ce_min_negativity: float
    berkson_basis: BlochVector
    berkson_min_negativity: float
    physical_mixture: bool
    cc_quantum: bool
    ce_quantum: bool
    berkson: bool
    cc_entanglement_breaking: bool
    ce_entanglement_breaking: bool
    class_label: str
    epsilon: float

    def to_json_dict(self) -> dict:
        return {
            "c_cd": self.c_cd,
            "neg_bd_plus": self.neg_bd_plus,
            "neg_bd_minus": self.neg_bd_minus,
            "neg_cb_plus": self.neg_cb_plus,
            "neg_cb_minus": self.neg_cb_minus,
            "neg_cd_plus": self.neg_cd_plus,
            "neg_cd_minus": self.neg_cd_minus,
            "cc_basis": self.cc_basis.as_list(),
            "cc_min_negativity": self.cc_min_negativity,
            "ce_basis": self.ce_basis.as_list(),
            "ce_min_negativity": self.ce_min_negativity,
            "berkson_basis": self.berkson_basis.as_list(),
            "berkson_min_negativity": self.berkson_min_negativity,
            "physical_mixture": self.physical_mixture,
            "cc_quantum": self.cc_quantum,
            "ce_quantum": self.ce_quantum,
            "berkson": self.berkson,
            "cc_entanglement_breaking": self.cc_entanglement_breaking,
            "ce_entanglement_breaking": self.ce_entanglement_breaking,
            "class": self.class_label,
            "epsilon": self.epsilon,
        }


def _class_label(physical: bool, quantum_pathway: bool, coherent: bool) -> str:
    if coherent:
        return "Coh"
    if physical:
        return "PhysQ" if quantum_pathway else "PhysC"
    return "ProbQ" if quantum_pathway else "ProbC"


def classify(cmap: CausalMap, epsilon: float = EPSILON_DEFAULT,
             grid_points: int = 400) -> WitnessReport:
    """Compute all witnesses and assign the weakest class they support.

    The coherent class requires selection-induced C, D entanglement for
    some basis on B together with at least one pathway marginal that is
    not entanglement breaking.
    """
    refs = reference_negativities(cmap)
    c_cd = c_cd_witness(cmap)
    cc_basis, cc_value = search_pathway_cc(cmap, grid_points)
    ce_basis, ce_value = search_pathway_ce(cmap, grid_points)
    berkson_basis, berkson_value = search_berkson(cmap, grid_points)
    cc_breaking, ce_breaking = entanglement_breaking_flags(cmap, epsilon)

    physical = abs(c_cd) > epsilon
    cc_quantum = cc_value > epsilon
    ce_quantum = ce_value > epsilon
    berkson_flag = berkson_value > epsilon
    coherent = berkson_flag and not (cc_breaking and ce_breaking)

    return WitnessReport(
        c_cd=c_cd,
        neg_bd_plus=refs["neg_bd_plus"], neg_bd_minus=refs["neg_bd_minus"],
        neg_cb_plus=refs["neg_cb_plus"], neg_cb_minus=refs["neg_cb_minus"],
        neg_cd_plus=refs["neg_cd_plus"], neg_cd_minus=refs["neg_cd_minus"],
        cc_basis=cc_basis, cc_min_negativity=cc_value,
        ce_basis=ce_basis, ce_min_negativity=ce_value,
        berkson_basis=berkson_basis, berkson_min_negativity=berkson_value,
        physical_mixture=physical, cc_quantum=cc_quantum, ce_quantum=ce_quantum,
        berkson=berkson_flag, cc_entanglement_breaking=cc_breaking,
        ce_entanglement_breaking=ce_breaking,
        class_label=_class_label(physical, cc_quantum or ce_quantum, coherent),
        epsilon=epsilon)
