"""Circuit fragments and the causal maps they generate.

A causal map between an early qubit C and a late qubit B (with late input
wire D) is stored as its trace-one Choi state tau on the three labeled
qubits [C, B, D].  Maps are built from a circuit fragment: a two-qubit
initial state on C and E, optional dephasing on the gate inputs D and E, a
two-qubit gate sending D,E to B,F, optional dephasing on B, and a trace
over the discarded wire F.  Conventions: |0> is the +1 eigenstate of
sigma_z, and the first label of a layout is the most significant bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .linalg import (NumericalContractError, hermiticity_defect,
                     hermitian_eigenvalues, kron, partial_trace,
                     reorder_subsystems)

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SWAP = np.array(
    [[1, 0, 0, 0],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1]], dtype=complex)


class ConstructionError(NumericalContractError):
    """A constructed map violated its invariants."""


class ZeroProbabilityError(ValueError):
    """Conditioning on an outcome whose probability vanishes."""


@dataclass(frozen=True)
class BlochVector:
    """Unit vector on the Bloch sphere."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        norm = math.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"Bloch vector must have unit norm, got {norm!r}")

    @staticmethod
    def normalized(x: float, y: float, z: float) -> "BlochVector":
        norm = math.sqrt(x * x + y * y + z * z)
        if norm < 1e-12:
            raise ValueError("cannot normalize a zero vector")
        return BlochVector(x / norm, y / norm, z / norm)

    def sigma(self) -> np.ndarray:
        """The operator n . sigma."""
        return self.x * PAULI_X + self.y * PAULI_Y + self.z * PAULI_Z

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        """Projectors onto the +1 and -1 eigenstates of n . sigma."""
        s = self.sigma()
        return (I2 + s) / 2, (I2 - s) / 2

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.z]


X_AXIS = BlochVector(1.0, 0.0, 0.0)
Y_AXIS = BlochVector(0.0, 1.0, 0.0)
Z_AXIS = BlochVector(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class QubitChannel:
    """Single-qubit channel held as a trace-one Choi matrix (output x input)."""

    choi: np.ndarray

    def __post_init__(self) -> None:
        choi = np.asarray(self.choi, dtype=complex)
        if choi.shape != (4, 4):
            raise ValueError(f"channel Choi matrix must be 4x4, got {choi.shape}")
        object.__setattr__(self, "choi", choi)
        eigs = hermitian_eigenvalues(choi, atol=1e-10)
        if eigs[0] < -1e-10:
            raise ConstructionError(f"channel Choi matrix not PSD: {eigs[0]:.3e}")
        marginal = partial_trace(choi, ("out", "in"), keep=("in",))
        if np.abs(marginal - I2 / 2).max() > 1e-10:
            raise ConstructionError("channel is not trace preserving")

    @staticmethod
    def from_kraus(ops: list[np.ndarray]) -> "QubitChannel":
        phi = _phi_plus_vec()
        choi = np.zeros((4, 4), dtype=complex)
        for k in ops:
            v = kron(np.asarray(k, dtype=complex), I2) @ phi
            choi += np.outer(v, v.conj())
        return QubitChannel(choi=choi)

    def kraus(self) -> list[np.ndarray]:
        vals, vecs = np.linalg.eigh(self.choi)
        ops = []
        for lam, v in zip(vals, vecs.T):
            if lam > 1e-12:
                ops.append(math.sqrt(2 * lam) * v.reshape(2, 2))
        return ops

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros((2, 2), dtype=complex)
        for k in self.kraus():
            out += k @ rho @ k.conj().T
        return out


@dataclass(frozen=True)
class TwoQubitGate:
    """Unitary, or finite mixture of unitaries, from D (x) E to B (x) F."""

    kind: str
    unitary: np.ndarray | None = None
    mixture_terms: tuple[tuple[float, np.ndarray], ...] | None = None

    def __post_init__(self) -> None:
        if self.kind == "unitary":
            if self.unitary is None:
                raise ValueError("unitary gate requires a matrix")
            _require_unitary(self.unitary)
        elif self.kind == "mixture":
            if not self.mixture_terms:
                raise ValueError("mixture gate requires at least one term")
            total = 0.0
            for w, u in self.mixture_terms:
                if w < -1e-15:
                    raise ValueError(f"mixture weight {w!r} is negative")
                _require_unitary(u)
                total += w
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"mixture weights sum to {total!r}, not 1")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    def terms(self) -> tuple[tuple[float, np.ndarray], ...]:
        if self.kind == "unitary":
            return ((1.0, self.unitary),)
        return self.mixture_terms


def _require_unitary(u: np.ndarray) -> None:
    u = np.asarray(u)
    if u.shape != (4, 4):
        raise ValueError(f"gate must be 4x4, got {u.shape}")
    if np.abs(u.conj().T @ u - np.eye(4)).max() > 1e-10:
        raise ValueError("gate matrix is not unitary")


@dataclass(frozen=True)
class FragmentSpec:
    """Everything needed to build one causal map."""

    initial_state: np.ndarray
    gate: TwoQubitGate
    pre_dephasing: Mapping[str, tuple[BlochVector, float]] = field(default_factory=dict)
    post_dephasing: Mapping[str, tuple[BlochVector, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        rho = np.asarray(self.initial_state, dtype=complex)
        object.__setattr__(self, "initial_state", rho)
        _require_density(rho, dim=4, atol=1e-10)
        if set(self.pre_dephasing) - {"D", "E"}:
            raise ValueError("pre-dephasing keys must be a subset of {'D', 'E'}")
        if set(self.post_dephasing) - {"B"}:
            raise ValueError("post-dephasing key must be 'B'")
        for axis, p in list(self.pre_dephasing.values()) + list(self.post_dephasing.values()):
            if not isinstance(axis, BlochVector):
                raise ValueError("dephasing axis must be a BlochVector")
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"dephasing probability {p!r} outside [0, 1]")


@dataclass(frozen=True)
class CausalMap:
    """Trace-one Choi state of a causal map on the layout (C, B, D)."""

    tau: np.ndarray
    layout: tuple[str, str, str] = ("C", "B", "D")
    provenance: FragmentSpec | str = "reconstructed"

    def __post_init__(self) -> None:
        tau = np.asarray(self.tau, dtype=complex)
        if tau.shape != (8, 8):
            raise ValueError(f"causal map must be 8x8, got {tau.shape}")
        object.__setattr__(self, "tau", tau)
        if tuple(self.layout) != ("C", "B", "D"):
            raise ValueError(f"layout must be ('C', 'B', 'D'), got {self.layout}")

    def validate(self, atol: float = 1e-9) -> "CausalMap":
        """Check trace, positivity, and trace preservation; raise on failure."""
        tau = self.tau
        trace_dev = abs(np.trace(tau).real - 1.0) + abs(np.trace(tau).imag)
        herm_dev = hermiticity_defect(tau)
        eigs = hermitian_eigenvalues((tau + tau.conj().T) / 2, atol=1.0)
        min_eig = float(eigs[0])
        tp_dev = float(np.abs(partial_trace(tau, self.layout, keep=("D",)) - I2 / 2).max())
        if trace_dev > atol or herm_dev > atol or min_eig < -atol or tp_dev > atol:
            raise ConstructionError(
                "causal map invariants violated: "
                f"|trace-1|={trace_dev:.3e}, hermiticity={herm_dev:.3e}, "
                f"min eigenvalue={min_eig:.3e}, trace-preservation={tp_dev:.3e}")
        return self

    def to_json_dict(self) -> dict:
        return {"layout": list(self.layout),
                "re": self.tau.real.tolist(),
                "im": self.tau.imag.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict, atol: float = 1e-8) -> "CausalMap":
        try:
            layout = tuple(data["layout"])
            re = np.asarray(data["re"], dtype=float)
            im = np.asarray(data["im"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed causal map record: {exc}") from exc
        if re.shape != (8, 8) or im.shape != (8, 8):
            raise ValueError("malformed causal map record: matrices must be 8x8")
        cmap = cls(tau=re + 1j * im, layout=layout, provenance="loaded")
        return cmap.validate(atol=atol)

    @classmethod
    def from_json(cls, text: str, atol: float = 1e-8) -> "CausalMap":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed causal map record: {exc}") from exc
        return cls.from_json_dict(data, atol=atol)


def _require_density(rho: np.ndarray, dim: int, atol: float = 1e-9) -> None:
    rho = np.asarray(rho)
    if rho.shape != (dim, dim):
        raise ValueError(f"state must be {dim}x{dim}, got {rho.shape}")
    if hermiticity_defect(rho) > 1e-9:
        raise ValueError("state is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > atol:
        raise ValueError(f"state trace is {np.trace(rho)!r}, not 1")
    eigs = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if eigs[0] < -atol:
        raise ValueError(f"state has negative eigenvalue {eigs[0]:.3e}")


def _phi_plus_vec() -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / math.sqrt(2)
    return v


def phi_plus() -> np.ndarray:
    """Density operator of the maximally entangled state (|00> + |11>)/sqrt(2)."""
    v = _phi_plus_vec()
    return np.outer(v, v.conj())


def partial_swap(theta: float) -> TwoQubitGate:
    """cos(theta/2) I + i sin(theta/2) SWAP; identity wiring at 0, swap at pi."""
    u = math.cos(theta / 2) * np.eye(4, dtype=complex) \
        + 1j * math.sin(theta / 2) * SWAP
    return TwoQubitGate(kind="unitary", unitary=u)


def q_from_delay(tau: float, tau_coh: float) -> float:
    """Gaussian overlap exp(-tau^2 / (2 tau_coh^2)) left by a relative delay."""
    if tau_coh <= 0:
        raise ValueError(f"coherence time must be positive, got {tau_coh!r}")
    return math.exp(-tau ** 2 / (2 * tau_coh ** 2))


def delay_gate(theta: float, q: float) -> TwoQubitGate:
    """Partial swap with weight q, mixed with identity and full swap.

    q = 1 keeps the coherent gate; q = 0 leaves the equal classical mixture
    of the two wirings.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"overlap q must lie in [0, 1], got {q!r}")
    if q == 1.0:
        return partial_swap(theta)
    terms = [(q, partial_swap(theta).unitary),
             ((1 - q) / 2, np.eye(4, dtype=complex)),
             ((1 - q) / 2, SWAP.copy())]
    return TwoQubitGate(kind="mixture",
                        mixture_terms=tuple((w, u) for w, u in terms if w > 0))


def dephasing(axis: BlochVector, p: float) -> QubitChannel:
    """Channel (1 - p/2) rho + (p/2) (n.sigma) rho (n.sigma)."""
    return QubitChannel.from_kraus(_dephasing_kraus(axis, p))


def _dephasing_kraus(axis: BlochVector, p: float) -> list[np.ndarray]:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"dephasing probability {p!r} outside [0, 1]")
    ops = [math.sqrt(1 - p / 2) * I2]
    if p > 0:
        ops.append(math.sqrt(p / 2) * axis.sigma())
    return ops


def eta_axes(eta: float) -> tuple[BlochVector, BlochVector, BlochVector]:
    """Dephasing axes (n_E, n_D, n_B) interpolating from (x, y, z) to (z, z, z)."""
    c, s = math.cos(2 * eta), math.sin(2 * eta)
    n_e = BlochVector.normalized(c, 0.0, s)
    n_d = BlochVector.normalized(c * s, -c, s * s)
    return n_e, n_d, Z_AXIS


def _apply_single_qubit(state: np.ndarray, labels: list[str],
                        kraus_ops: list[np.ndarray], on: str) -> np.ndarray:
    i = labels.index(on)
    left = np.eye(2 ** i, dtype=complex)
    right = np.eye(2 ** (len(labels) - i - 1), dtype=complex)
    out = np.zeros_like(state)
    for k in kraus_ops:
        big = kron(kron(left, k), right)
        out += big @ state @ big.conj().T
    return out


def _apply_gate(state: np.ndarray, labels: list[str], gate: TwoQubitGate,
                on: tuple[str, str], rename: tuple[str, str]) -> tuple[np.ndarray, list[str]]:
    order = list(on) + [lab for lab in labels if lab not in on]
    state = reorder_subsystems(state, labels, order)
    rest = np.eye(2 ** (len(labels) - 2), dtype=complex)
    out = np.zeros_like(state)
    for w, u in gate.terms():
        big = kron(u, rest)
        out += w * (big @ state @ big.conj().T)
    return out, [rename[0], rename[1]] + order[2:]


def build_causal_map(spec: FragmentSpec) -> CausalMap:
    """Assemble the Choi state of the fragment's causal map.

    The input wire D is represented by half of a maximally entangled pair
    D, Dp; the fragment acts on D while Dp is kept, so the surviving state
    on (C, B, Dp) is exactly the trace-one Choi state of the map.
    """
    state = kron(spec.initial_state, phi_plus())
    labels = ["C", "E", "D", "Dp"]
    for wire in ("D", "E"):
        if wire in spec.pre_dephasing:
            axis, p = spec.pre_dephasing[wire]
            state = _apply_single_qubit(state, labels, _dephasing_kraus(axis, p), wire)
    state, labels = _apply_gate(state, labels, spec.gate, on=("D", "E"),
                                rename=("B", "F"))
    if "B" in spec.post_dephasing:
        axis, p = spec.post_dephasing["B"]
        state = _apply_single_qubit(state, labels, _dephasing_kraus(axis, p), "B")
    kept = [lab for lab in labels if lab != "F"]
    tau = partial_trace(state, labels, keep=kept)
    tau = reorder_subsystems(tau, kept, ("C", "B", "Dp"))
    return CausalMap(tau=tau, provenance=spec).validate(atol=1e-9)


def apply_map(cmap: CausalMap, rho: np.ndarray) -> np.ndarray:
    """State on (C, B) produced when rho is fed into the D wire."""
    rho = np.asarray(rho, dtype=complex)
    _require_density(rho, dim=2, atol=1e-9)
    lifted = kron(np.eye(4, dtype=complex), rho.T)
    return 2.0 * partial_trace(cmap.tau @ lifted, cmap.layout, keep=("C", "B"))
