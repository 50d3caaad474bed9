"""Dense linear algebra on small labeled multi-qubit operators.

Matrices are plain complex numpy arrays indexed by an ordered tuple of
subsystem labels; the first label owns the most significant bit of the
row/column index.  Dimensions never exceed 16x16 here, so everything is
exact dense arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITICITY_ATOL = 1e-12


class NumericalContractError(Exception):
    """A numerical precondition or invariant was violated."""


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered qubit labels for a square operator."""

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate subsystem labels: {self.labels}")

    @property
    def dim(self) -> int:
        return 2 ** len(self.labels)

    def index(self, label: str) -> int:
        if label not in self.labels:
            raise ValueError(f"unknown label {label!r}; layout is {self.labels}")
        return self.labels.index(label)


def _as_labels(layout: SubsystemLayout | Sequence[str]) -> tuple[str, ...]:
    if isinstance(layout, SubsystemLayout):
        return layout.labels
    return tuple(layout)


def _tensorize(m: np.ndarray, n: int) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape != (2 ** n, 2 ** n):
        raise ValueError(f"matrix shape {m.shape} does not match {n} qubit labels")
    return m.reshape((2,) * (2 * n))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; the left factor is the slower-varying subsystem."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m: np.ndarray,
                  layout: SubsystemLayout | Sequence[str],
                  keep: Iterable[str]) -> np.ndarray:
    """Trace out every subsystem not named in keep.

    Kept subsystems retain their relative order from the layout.
    """
    labels = _as_labels(layout)
    keep_set = set(keep)
    unknown = keep_set - set(labels)
    if unknown:
        raise ValueError(f"unknown labels {sorted(unknown)}; layout is {labels}")
    n = len(labels)
    t = _tensorize(m, n)
    idx = list(range(2 * n))
    for i, lab in enumerate(labels):
        if lab not in keep_set:
            idx[n + i] = idx[i]
    kept = [i for i, lab in enumerate(labels) if lab in keep_set]
    out = [idx[i] for i in kept] + [idx[n + i] for i in kept]
    k = len(kept)
    return np.einsum(t, idx, out).reshape(2 ** k, 2 ** k)


def partial_transpose(m: np.ndarray,
                      layout: SubsystemLayout | Sequence[str],
                      on: str) -> np.ndarray:
    """Transpose the ket/bra indices of a single named subsystem."""
    labels = _as_labels(layout)
    if on not in labels:
        raise ValueError(f"unknown label {on!r}; layout is {labels}")
    n = len(labels)
    i = labels.index(on)
    t = _tensorize(m, n)
    axes = list(range(2 * n))
    axes[i], axes[n + i] = axes[n + i], axes[i]
    return t.transpose(axes).reshape(2 ** n, 2 ** n)


def reorder_subsystems(m: np.ndarray,
                       layout: SubsystemLayout | Sequence[str],
                       new_order: Sequence[str]) -> np.ndarray:
    """Permute subsystems so the matrix is indexed in new_order."""
    labels = _as_labels(layout)
    new = _as_labels(new_order)
    if sorted(new) != sorted(labels):
        raise ValueError(f"new order {new} is not a permutation of {labels}")
    n = len(labels)
    src = [labels.index(lab) for lab in new]
    t = _tensorize(m, n)
    return t.transpose(src + [s + n for s in src]).reshape(2 ** n, 2 ** n)


def hermiticity_defect(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T)))


def hermitian_eigenvalues(m: np.ndarray, atol: float = HERMITICITY_ATOL) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, ascending."""
    defect = hermiticity_defect(m)
    if defect > atol:
        raise NumericalContractError(
            f"matrix is not Hermitian: max |M - M^dag| = {defect:.3e}")
    return np.linalg.eigvalsh(np.asarray(m, dtype=complex))


def trace_norm(m: np.ndarray, atol: float = HERMITICITY_ATOL) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(hermitian_eigenvalues(m, atol=atol))))
