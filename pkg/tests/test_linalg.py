"""Tests for the labeled small-operator linear algebra."""

import numpy as np
import pytest

from causalmaps.linalg import (NumericalContractError, SubsystemLayout,
                               hermitian_eigenvalues, hermiticity_defect, kron,
                               partial_trace, partial_transpose,
                               reorder_subsystems, trace_norm)
from oracle import oracle_eigenvalues

RNG = np.random.default_rng(20260815)


def random_hermitian(rng, n):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (g + g.conj().T) / 2


def test_layout_basics():
    lay = SubsystemLayout(("C", "B", "D"))
    assert lay.dim == 8
    assert lay.index("B") == 1
    with pytest.raises(ValueError):
        SubsystemLayout(("C", "C"))
    with pytest.raises(ValueError):
        lay.index("Q")


def test_kron_matches_numpy():
    a = random_hermitian(RNG, 2)
    b = random_hermitian(RNG, 4)
    assert np.allclose(kron(a, b), np.kron(a, b))


def test_partial_trace_product_states():
    a = random_hermitian(RNG, 2)
    b = random_hermitian(RNG, 2)
    c = random_hermitian(RNG, 2)
    m = kron(kron(a, b), c)
    tb = np.trace(b)
    tc = np.trace(c)
    assert np.allclose(partial_trace(m, ("A", "B", "C"), keep=("A",)), a * tb * tc)
    assert np.allclose(partial_trace(m, ("A", "B", "C"), keep=("A", "C")),
                       kron(a, c) * tb)
    # kept labels keep their layout order even if requested shuffled
    assert np.allclose(partial_trace(m, ("A", "B", "C"), keep=("C", "A")),
                       kron(a, c) * tb)


def test_partial_trace_preserves_total_trace():
    m = random_hermitian(RNG, 8)
    reduced = partial_trace(m, ("X", "Y", "Z"), keep=("Y",))
    assert abs(np.trace(reduced) - np.trace(m)) < 1e-12


def test_partial_trace_unknown_label():
    m = random_hermitian(RNG, 4)
    with pytest.raises(ValueError):
        partial_trace(m, ("A", "B"), keep=("Q",))


def test_partial_transpose_involution_and_phi_plus():
    m = random_hermitian(RNG, 4)
    twice = partial_transpose(partial_transpose(m, ("A", "B"), "B"), ("A", "B"), "B")
    assert np.allclose(twice, m)
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / np.sqrt(2)
    phi = np.outer(v, v.conj())
    swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]) / 2
    assert np.allclose(partial_transpose(phi, ("A", "B"), "B"), swap)


def test_partial_transpose_on_either_label_same_spectrum():
    m = random_hermitian(RNG, 4)
    ea = np.linalg.eigvalsh(partial_transpose(m, ("A", "B"), "A"))
    eb = np.linalg.eigvalsh(partial_transpose(m, ("A", "B"), "B"))
    assert np.allclose(ea, eb)


def test_reorder_subsystems_roundtrip():
    a = random_hermitian(RNG, 2)
    b = random_hermitian(RNG, 2)
    c = random_hermitian(RNG, 2)
    m = kron(kron(a, b), c)
    swapped = reorder_subsystems(m, ("A", "B", "C"), ("C", "A", "B"))
    assert np.allclose(swapped, kron(kron(c, a), b))
    with pytest.raises(ValueError):
        reorder_subsystems(m, ("A", "B", "C"), ("A", "B"))


def test_hermiticity_defect():
    m = random_hermitian(RNG, 4)
    assert hermiticity_defect(m) < 1e-15
    m[0, 1] += 1e-3
    assert hermiticity_defect(m) > 1e-4


def test_hermitian_eigenvalues_match_oracle():
    for i in range(40):
        n = int(RNG.integers(2, 17))
        a = random_hermitian(RNG, n)
        ours = hermitian_eigenvalues(a)
        assert np.abs(ours - oracle_eigenvalues(a, seed=i)).max() < 1e-8
        assert np.all(np.diff(ours) >= 0)


def test_hermitian_eigenvalues_reject_non_hermitian():
    m = RNG.normal(size=(4, 4)) + 1j * RNG.normal(size=(4, 4))
    with pytest.raises(NumericalContractError):
        hermitian_eigenvalues(m)


def test_trace_norm():
    d = np.diag([1.0, -2.0, 3.0]).astype(complex)
    assert abs(trace_norm(d) - 6.0) < 1e-12
    u = np.linalg.qr(RNG.normal(size=(3, 3)) + 1j * RNG.normal(size=(3, 3)))[0]
    assert abs(trace_norm(u @ d @ u.conj().T) - 6.0) < 1e-10
