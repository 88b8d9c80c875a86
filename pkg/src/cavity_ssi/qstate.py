"""Dense quantum-state primitives over labeled product bases.

States in this package live on a *subset* of a tensor-product space: each
basis vector carries a tuple of per-subsystem labels (for instance
``('g', 'f', 1, 1)``), and only the labels actually occupied are stored.
Partial traces work directly on those label tuples, so no padding to the
full product dimension is needed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

MAX_DIM = 81
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-9
ENTROPY_CUTOFF = 1e-12
LOG_CUTOFF = 1e-10
NEGATIVE_REJECT = 1e-6
NORM_TOL = 1e-9


class SubsystemId(str, enum.Enum):
    """The four parties of the two-atom, two-mode cavity."""

    ATOM_A = "A"
    ATOM_B = "B"
    MODE_A = "a"
    MODE_B = "b"

    def __str__(self) -> str:
        return self.value


class NonHermitianError(ValueError):
    pass


class NonPhysicalStateError(ValueError):
    pass


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    """Raise NonHermitianError if ``m`` deviates from its adjoint beyond ``tol``.

    The tolerance is relative: ``tol * (1 + max|m|)``.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    dev = np.abs(m - m.conj().T)
    bound = tol * (1.0 + (np.abs(m).max() if m.size else 0.0))
    worst = np.unravel_index(int(np.argmax(dev)), dev.shape) if m.size else (0, 0)
    if m.size and dev[worst] > bound:
        i, j = (int(k) for k in worst)
        raise NonHermitianError(
            f"matrix is not Hermitian: |M[{i}][{j}] - conj(M[{j}][{i}])| = "
            f"{dev[worst]:.3e} exceeds {bound:.3e}"
        )


def hermitian_eigensystem(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of ``m``."""
    m = np.asarray(m, dtype=complex)
    check_hermitian(m)
    if m.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {m.shape[0]} exceeds supported maximum {MAX_DIM}")
    # symmetrise so that eigh sees an exactly Hermitian matrix
    vals, vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    return vals, vecs


def _check_labels(subsystems: Sequence[Hashable], labels: Sequence[tuple]) -> None:
    if len(set(subsystems)) != len(subsystems):
        raise ValueError(f"duplicate subsystem ids in {list(subsystems)}")
    for lab in labels:
        if len(lab) != len(subsystems):
            raise ValueError(
                f"label {lab!r} has {len(lab)} entries, expected {len(subsystems)}"
            )
    if len(set(labels)) != len(labels):
        raise ValueError("row labels must be pairwise distinct")


@dataclass(frozen=True)
class StateVector:
    """Pure-state amplitudes on a labeled basis."""

    amplitudes: np.ndarray
    labels: tuple[tuple, ...]
    subsystems: tuple[Hashable, ...]

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        amps.setflags(write=False)
        labels = tuple(tuple(lab) for lab in self.labels)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "subsystems", tuple(self.subsystems))
        if len(labels) != amps.size:
            raise ValueError(f"{amps.size} amplitudes but {len(labels)} labels")
        _check_labels(self.subsystems, labels)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def with_amplitudes(self, amplitudes: np.ndarray) -> "StateVector":
        return StateVector(amplitudes, self.labels, self.subsystems)


@dataclass(frozen=True)
class LabeledDensityMatrix:
    """Density matrix whose rows and columns carry subsystem label tuples."""

    subsystems: tuple[Hashable, ...]
    labels: tuple[tuple, ...]
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        mat.setflags(write=False)
        labels = tuple(tuple(lab) for lab in self.labels)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "subsystems", tuple(self.subsystems))
        if mat.shape != (len(labels), len(labels)):
            raise ValueError(f"matrix shape {mat.shape} does not match {len(labels)} labels")
        _check_labels(self.subsystems, labels)
        check_hermitian(mat)
        tr = np.trace(mat)
        if abs(tr - 1.0) > TRACE_TOL:
            raise NonPhysicalStateError(f"trace {tr.real:.12g} differs from 1")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: tuple) -> int:
        return self.labels.index(tuple(label))

    def eigenvalues(self) -> np.ndarray:
        return hermitian_eigensystem(self.matrix)[0]


def pure_density(psi: StateVector) -> LabeledDensityMatrix:
    """Projector ``|psi><psi|`` carrying the labels of ``psi``."""
    if abs(psi.norm - 1.0) > NORM_TOL:
        raise NonPhysicalStateError(f"state norm {psi.norm:.12g} is not 1")
    amps = psi.amplitudes
    return LabeledDensityMatrix(psi.subsystems, psi.labels, np.outer(amps, amps.conj()))


def _positions(subsystems: Sequence[Hashable], keep: Iterable[Hashable]) -> list[int]:
    keep = list(keep)
    missing = [k for k in keep if k not in subsystems]
    if missing:
        raise ValueError(f"unknown subsystems {missing}; available {list(subsystems)}")
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate subsystems in {keep}")
    return [i for i, s in enumerate(subsystems) if s in keep]


def trace_maps(
    labels: Sequence[tuple], subsystems: Sequence[Hashable], keep: Iterable[Hashable]
) -> tuple[tuple, tuple[tuple, ...], list[np.ndarray]]:
    """Selection matrices relating a labeled basis to its kept factors.

    Returns the kept subsystem ids (in original order), the distinct kept
    label tuples (order of first appearance) and one 0/1 matrix ``K_r`` per
    distinct discarded label ``r``, with ``K_r[i, k] = 1`` when row ``i``
    has discarded label ``r`` and kept label ``k``.  Then
    ``Tr_discard(X) = sum_r K_r^T X K_r`` and the adjoint lift of an operator
    ``Y`` on the kept factors is ``sum_r K_r Y K_r^T``.
    """
    pos = _positions(subsystems, keep)
    drop = [i for i in range(len(subsystems)) if i not in pos]
    kept_ids = tuple(subsystems[i] for i in pos)
    kept_index: dict[tuple, int] = {}
    blocks: dict[tuple, list[tuple[int, int]]] = {}
    for row, lab in enumerate(labels):
        k = tuple(lab[i] for i in pos)
        r = tuple(lab[i] for i in drop)
        kidx = kept_index.setdefault(k, len(kept_index))
        blocks.setdefault(r, []).append((row, kidx))
    maps = []
    for entries in blocks.values():
        sel = np.zeros((len(labels), len(kept_index)))
        for row, kidx in entries:
            sel[row, kidx] = 1.0
        maps.append(sel)
    return kept_ids, tuple(kept_index), maps


def partial_trace(rho: LabeledDensityMatrix, keep: Iterable[Hashable]) -> LabeledDensityMatrix:
    """Reduce ``rho`` to the subsystems in ``keep`` by tracing out the rest."""
    keep = list(keep)
    if not keep:
        raise ValueError("keep set is empty")
    if set(keep) >= set(rho.subsystems):
        raise ValueError("keep set covers every subsystem; nothing to trace out")
    kept_ids, kept_labels, maps = trace_maps(rho.labels, rho.subsystems, keep)
    out = sum(sel.T @ rho.matrix @ sel for sel in maps)
    return LabeledDensityMatrix(kept_ids, kept_labels, out)


def _physical_spectrum(rho: LabeledDensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = hermitian_eigensystem(rho.matrix)
    if vals.size and vals[0] < -NEGATIVE_REJECT:
        raise NonPhysicalStateError(f"eigenvalue {vals[0]:.3e} is negative")
    return np.clip(vals, 0.0, None), vecs


def von_neumann_entropy(rho: LabeledDensityMatrix) -> float:
    """Entropy ``-Tr(rho log2 rho)`` in bits."""
    vals, _ = _physical_spectrum(rho)
    vals = vals[vals > ENTROPY_CUTOFF]
    return float(max(0.0, -np.sum(vals * np.log2(vals))))


def support_log2(rho: LabeledDensityMatrix, cutoff: float = LOG_CUTOFF) -> np.ndarray:
    """``log2`` of ``rho`` on its support, zero on the kernel."""
    vals, vecs = _physical_spectrum(rho)
    on = vals > cutoff
    v = vecs[:, on]
    return (v * np.log2(vals[on])) @ v.conj().T


def support_projector(rho: LabeledDensityMatrix, cutoff: float = LOG_CUTOFF) -> np.ndarray:
    vals, vecs = _physical_spectrum(rho)
    v = vecs[:, vals > cutoff]
    return v @ v.conj().T
