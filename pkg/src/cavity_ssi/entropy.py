"""Entropic diagnostics: joint entropies, the SSI gap E, correlations.

Every function accepts either a density matrix or anything carrying a pure
state (a ``StateVector`` or a ``TrajectoryFrame``).  Subsystem sets are
given as iterables of subsystem ids; the full set returns the entropy of
the whole state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, NamedTuple

import numpy as np

from .qstate import (
    LabeledDensityMatrix,
    StateVector,
    SubsystemId,
    partial_trace,
    pure_density,
    support_log2,
    support_projector,
    trace_maps,
    von_neumann_entropy,
)

A = SubsystemId.ATOM_A
B = SubsystemId.ATOM_B
MODE = SubsystemId.MODE_A

SSI_TOL = 1e-9
BOUND_TOL = 1e-9
# integrated states may drift this far from unit norm before the integrator aborts
RENORMALIZE_TOL = 1e-6


def density(obj) -> LabeledDensityMatrix:
    if isinstance(obj, LabeledDensityMatrix):
        return obj
    state = getattr(obj, "state", obj)
    if not isinstance(state, StateVector):
        raise TypeError(f"cannot build a density matrix from {type(obj).__name__}")
    norm = state.norm
    if 0 < abs(norm - 1.0) <= RENORMALIZE_TOL:
        state = state.with_amplitudes(state.amplitudes / norm)
    return pure_density(state)


def reduced(obj, subsystems: Iterable[Hashable]) -> LabeledDensityMatrix:
    rho = density(obj)
    keep = list(dict.fromkeys(subsystems))
    if not keep:
        raise ValueError("subsystem set is empty")
    if set(keep) >= set(rho.subsystems):
        return rho
    return partial_trace(rho, keep)


def joint_entropy(obj, subsystems: Iterable[Hashable]) -> float:
    return von_neumann_entropy(reduced(obj, subsystems))


def _entropies(rho: LabeledDensityMatrix, *sets) -> list[float]:
    return [joint_entropy(rho, s) for s in sets]


@dataclass(frozen=True)
class EntropyReport:
    s: float | None
    S_A: float
    S_AB: float
    S_An: float
    S_ABn: float
    E: float
    Ic_AB: float
    araki_lieb_ok: bool
    ssi_ok: bool


def ssi_parameter(obj, first=A, second=B, third=MODE) -> EntropyReport:
    """``E = S(A,B) + S(A,n) - S(A,B,n) - S(A)`` and its companions.

    The defaults pick atom A, atom B and cavity mode a; any three subsystems
    of ``obj`` may be substituted (the GHZ check uses three qubits).
    """
    rho = density(obj)
    S_A, S_B, S_AB, S_An, S_ABn = _entropies(
        rho, [first], [second], [first, second], [first, third], [first, second, third]
    )
    E = S_AB + S_An - S_ABn - S_A
    Ic = S_A + S_B - S_AB
    al_ok = abs(S_A - S_B) <= S_AB + BOUND_TOL and S_AB <= S_A + S_B + BOUND_TOL
    return EntropyReport(getattr(obj, "s", None), S_A, S_AB, S_An, S_ABn, E, Ic, al_ok, E >= -SSI_TOL)


def mutual_information(obj, first: Iterable[Hashable], second: Iterable[Hashable]) -> float:
    """``S(X:Y) = S(X) + S(Y) - S(X,Y)`` for disjoint subsystem sets."""
    first, second = list(first), list(second)
    if not first or not second:
        raise ValueError("both subsystem sets must be non-empty")
    if set(first) & set(second):
        raise ValueError(f"subsystem sets overlap: {set(first) & set(second)}")
    rho = density(obj)
    S_x, S_y, S_xy = _entropies(rho, first, second, first + second)
    return S_x + S_y - S_xy


def index_of_correlation(obj, pair: tuple[Hashable, Hashable]) -> float:
    first, second = pair
    if first == second:
        raise ValueError("index of correlation needs two distinct subsystems")
    return mutual_information(obj, [first], [second])


class ArakiLieb(NamedTuple):
    lower: float
    joint: float
    upper: float
    ok: bool


def araki_lieb_check(obj, pair: tuple[Hashable, Hashable]) -> ArakiLieb:
    """``|S(X) - S(Y)| <= S(X,Y) <= S(X) + S(Y)``."""
    first, second = pair
    if first == second:
        raise ValueError("Araki-Lieb check needs two distinct subsystems")
    rho = density(obj)
    S_x, S_y, S_xy = _entropies(rho, [first], [second], [first, second])
    lower, upper = abs(S_x - S_y), S_x + S_y
    ok = lower <= S_xy + BOUND_TOL and S_xy <= upper + BOUND_TOL
    return ArakiLieb(lower, S_xy, upper, ok)


def conditional_entropy(obj, target: Iterable[Hashable], given: Iterable[Hashable]) -> float:
    """``S(X|Y) = S(X,Y) - S(Y)``."""
    target, given = list(target), list(given)
    if not target or not given:
        raise ValueError("both subsystem sets must be non-empty")
    if set(target) & set(given):
        raise ValueError(f"subsystem sets overlap: {set(target) & set(given)}")
    rho = density(obj)
    S_xy, S_y = _entropies(rho, target + given, given)
    return S_xy - S_y


def _lift(op: np.ndarray, rho: LabeledDensityMatrix, keep) -> np.ndarray:
    """Embed an operator on the ``keep`` factors as ``op (x) identity`` on ``rho``'s basis."""
    _, _, maps = trace_maps(rho.labels, rho.subsystems, keep)
    return sum(sel @ op @ sel.T for sel in maps)


def _partition(rho: LabeledDensityMatrix, partition) -> tuple:
    a, b, c = partition
    if len({a, b, c}) != 3 or set(rho.subsystems) != {a, b, c}:
        raise ValueError(
            f"partition {list(partition)} does not match subsystems {list(rho.subsystems)}"
        )
    return a, b, c


def equality_condition_residual(rho_abc: LabeledDensityMatrix, partition) -> float:
    """Max-entry deviation from ``log rho_ABC - log rho_AB = log rho_BC - log rho_B``.

    Logarithms are taken on supports and the two sides are compared after
    compressing to the support of ``rho_ABC``.
    """
    a, b, c = _partition(rho_abc, partition)
    log_abc = support_log2(rho_abc)
    lifted = {
        keep: _lift(support_log2(partial_trace(rho_abc, keep)), rho_abc, keep)
        for keep in ((a, b), (b, c), (b,))
    }
    diff = (log_abc - lifted[(a, b)]) - (lifted[(b, c)] - lifted[(b,)])
    proj = support_projector(rho_abc)
    return float(np.abs(proj @ diff @ proj).max())


def supports_compatible(rho_abc: LabeledDensityMatrix, partition, tol: float = 1e-9) -> bool:
    """Whether the support of ``rho_ABC`` lies inside each lifted reduced support.

    When this holds, the zero-on-kernel logarithms used by
    :func:`equality_condition_residual` never act on a kernel direction that
    ``rho_ABC`` populates.
    """
    a, b, c = _partition(rho_abc, partition)
    proj = support_projector(rho_abc)
    for keep in ((a, b), (b, c), (b,)):
        lifted = _lift(support_projector(partial_trace(rho_abc, keep)), rho_abc, keep)
        if np.abs(lifted @ proj - proj).max() > tol:
            return False
    return True


GHZ_QUBITS = ("A", "B", "C", "D")


def ghz_state() -> StateVector:
    """``(|0000> + |1111>)/sqrt(2)`` on the full 16-dimensional qubit basis."""
    labels = [tuple((k >> (3 - q)) & 1 for q in range(4)) for k in range(16)]
    amps = np.zeros(16, dtype=complex)
    amps[0] = amps[15] = 1 / np.sqrt(2)
    return StateVector(amps, labels, GHZ_QUBITS)


def ghz_reduced_density() -> LabeledDensityMatrix:
    """``(|000><000| + |111><111|)/2``: the GHZ state with qubit D discarded."""
    labels = [tuple((k >> (2 - q)) & 1 for q in range(3)) for k in range(8)]
    mat = np.zeros((8, 8))
    mat[0, 0] = mat[7, 7] = 0.5
    return LabeledDensityMatrix(GHZ_QUBITS[:3], labels, mat)


@dataclass(frozen=True)
class GhzReport:
    S_ABC: float
    S_A: float
    S_AB: float
    S_BC: float
    E: float
    residual: float
    supports_compatible: bool


def ghz_report() -> GhzReport:
    rho = ghz_reduced_density()
    a, b, c = GHZ_QUBITS[:3]
    S_ABC, S_A, S_AB, S_BC = _entropies(rho, [a, b, c], [a], [a, b], [b, c])
    E = ssi_parameter(rho, a, b, c).E
    partition = (a, b, c)
    return GhzReport(S_ABC, S_A, S_AB, S_BC, E,
                     equality_condition_residual(rho, partition),
                     supports_compatible(rho, partition))
