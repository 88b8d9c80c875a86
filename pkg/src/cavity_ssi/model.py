"""Two Lambda atoms in a two-mode cavity, restricted to the nine coupled states.

All times are measured in units of the pulse width tau and every rate is
multiplied by tau, so the model is fully described by the dimensionless
products ``g10_tau``, ``g20_tau``, ``T_over_tau`` and ``delta_tau``.

Basis ordering (indices 1..9, stored zero-based)::

    1 (g, g, n,   mu)      6 (f, f, n-2, mu+2)
    2 (g, e, n-1, mu)      7 (f, e, n-2, mu+1)
    3 (g, f, n-1, mu+1)    8 (f, g, n-1, mu+1)
    4 (e, f, n-2, mu+1)    9 (e, g, n-1, mu)
    5 (e, e, n-2, mu)

Labels are (atom A level, atom B level, photons in mode a, photons in mode b).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qstate import SubsystemId

SUBSYSTEMS = (SubsystemId.ATOM_A, SubsystemId.ATOM_B, SubsystemId.MODE_A, SubsystemId.MODE_B)

# zero-based positions of the dark-state components alpha, beta, gamma, delta
DARK_INDICES = (0, 5, 2, 7)
DARK_SIGNS = np.array([1.0, 1.0, -1.0, -1.0])
DARK_UNDEFINED_RATIO = 1e-9


class BasisLabel(NamedTuple):
    atom_a: str
    atom_b: str
    photons_a: int
    photons_b: int


@dataclass(frozen=True)
class ModelParams:
    n: int = 2
    mu: int = 0
    g10_tau: float = 15.0
    g20_tau: float = 15.0
    T_over_tau: float = 4.0 / 3.0
    delta_tau: float = 0.0

    def __post_init__(self):
        for name in ("n", "mu"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ValueError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.n < 2:
            raise ValueError(f"n >= 2 required (states with n-2 photons appear), got n={self.n}")
        if self.mu < 0:
            raise ValueError(f"mu >= 0 required, got mu={self.mu}")
        for name in ("g10_tau", "g20_tau"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, value)
        for name in ("T_over_tau", "delta_tau"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)


FIG2_PARAMS = ModelParams(n=2, mu=0, g10_tau=15.0, g20_tau=15.0, T_over_tau=4.0 / 3.0, delta_tau=0.0)


def basis_labels(params: ModelParams) -> tuple[BasisLabel, ...]:
    n, mu = params.n, params.mu
    if n < 2:
        raise ValueError(f"n >= 2 required, got {n}")
    return (
        BasisLabel("g", "g", n, mu),
        BasisLabel("g", "e", n - 1, mu),
        BasisLabel("g", "f", n - 1, mu + 1),
        BasisLabel("e", "f", n - 2, mu + 1),
        BasisLabel("e", "e", n - 2, mu),
        BasisLabel("f", "f", n - 2, mu + 2),
        BasisLabel("f", "e", n - 2, mu + 1),
        BasisLabel("f", "g", n - 1, mu + 1),
        BasisLabel("e", "g", n - 1, mu),
    )


def excitation_counts(params: ModelParams) -> np.ndarray:
    """Number of atoms in ``e`` for each basis state (1 for 2,4,7,9; 2 for 5)."""
    return np.array([(lab.atom_a == "e") + (lab.atom_b == "e") for lab in basis_labels(params)])


def pulse_amplitudes(s, params: ModelParams):
    """Gaussian couplings at time ``s`` (units of tau), counterintuitive order.

    The mode-b (e-f) pulse is centred at 0 and the mode-a (e-g) pulse at
    ``T_over_tau``; both atoms see the same value. Works elementwise on arrays.
    """
    s = np.asarray(s, dtype=float)
    g1 = params.g10_tau * np.exp(-((s - params.T_over_tau) ** 2))
    g2 = params.g20_tau * np.exp(-(s**2))
    if g1.ndim == 0:
        return float(g1), float(g2)
    return g1, g2


class CouplingParts(NamedTuple):
    """Pieces of the coefficient matrix that do not depend on time.

    ``M = g1a*a1a + g1b*a1b + g2a*a2a + g2b*a2b + diag(detuning)``.
    """

    a1a: np.ndarray
    a1b: np.ndarray
    a2a: np.ndarray
    a2b: np.ndarray
    detuning: np.ndarray

    def matrix(self, g1a, g2a, g1b=None, g2b=None) -> np.ndarray:
        g1b = g1a if g1b is None else g1b
        g2b = g2a if g2b is None else g2b
        return (
            g1a * self.a1a + g1b * self.a1b + g2a * self.a2a + g2b * self.a2b
            + np.diag(self.detuning)
        )


def coupling_parts(params: ModelParams) -> CouplingParts:
    n, mu = params.n, params.mu
    rn, rn1 = np.sqrt(n), np.sqrt(n - 1)
    rm1, rm2 = np.sqrt(mu + 1), np.sqrt(mu + 2)
    # (row, col, factor), one-based, upper triangle of each coupling family
    g1a = [(1, 9, rn), (2, 5, rn1), (3, 4, rn1)]
    g1b = [(1, 2, rn), (5, 9, rn1), (7, 8, rn1)]
    g2a = [(4, 6, rm2), (5, 7, rm1), (8, 9, rm1)]
    g2b = [(2, 3, rm1), (4, 5, rm1), (6, 7, rm2)]
    mats = []
    for family in (g1a, g1b, g2a, g2b):
        m = np.zeros((9, 9))
        for i, j, f in family:
            m[i - 1, j - 1] = m[j - 1, i - 1] = f
        mats.append(m)
    detuning = params.delta_tau * excitation_counts(params).astype(float)
    return CouplingParts(*mats, detuning)


def coefficient_matrix(g1_tau, g2_tau, params: ModelParams, g1b_tau=None, g2b_tau=None) -> np.ndarray:
    """Real symmetric 9x9 matrix ``M*tau`` of the amplitude equations ``d' = -i M d``.

    ``g1_tau``/``g2_tau`` are the atom-A couplings to modes a and b; atom B
    uses the same values unless ``g1b_tau``/``g2b_tau`` are given.
    """
    return coupling_parts(params).matrix(g1_tau, g2_tau, g1b_tau, g2b_tau)


@dataclass(frozen=True)
class DarkState:
    """Null eigenvector of the coefficient matrix.

    ``coefficients`` are the non-negative ratios (alpha, beta, gamma, delta)/P;
    ``amplitudes`` carry the signs of the state, (alpha, beta, -gamma, -delta)/P,
    on basis indices 1, 6, 3, 8.  Both are ``None`` when the couplings vanish.
    """

    coefficients: np.ndarray | None
    defined: bool

    @property
    def amplitudes(self) -> np.ndarray | None:
        if not self.defined:
            return None
        return DARK_SIGNS * self.coefficients

    def vector(self) -> np.ndarray | None:
        if not self.defined:
            return None
        v = np.zeros(9)
        v[list(DARK_INDICES)] = self.amplitudes
        return v


def dark_state(g1_tau, g2_tau, params: ModelParams, g1b_tau=None, g2b_tau=None) -> DarkState:
    g1a, g2a = float(g1_tau), float(g2_tau)
    g1b = g1a if g1b_tau is None else float(g1b_tau)
    g2b = g2a if g2b_tau is None else float(g2b_tau)
    n, mu = params.n, params.mu
    alpha = g2a * g2b * np.sqrt((mu + 1) * (mu + 2))
    beta = g1a * g1b * np.sqrt(n * (n - 1))
    gamma = g1b * g2a * np.sqrt(n * (mu + 2))
    delta = g1a * g2b * np.sqrt(n * (mu + 2))
    coeffs = np.array([alpha, beta, gamma, delta])
    # scale before squaring so far-tail couplings do not underflow
    scale = np.abs(coeffs).max()
    if scale == 0.0:
        return DarkState(None, False)
    P = scale * np.linalg.norm(coeffs / scale)
    if P < DARK_UNDEFINED_RATIO * max(params.g10_tau, params.g20_tau) ** 2:
        return DarkState(None, False)
    return DarkState(coeffs / P, True)
