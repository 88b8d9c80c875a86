"""Fixed-step RK4 propagation of the rotating-frame amplitudes."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .model import (
    SUBSYSTEMS,
    CouplingParts,
    ModelParams,
    basis_labels,
    coupling_parts,
    dark_state,
    excitation_counts,
    pulse_amplitudes,
)
from .qstate import StateVector

logger = logging.getLogger(__name__)

DEFAULT_STEPS = 12000
DEFAULT_RECORD_EVERY = 20
WINDOW_MARGIN = 3.0
NORM_DRIFT_ABORT = 1e-6
STEP_NORM_TOL = 1e-6


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class TimeGrid:
    s_start: float
    s_end: float
    steps: int = DEFAULT_STEPS
    record_every: int = DEFAULT_RECORD_EVERY

    def __post_init__(self):
        if not (np.isfinite(self.s_start) and np.isfinite(self.s_end)):
            raise ValueError("grid bounds must be finite")
        if not self.s_start < self.s_end:
            raise ValueError(f"s_start ({self.s_start}) must be below s_end ({self.s_end})")
        if int(self.steps) != self.steps or self.steps < 100:
            raise ValueError(f"steps must be an integer >= 100, got {self.steps}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError(f"record_every must be a positive integer, got {self.record_every}")

    @property
    def h(self) -> float:
        return (self.s_end - self.s_start) / self.steps


def default_grid(params: ModelParams, steps: int = DEFAULT_STEPS,
                 record_every: int = DEFAULT_RECORD_EVERY) -> TimeGrid:
    """Window from three widths before the first pulse to three after the second."""
    return TimeGrid(-WINDOW_MARGIN, params.T_over_tau + WINDOW_MARGIN, steps, record_every)


@dataclass(frozen=True)
class TrajectoryFrame:
    s: float
    state: StateVector
    g1_tau: float
    g2_tau: float
    dark_overlap: float | None


def make_state(amplitudes, params: ModelParams) -> StateVector:
    return StateVector(amplitudes, basis_labels(params), SUBSYSTEMS)


def initial_state(params: ModelParams) -> StateVector:
    d = np.zeros(9, dtype=complex)
    d[0] = 1.0
    return make_state(d, params)


def _derivative(parts: CouplingParts, params: ModelParams, s: float, d: np.ndarray) -> np.ndarray:
    g1, g2 = pulse_amplitudes(s, params)
    return -1j * (parts.matrix(g1, g2) @ d)


def _rk4(parts: CouplingParts, params: ModelParams, s: float, h: float, d: np.ndarray) -> np.ndarray:
    k1 = _derivative(parts, params, s, d)
    k2 = _derivative(parts, params, s + 0.5 * h, d + 0.5 * h * k1)
    k3 = _derivative(parts, params, s + 0.5 * h, d + 0.5 * h * k2)
    k4 = _derivative(parts, params, s + h, d + h * k3)
    return d + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(state: StateVector, s: float, h: float, params: ModelParams) -> StateVector:
    """Advance ``state`` from ``s`` to ``s + h`` with one classical RK4 step."""
    if not h > 0:
        raise ValueError(f"step size must be positive, got {h}")
    if abs(state.norm - 1.0) > STEP_NORM_TOL:
        raise ValueError(f"state norm {state.norm:.12g} is not 1 within {STEP_NORM_TOL}")
    d = _rk4(coupling_parts(params), params, s, h, state.amplitudes)
    if not np.all(np.isfinite(d)):
        raise IntegrationError(f"non-finite amplitude after step at s={s}")
    return state.with_amplitudes(d)


def propagate(amplitudes, params: ModelParams, s_from: float, s_to: float, steps: int) -> np.ndarray:
    """Integrate from ``s_from`` to ``s_to`` in ``steps`` equal RK4 steps.

    ``s_to < s_from`` integrates backwards in time, which undoes a forward run
    up to the integrator error.
    """
    parts = coupling_parts(params)
    d = np.array(amplitudes, dtype=complex)
    h = (s_to - s_from) / steps
    for k in range(steps):
        s = s_from + k * h
        d = _rk4(parts, params, s, h, d)
        if not np.all(np.isfinite(d)):
            raise IntegrationError(f"non-finite amplitude at s={s + h}")
    return d


def _overlap(d: np.ndarray, g1: float, g2: float, params: ModelParams) -> float | None:
    dark = dark_state(g1, g2, params)
    if not dark.defined:
        return None
    return float(abs(np.vdot(dark.vector(), d)) ** 2)


def adiabatic_overlap(frame: TrajectoryFrame, params: ModelParams) -> float | None:
    """Population of the instantaneous dark state, or None where it is undefined."""
    return _overlap(frame.state.amplitudes, frame.g1_tau, frame.g2_tau, params)


def _frame(s: float, d: np.ndarray, params: ModelParams) -> TrajectoryFrame:
    g1, g2 = pulse_amplitudes(s, params)
    return TrajectoryFrame(s, make_state(d, params), g1, g2, _overlap(d, g1, g2, params))


def evolve(params: ModelParams, grid: TimeGrid) -> list[TrajectoryFrame]:
    """Run the adiabatic passage from the ground state and record frames.

    Frames are taken at step 0, every ``grid.record_every`` steps, and at
    the final step.
    """
    parts = coupling_parts(params)
    h = grid.h
    d = initial_state(params).amplitudes.copy()
    frames = [_frame(grid.s_start, d, params)]
    for k in range(1, grid.steps + 1):
        s_prev = grid.s_start + (k - 1) * h
        d = _rk4(parts, params, s_prev, h, d)
        if k % grid.record_every == 0 or k == grid.steps:
            s = grid.s_start + k * h
            if not np.all(np.isfinite(d)):
                raise IntegrationError(f"non-finite amplitude at s={s:.6g}")
            drift = abs(np.linalg.norm(d) - 1.0)
            if drift > NORM_DRIFT_ABORT:
                raise IntegrationError(
                    f"norm drift {drift:.2e} at s={s:.6g} exceeds {NORM_DRIFT_ABORT:g}; "
                    "use more steps"
                )
            frames.append(_frame(s, d, params))
    logger.debug("evolved %d steps (delta_tau=%g), final norm drift %.2e",
                 grid.steps, params.delta_tau, abs(np.linalg.norm(d) - 1.0))
    return frames


def to_lab_amplitudes(state: StateVector, s: float, params: ModelParams) -> StateVector:
    """Undo the rotating-frame phases: ``c_k = d_k exp(i m_k delta_tau s)``.

    ``m_k`` is the number of atoms in ``e`` for basis state ``k``, so the map
    is a product of single-atom phase gates.
    """
    phases = np.exp(1j * excitation_counts(params) * params.delta_tau * s)
    return state.with_amplitudes(state.amplitudes * phases)
