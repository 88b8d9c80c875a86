"""Exit criteria for the package, one test per criterion.

Each test logs a PASS/FAIL line that is printed in the pytest terminal
summary under "acceptance criteria".
"""

import contextlib
import itertools

import numpy as np
import pytest

from cavity_ssi.dynamics import (
    default_grid,
    evolve,
    initial_state,
    propagate,
    to_lab_amplitudes,
)
from cavity_ssi.entropy import (
    A,
    B,
    MODE,
    equality_condition_residual,
    ghz_reduced_density,
    joint_entropy,
    ssi_parameter,
    supports_compatible,
)
from cavity_ssi.model import (
    FIG2_PARAMS,
    SUBSYSTEMS,
    ModelParams,
    coefficient_matrix,
    dark_state,
    pulse_amplitudes,
)
from cavity_ssi.qstate import StateVector, partial_trace, pure_density, von_neumann_entropy

from conftest import fig2

@contextlib.contextmanager
def criterion(log, number, title):
    details = []
    try:
        yield details
    except BaseException:
        line = f"FAIL  {number:2d}. {title}  {'; '.join(details)}"
        log.append((number, line))
        print(line)
        raise
    line = f"PASS  {number:2d}. {title}  {'; '.join(details)}"
    log.append((number, line))
    print(line)


@pytest.fixture(scope="module")
def final_24k():
    grid = default_grid(FIG2_PARAMS, steps=24000, record_every=24000)
    return {dt: evolve(fig2(dt), grid)[-1] for dt in (0.0, 60.0)}


def all_subset_entropies(state):
    return {
        frozenset(k): joint_entropy(state, k)
        for r in range(1, 5)
        for k in itertools.combinations(SUBSYSTEMS, r)
    }


def test_01_ghz_exactness(acceptance_log):
    with criterion(acceptance_log, 1, "GHZ entropies = 1 bit, E = 0 (tol 1e-12)") as info:
        rho = ghz_reduced_density()
        values = {
            "S_ABC": joint_entropy(rho, ["A", "B", "C"]),
            "S_A": joint_entropy(rho, ["A"]),
            "S_AB": joint_entropy(rho, ["A", "B"]),
            "S_BC": joint_entropy(rho, ["B", "C"]),
        }
        E = ssi_parameter(rho, "A", "B", "C").E
        info.append(f"max|S-1|={max(abs(v - 1) for v in values.values()):.1e} E={E:.1e}")
        for v in values.values():
            assert abs(v - 1.0) <= 1e-12
        assert abs(E) <= 1e-12
        assert abs(np.trace(rho.matrix) - 1) == 0


def test_02_ghz_equality_condition(acceptance_log):
    with criterion(acceptance_log, 2, "GHZ satisfies log-equality condition (tol 1e-9)") as info:
        rho = ghz_reduced_density()
        residual = equality_condition_residual(rho, ("A", "B", "C"))
        info.append(f"residual={residual:.1e}")
        assert residual <= 1e-9
        assert supports_compatible(rho, ("A", "B", "C"))


def test_03_ssi_nonnegative(acceptance_log, traj0, traj60):
    with criterion(acceptance_log, 3, "min E >= -1e-9 on all frames, dt=0 and dt=60") as info:
        mins = {dt: min(ssi_parameter(f).E for f in traj) for dt, traj in ((0, traj0), (60, traj60))}
        info.append(f"min E: dt0={mins[0]:.2e} dt60={mins[60]:.2e}")
        assert all(m >= -1e-9 for m in mins.values())


def test_04_complete_transfer(acceptance_log, traj0):
    with criterion(acceptance_log, 4, "dt=0 final: pop6>=0.99, E<=1e-3, Ic<=1e-3") as info:
        rep = ssi_parameter(traj0[-1])
        pop6 = traj0[-1].state.populations()[5]
        info.append(f"pop6={pop6:.6f} E={rep.E:.2e} Ic={rep.Ic_AB:.2e}")
        assert pop6 >= 0.99
        assert 0 <= rep.E <= 1e-3
        assert rep.Ic_AB <= 1e-3


def test_05_incomplete_transfer(acceptance_log, traj0, traj60, final_24k):
    with criterion(acceptance_log, 5, "dt=60 final pop6 lower and E higher than dt=0, gap > 10x tol") as info:
        finals = {0.0: traj0[-1], 60.0: traj60[-1]}
        pop = {dt: f.state.populations()[5] for dt, f in finals.items()}
        E = {dt: ssi_parameter(f).E for dt, f in finals.items()}
        pop2 = {dt: f.state.populations()[5] for dt, f in final_24k.items()}
        E2 = {dt: ssi_parameter(f).E for dt, f in final_24k.items()}
        tol_pop = max(abs(pop[dt] - pop2[dt]) for dt in pop)
        tol_E = max(abs(E[dt] - E2[dt]) for dt in E)
        info.append(f"pop6 {pop[0.0]:.6f}->{pop[60.0]:.6f} E {E[0.0]:.3e}->{E[60.0]:.3e} "
                    f"12k/24k tol pop={tol_pop:.1e} E={tol_E:.1e}")
        assert tol_pop <= 1e-6 and tol_E <= 1e-6
        assert pop[0.0] - pop[60.0] > 10 * tol_pop
        assert E[60.0] - E[0.0] > 10 * tol_E


def test_06_dark_state_endpoints(acceptance_log):
    with criterion(acceptance_log, 6, "dark-state coefficients (1,0,0,0) -> (0,1,0,0) within 1e-3") as info:
        p = FIG2_PARAMS
        start = dark_state(*pulse_amplitudes(-3.0, p), p)
        end = dark_state(*pulse_amplitudes(p.T_over_tau + 3.0, p), p)
        assert start.defined and end.defined
        dev_start = np.abs(start.coefficients - [1, 0, 0, 0]).max()
        dev_end = np.abs(end.coefficients - [0, 1, 0, 0]).max()
        info.append(f"dev start={dev_start:.1e} end={dev_end:.1e}")
        assert dev_start <= 1e-3 and dev_end <= 1e-3


def test_07_dark_state_nullity(acceptance_log):
    with criterion(acceptance_log, 7, "|M psi0| <= 1e-10 |M|_max over 1000 draws") as info:
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(1000):
            params = ModelParams(n=int(rng.integers(2, 5)), mu=int(rng.integers(0, 3)),
                                 delta_tau=float(rng.choice([0.0, 60.0])))
            g1a, g2a, g1b, g2b = rng.uniform(0.01, 30.0, size=4)
            if rng.random() < 0.5:  # half the draws use the symmetric couplings of the pulses
                g1b, g2b = g1a, g2a
            m = coefficient_matrix(g1a, g2a, params, g1b, g2b)
            dark = dark_state(g1a, g2a, params, g1b, g2b)
            assert dark.defined
            worst = max(worst, np.linalg.norm(m @ dark.vector()) / np.abs(m).max())
        info.append(f"worst ratio={worst:.1e}")
        assert worst <= 1e-10


def test_08_numerical_integrity(acceptance_log, traj0, traj60, final_24k):
    with criterion(acceptance_log, 8, "norm drift <= 1e-7, RK4 ratio in [12,20], fwd-bwd fidelity >= 1-1e-6") as info:
        drift = max(abs(f.state.norm - 1) for traj in (traj0, traj60) for f in traj)
        drift = max(drift, *(abs(f.state.norm - 1) for f in final_24k.values()))
        ratios, infidelities = [], []
        for dt in (0.0, 60.0):
            p = fig2(dt)
            g = default_grid(p)
            d0 = initial_state(p).amplitudes
            runs = [propagate(d0, p, g.s_start, g.s_end, n) for n in (3000, 6000, 12000)]
            ratios.append(np.linalg.norm(runs[0] - runs[1]) / np.linalg.norm(runs[1] - runs[2]))
            back = propagate(runs[2], p, g.s_end, g.s_start, 12000)
            infidelities.append(1 - abs(np.vdot(d0, back)) ** 2)
        info.append(f"drift={drift:.1e} ratios={[round(float(r), 2) for r in ratios]} "
                    f"max infidelity={max(infidelities):.1e}")
        assert drift <= 1e-7
        assert all(12 <= r <= 20 for r in ratios)
        assert max(infidelities) <= 1e-6


def test_09_entropy_axioms(acceptance_log, traj0, traj60):
    with criterion(acceptance_log, 9, "purity complement, Araki-Lieb, SSI corollaries, phase invariance") as info:
        everything = frozenset(SUBSYSTEMS)
        worst = {"complement": 0.0, "araki_lieb": 0.0, "cond": 0.0, "mutual": 0.0,
                 "cond_subadd": 0.0, "phase": 0.0}
        for dt, traj in ((0.0, traj0), (60.0, traj60)):
            p = fig2(dt)
            for frame in traj:
                S = all_subset_entropies(frame)
                for k, v in S.items():
                    if k != everything:
                        worst["complement"] = max(worst["complement"], abs(v - S[everything - k]))
                for x, y in itertools.combinations(SUBSYSTEMS, 2):
                    sx, sy, sxy = S[frozenset([x])], S[frozenset([y])], S[frozenset([x, y])]
                    worst["araki_lieb"] = max(worst["araki_lieb"], abs(sx - sy) - sxy, sxy - sx - sy)
                s = lambda *ids: S[frozenset(ids)]  # noqa: E731
                # S(A|B,n) <= S(A|B)
                worst["cond"] = max(worst["cond"], (s(A, B, MODE) - s(B, MODE)) - (s(A, B) - s(B)))
                # S(A:B) <= S(A:B,n)
                worst["mutual"] = max(worst["mutual"], (s(A) + s(B) - s(A, B))
                                      - (s(A) + s(B, MODE) - s(A, B, MODE)))
                # S(A,B|n) <= S(A|n) + S(B|n)
                worst["cond_subadd"] = max(worst["cond_subadd"], (s(A, B, MODE) - s(MODE))
                                           - (s(A, MODE) - s(MODE)) - (s(B, MODE) - s(MODE)))
                lab = to_lab_amplitudes(frame.state, frame.s, p)
                S_lab = all_subset_entropies(lab)
                worst["phase"] = max(worst["phase"], max(abs(S_lab[k] - S[k]) for k in S))
        info.append(" ".join(f"{k}={v:.1e}" for k, v in worst.items()))
        assert worst["complement"] <= 1e-9
        assert worst["araki_lieb"] <= 1e-9
        assert worst["cond"] <= 1e-9
        assert worst["mutual"] <= 1e-9
        assert worst["cond_subadd"] <= 1e-9
        assert worst["phase"] <= 1e-10


def test_10_schmidt_oracle(acceptance_log):
    with criterion(acceptance_log, 10, "reduced entropy matches Schmidt coefficients (tol 1e-10, 100 draws)") as info:
        rng = np.random.default_rng(10)
        worst = 0.0
        for _ in range(100):
            da, db = (int(x) for x in rng.integers(2, 6, size=2))
            amps = rng.normal(size=(da, db)) + 1j * rng.normal(size=(da, db))
            amps /= np.linalg.norm(amps)
            labels = list(itertools.product(range(da), range(db)))
            psi = StateVector(amps.reshape(-1), labels, ("X", "Y"))
            s_red = von_neumann_entropy(partial_trace(pure_density(psi), ["X"]))
            schmidt = np.linalg.svd(amps, compute_uv=False) ** 2
            schmidt = schmidt[schmidt > 1e-15]
            s_oracle = float(-np.sum(schmidt * np.log2(schmidt)))
            worst = max(worst, abs(s_red - s_oracle))
        info.append(f"max deviation={worst:.1e}")
        assert worst <= 1e-10
