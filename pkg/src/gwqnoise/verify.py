"""Oracle checks run by ``gwqnoise verify``.

Each check compares a closed form or fast path against brute-force state
vectors and reports the worst deviation against a fixed tolerance.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import interferometer as ifo
from . import noise
from . import states
from .detector import initial_ligo
from .su2 import TwoModeState, build_fock_operators, build_irrep_matrices, moments_of

PRNG_NAME = "numpy.random.PCG64"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tol: float
    seconds: float


def _rel(a, b, floor=1e-9):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), floor)))


def _moment_vector(m):
    return [m.mean_jx, m.mean_jy, m.mean_jz, m.var_jx, m.var_jy, m.var_jz, m.nbar1, m.nbar2]


def check_commutators(j_max: int, rng) -> float:
    worst = 0.0
    for two_j in range(0, 2 * j_max + 1):
        jx, jy, jz = build_irrep_matrices(two_j / 2)
        for a, b, c in ((jx, jy, jz), (jy, jz, jx), (jz, jx, jy)):
            worst = max(worst, np.max(np.abs(a @ b - b @ a - 1j * c), initial=0.0))
        cas = jx @ jx + jy @ jy + jz @ jz
        j = two_j / 2
        worst = max(worst, np.max(np.abs(cas - j * (j + 1) * np.eye(two_j + 1))))
    return float(worst)


def check_schwinger(n_max: int, rng) -> float:
    ops = build_fock_operators(n_max)
    worst = 0.0
    for two_j in range(n_max + 1):
        n1 = two_j - np.arange(two_j + 1)
        idx = n1 * (n_max + 1) + (two_j - n1)
        for fock_op, irrep_op in zip((ops.jx, ops.jy, ops.jz), build_irrep_matrices(two_j / 2)):
            worst = max(worst, np.max(np.abs(fock_op[np.ix_(idx, idx)] - irrep_op)))
    return float(worst)


def check_coherent_moments(alpha_max: float, rng) -> float:
    worst = 0.0
    for a in np.linspace(0.25, alpha_max, 6):
        alpha = a * np.exp(1j * rng.uniform(0, 2 * np.pi))
        spec = states.CoherentVacuum(alpha)
        worst = max(worst, _rel(_moment_vector(moments_of(states.spec_to_state(spec))),
                                _moment_vector(states.analytic_moments(spec))))
    return worst


def check_squeezed_moments(r_max: float, rng) -> float:
    worst = 0.0
    for alpha in (0.0, 1.0, 2.5):
        for r in np.linspace(0.1, r_max, 4):
            spec = states.CoherentSqueezed(alpha, r)
            worst = max(worst, _rel(_moment_vector(moments_of(states.spec_to_state(spec))),
                                    _moment_vector(states.analytic_moments(spec))))
    return worst


def check_twin_fock_moments(n_max: int, rng) -> float:
    worst = 0.0
    for n in range(n_max + 1):
        oracle = moments_of(states.twin_fock_state(n).to_fock())
        worst = max(worst, _rel(_moment_vector(oracle), _moment_vector(states.twin_fock_moments(n))))
    return worst


def check_intelligent_spectrum(j_max: int, rng) -> float:
    worst = 0.0
    for two_j in range(1, 2 * j_max + 1):
        j = two_j / 2
        m0 = j - np.arange(two_j + 1)
        for eta in (0.1, 0.5, 0.9):
            expected = 1j * m0 * math.sqrt(1 - eta**2)
            got = states.intelligent_spectrum(j, eta)
            worst = max(worst, float(np.max(np.abs(got - expected))))
            for m in m0:
                sol = states.solve_intelligent_state(j, eta, m)
                worst = max(worst, sol.residual())
    return worst


def check_intelligent_equality(j_max: int, rng) -> float:
    worst = 0.0
    for two_j in range(1, 2 * j_max + 1):
        j = two_j / 2
        for eta in (0.1, 0.5, 0.9):
            for m in j - np.arange(two_j + 1):
                mom = moments_of(states.solve_intelligent_state(j, eta, m).state.to_fock())
                if abs(mom.mean_jz) < 1e-12:
                    continue
                worst = max(worst, abs(math.sqrt(mom.var_jx * mom.var_jy) / (abs(mom.mean_jz) / 2) - 1))
    return worst


def check_picture_equivalence(j_max: int, rng) -> float:
    worst = 0.0
    for _ in range(20):
        state = states.random_irrep_state(int(rng.integers(1, 2 * j_max + 1)), rng)
        phi = rng.uniform(-np.pi, np.pi)
        a = moments_of(ifo.schroedinger_evolve(state, phi))
        b = ifo.heisenberg_transform(moments_of(state), phi).moments
        worst = max(worst, float(np.max(np.abs(np.subtract(_moment_vector(a), _moment_vector(b))))))
    return worst


def check_twin_fock_phase(j_max: int, rng) -> float:
    worst = 0.0
    for j in range(1, j_max + 1):
        for phi in (0.0, 0.1, 0.3):
            got = ifo.phase_uncertainty(states.twin_fock_state(j), "sqdiff", phi).squared
            worst = max(worst, abs(got / ifo.twin_fock_sqdiff_variance(j, phi) - 1))
    return worst


def check_universality(n_states: int, rng) -> float:
    config = initial_ligo()
    worst = 0.0
    for _ in range(n_states):
        psi1 = states.random_amplitudes(18, rng)
        psi1 = np.concatenate([psi1, [0, 0]])
        state = TwoModeState.fock_product(psi1, states.vacuum_single(1))
        b = noise.budget_from_moments(moments_of(state), config)
        ref = noise.budget_coherent(b.nbar, config)
        worst = max(worst, _rel([b.dz_pc, b.dz_rp], [ref.dz_pc, ref.dz_rp]))
    return worst


def check_heisenberg_bound(n_states: int, rng) -> float:
    """Largest shortfall below ``[2j(j+1)]^-1/2`` over random irrep states (<= 0 passes).

    Readouts with no phase slope (``S`` on ``j = 1/2``) are skipped.
    """
    worst = -math.inf
    for _ in range(n_states):
        two_j = int(rng.integers(1, 17))
        state = states.random_irrep_state(two_j, rng)
        bound = ifo.heisenberg_bound(two_j / 2)
        for obs in ifo.Observable:
            phi = rng.uniform(0, np.pi)
            try:
                value = ifo.phase_uncertainty(state, obs, phi).value
            except ifo.VanishingDerivativeError:
                continue
            worst = max(worst, bound - value)
    return worst


def check_optima(_: int, rng) -> float:
    config = initial_ligo()
    worst = 0.0
    for family in ("coherent", "heisenberg"):
        opt = noise.family_optimum(family, config)
        worst = max(worst, abs(opt.dz_opt / noise.sql(config) - 1))
    base = noise.family_optimum("coherent", config).power_opt
    for r in (0.25, 0.5, 1.0):
        opt = noise.family_optimum("squeezed", config, r=r, mode="asymptotic")
        worst = max(worst, abs(opt.power_opt / base / math.exp(-2 * r) - 1))
    return worst


@dataclass(frozen=True)
class Check:
    name: str
    fn: Callable
    quick: object
    full: object
    tol: float


CHECKS = (
    Check("su2-commutators-casimir", check_commutators, 6, 20, 1e-10),
    Check("schwinger-consistency", check_schwinger, 6, 12, 1e-12),
    Check("coherent-moments", check_coherent_moments, 2.0, 3.0, 1e-7),
    Check("squeezed-moments", check_squeezed_moments, 0.8, 1.2, 1e-7),
    Check("twin-fock-moments", check_twin_fock_moments, 6, 10, 1e-7),
    Check("intelligent-spectrum", check_intelligent_spectrum, 6, 10, 1e-9),
    Check("intelligent-uncertainty-equality", check_intelligent_equality, 6, 10, 1e-8),
    Check("picture-equivalence", check_picture_equivalence, 6, 8, 1e-9),
    Check("twin-fock-sqdiff-phase", check_twin_fock_phase, 3, 5, 1e-6),
    Check("vacuum-port-universality", check_universality, 5, 20, 1e-7),
    Check("heisenberg-bound", check_heisenberg_bound, 40, 200, 1e-9),
    Check("optimum-power-scaling", check_optima, 0, 0, 1e-6),
)


def run_checks(level: str = "quick", seed: int = 0) -> list[CheckResult]:
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    results = []
    for check in CHECKS:
        rng = np.random.Generator(np.random.PCG64(seed))
        start = time.perf_counter()
        worst = check.fn(check.quick if level == "quick" else check.full, rng)
        results.append(CheckResult(check.name, bool(worst <= check.tol), worst, check.tol,
                                   time.perf_counter() - start))
    return results
